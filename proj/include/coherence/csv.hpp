#pragma once

#include <string>

namespace coherence {

/// Fixed 17-significant-digit scientific notation ("%.16e"), which
/// round-trips every finite double exactly.
std::string format_real(double value);

}  // namespace coherence
