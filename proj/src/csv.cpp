#include "coherence/csv.hpp"

#include <cstdio>

namespace coherence {

std::string format_real(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.16e", value);
  return buffer;
}

}  // namespace coherence
