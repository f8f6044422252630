#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "coherence/states.hpp"

namespace coherence {

/// A parsed state file. `local_dim` is set when the file describes a
/// bipartite state over two d-level systems ("local_dim": d, "dim": d*d).
struct StateSource {
  DensityMatrix state;
  std::optional<std::size_t> local_dim;

  bool bipartite() const noexcept { return local_dim.has_value(); }
};

/// {"dim": d, "re": [[...]], "im": [[...]]}; "im" may be omitted for real
/// matrices. Throws ValidationError naming the offending field or invariant.
DensityMatrix density_from_json(const nlohmann::json& j);
nlohmann::json density_to_json(const DensityMatrix& rho, std::optional<std::size_t> local_dim = std::nullopt);

/// {"nx": .., "ny": .., "nz": ..}; "ny" defaults to 0.
BlochState bloch_from_json(const nlohmann::json& j);
nlohmann::json bloch_to_json(const BlochState& b);

/// Accepts either format: a Bloch triple becomes a qubit density matrix.
StateSource state_source_from_json(const nlohmann::json& j);
StateSource load_state_file(const std::string& path);

/// Matrix as {"re": [[...]], "im": [[...]]}.
nlohmann::json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const nlohmann::json& j);

}  // namespace coherence
