#pragma once

// Numerical maximisation of the local mode gain over allowed unitaries. Each
// eigenspace block is exp(iH) for a Hermitian H with d(c)^2 real parameters,
// searched by compass-style pattern search with restarts. The result is a
// lower bound on the true maximum.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "coherence/states.hpp"

namespace coherence {

/// Largest local dimension the search accepts.
inline constexpr std::size_t kMaxSearchDim = 4;

struct UnitarySearchConfig {
  std::size_t restarts = 8;
  /// Coordinate sweeps per restart.
  std::size_t max_iters = 2000;
  double initial_step = 0.5;
  /// Step multiplier after a sweep without improvement.
  double step_decay = 0.5;
  /// A restart ends once its step drops below this.
  double min_step = 1e-9;
  std::uint64_t seed = 0;
  /// Stability threshold for the convergence flag.
  double tolerance = 1e-9;

  /// Throws ValidationError on restarts = 0, max_iters = 0, non-positive
  /// tolerance or steps, or a decay outside (0, 1).
  void validate() const;
};

struct SearchOutcome {
  double best_delta_m = 0.0;
  AllowedUnitary best_unitary;
  /// Best value reached by each restart, in restart order.
  std::vector<double> history;
  /// The winning restart's best value changed by at most `tolerance` over
  /// its final 20% of sweeps.
  bool converged = false;
  /// Restart that produced best_delta_m (lowest index on ties).
  std::size_t best_restart = 0;
};

nlohmann::json to_json(const SearchOutcome& outcome);

/// Number of real parameters of an n x n block.
constexpr std::size_t block_parameter_count(std::size_t n) { return n * n; }

/// exp(i H(params)) with H diagonal params[0..n) followed by (re, im) of the
/// upper triangle in row-major order. Throws DimensionError on a wrong
/// parameter count.
ComplexMatrix parameterize_block_of_size(std::size_t n, std::span<const double> params);
ComplexMatrix parameterize_block(const BipartiteGenerator& gen, std::size_t c, std::span<const double> params);

/// M^(j)(tr_B[V rho_AB V^dagger]) - M^(j)(tr_B rho_AB), computed by full
/// simulation and singular values.
double delta_m_for_unitary(const DensityMatrix& rho_ab, const AllowedUnitary& u, int j);

/// Maximises the gain from rho (x) rho. Requires 0 < j <= d-1 (else
/// ValidationError) and d <= 4 (else UnsupportedParameter).
SearchOutcome maximize_delta_m(const DensityMatrix& rho, const NumberOperator& L, int j,
                               const UnitarySearchConfig& cfg = {});

/// Same search for an arbitrary bipartite state over two copies of a d-level
/// system.
SearchOutcome maximize_delta_m(const DensityMatrix& rho_ab, const BipartiteGenerator& gen, int j,
                               const UnitarySearchConfig& cfg = {});

/// Independent Haar unitary on every eigenspace block, fully determined by
/// the seed.
AllowedUnitary random_allowed_unitary(const BipartiteGenerator& gen, std::uint64_t seed);

}  // namespace coherence
