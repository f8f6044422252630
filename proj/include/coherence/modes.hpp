#pragma once

// Mode decomposition with respect to a number operator. The j-th mode of an
// operator X keeps only the entries connecting eigenvalue lambda_c to
// lambda_c + j (row eigenvalue minus column eigenvalue equals j). Mode
// operators are stored dense at full dimension.

#include <cstddef>
#include <set>
#include <utility>
#include <vector>

#include "coherence/states.hpp"

namespace coherence {

/// ||rho^(j)||_1 above this counts the mode as present.
inline constexpr double kModePresenceThreshold = 1e-10;

struct ModeOperator {
  int j = 0;
  ComplexMatrix op;

  std::size_t dim() const noexcept { return op.rows(); }
};

/// Non-negative mode indices carrying weight above the presence threshold.
/// Negative modes are folded in through [rho^(j)]^dagger = rho^(-j).
struct ModeSet {
  std::set<int> present;

  bool contains(int j) const { return present.count(j) != 0; }
  /// True when some present mode lies in [lo, hi].
  bool intersects(int lo, int hi) const;
  bool only_zero() const { return present.size() == 1 && contains(0); }
};

ModeOperator mode_component(const ComplexMatrix& x, const NumberOperator& L, int j);
ModeOperator mode_component(const DensityMatrix& rho, const NumberOperator& L, int j);

/// M^(j)(rho) = ||rho^(j)||_1.
double mode_measure(const DensityMatrix& rho, const NumberOperator& L, int j);
double mode_measure(const ComplexMatrix& x, const NumberOperator& L, int j);

ModeSet modes(const DensityMatrix& rho, const NumberOperator& L);

/// Bipartite mode with respect to L_AB; |j| <= 2d-2.
ModeOperator bipartite_mode(const ComplexMatrix& x_ab, const BipartiteGenerator& gen, int j);
ModeOperator bipartite_mode(const DensityMatrix& rho_ab, const BipartiteGenerator& gen, int j);

ModeSet modes(const DensityMatrix& rho_ab, const BipartiteGenerator& gen);

/// sum_k rho_A^(k) (x) rho_B^(j-k): the global mode of a product state built
/// from local modes only.
ModeOperator product_mode_convolution(const DensityMatrix& rho_a, const DensityMatrix& rho_b,
                                      const NumberOperator& L, int j);

/// tr_B of a global mode; equals the j-th mode of the reduced state.
ModeOperator local_mode_of_global(const ModeOperator& global, std::size_t dim_a, std::size_t dim_b);

/// Basis operators |n+j, m><n, m| of the j-th global mode that survive the
/// partial trace into the j-th local mode.
struct VinSpec {
  int j = 0;
  /// (row, column) flat indices, ordered by (n, m).
  std::vector<std::pair<std::size_t, std::size_t>> positions;

  /// d^(j)
  std::size_t dimension() const noexcept { return positions.size(); }
  /// 0/1 pattern at full dimension.
  ComplexMatrix mask(std::size_t dim) const;
};

/// Requires 0 < j <= d-1.
VinSpec vin_projector(const BipartiteGenerator& gen, int j);

/// Pi_{c+j} X^(j) Pi_c restricted to the two eigenspaces: a d(c+j) x d(c)
/// matrix in the canonical eigenspace bases.
struct LrdOperator {
  int j = 0;
  std::size_t c = 0;
  ComplexMatrix op;
  /// V_in positions (block row, block column) inside this block.
  std::vector<std::pair<std::size_t, std::size_t>> vin_positions;

  /// d^(j,c)
  std::size_t vin_dimension() const noexcept { return vin_positions.size(); }
};

/// Blocks c = 0 .. 2d-2-j of a bipartite mode with j >= 0.
std::vector<LrdOperator> lrd_decompose(const ModeOperator& mode, const BipartiteGenerator& gen);

/// Direct sum of LR-D blocks back at full dimension.
ComplexMatrix lrd_reassemble(const std::vector<LrdOperator>& blocks, const BipartiteGenerator& gen);

}  // namespace coherence
