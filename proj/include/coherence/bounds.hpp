#pragma once

// Upper bounds on the local mode gain from two copies, the no-go test for
// states without low bipartite modes, and the correlation witness behind it.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "coherence/modes.hpp"

namespace coherence {

/// Two bounds closer than this are reported as a tie.
inline constexpr double kBoundTieTolerance = 1e-8;

/// ||(rho (x) rho)^(j)||_{d^(j)-KF} - ||rho^(j)||_1 with d^(j) = |V_in^(j)|.
/// Requires 0 < j <= d-1.
double bound_kyfan_global(const DensityMatrix& rho, const NumberOperator& L, int j);

/// sum_c ||Pi_{c+j} (rho (x) rho)^(j) Pi_c||_{d^(j,c)-KF} - ||rho^(j)||_1.
/// Each block's index is clamped to its smaller dimension; blocks without
/// V_in support contribute nothing.
double bound_kyfan_lrd(const DensityMatrix& rho, const NumberOperator& L, int j);

/// Entry positions (row, column) for the diagonal lemma.
using EntrySelection = std::vector<std::pair<std::size_t, std::size_t>>;

/// True iff sum |P_rc| over the selection is at most ||P||_{k-KF} + 1e-9.
/// The selection must use distinct rows and distinct columns, lie inside P
/// and have at most k entries; k >= 1 is clamped to min(rows, cols).
bool kyfan_diagonal_lemma_check(const ComplexMatrix& p, const EntrySelection& selection, std::size_t k);

enum class Verdict { no_go, not_applicable };

const char* to_string(Verdict v);

/// no_go iff the bipartite modes avoid [1, d-1] yet include something besides
/// mode 0.
Verdict nogo_check(const DensityMatrix& rho_ab, const BipartiteGenerator& gen);

struct CorrelationWitness {
  /// Mode pattern of the no-go test: modes != {0} and none in [1, d-1].
  bool pattern = false;
  /// ||rho_AB - rho_A (x) rho_B||_1.
  double product_distance = 0.0;
  /// product_distance > 1e-8.
  bool numerically_correlated = false;

  /// The pattern certifies correlation; otherwise fall back to the distance.
  bool correlated() const noexcept { return pattern || numerically_correlated; }
};

/// Throws Error when the pattern fires on a state that is numerically a
/// product, which would contradict the underlying lemma.
CorrelationWitness correlation_witness(const DensityMatrix& rho_ab, const BipartiteGenerator& gen);

enum class Tighter { bound1, bound2, tie };

const char* to_string(Tighter t);
Tighter compare_bounds(double bound1, double bound2);

struct BoundReport {
  int j = 0;
  double bound1 = 0.0;
  double bound2 = 0.0;
  /// M^(j)(rho)
  double baseline = 0.0;
  std::optional<double> achieved;
  Tighter tighter = Tighter::tie;

  /// Both bounds dominate `achieved` up to 1e-8 (vacuously true without it).
  bool sound() const noexcept;
};

BoundReport make_bound_report(const DensityMatrix& rho, const NumberOperator& L, int j,
                              std::optional<double> achieved = std::nullopt);

nlohmann::json to_json(const BoundReport& r);

struct BoundCompareRow {
  std::uint64_t seed = 0;
  std::size_t rank = 0;
  int j = 0;
  double bound1 = 0.0;
  double bound2 = 0.0;
  std::optional<double> achieved;
  Tighter tighter = Tighter::tie;
};

/// seed, rank, j, bound1, bound2, achieved, tighter. A missing `achieved`
/// leaves the field empty.
void write_bound_compare_csv(std::ostream& out, const std::vector<BoundCompareRow>& rows);

}  // namespace coherence
