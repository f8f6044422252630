#include "coherence/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>
#include <string>

#include "coherence/csv.hpp"
#include "coherence/error.hpp"

namespace coherence {

namespace {

void require_bound_range(const NumberOperator& L, int j, const char* op) {
  if (j <= 0 || static_cast<std::size_t>(j) > L.dim() - 1) {
    throw ValidationError(std::string(op) + ": mode index " + std::to_string(j) + " outside [1, " +
                          std::to_string(L.dim() - 1) + "]");
  }
}

void require_matching(const DensityMatrix& rho, const NumberOperator& L, const char* op) {
  if (rho.dim() != L.dim()) {
    throw DimensionError(std::string(op) + ": state dim " + std::to_string(rho.dim()) + " vs generator dim " +
                         std::to_string(L.dim()));
  }
}

double clamped_ky_fan(const ComplexMatrix& m, std::size_t k) {
  k = std::min({k, m.rows(), m.cols()});
  if (k == 0) return 0.0;
  return ky_fan_norm(m, k);
}

}  // namespace

double bound_kyfan_global(const DensityMatrix& rho, const NumberOperator& L, int j) {
  require_matching(rho, L, "bound_kyfan_global");
  require_bound_range(L, j, "bound_kyfan_global");
  const BipartiteGenerator gen(L);
  const ModeOperator global = bipartite_mode(tensor(rho, rho), gen, j);
  return clamped_ky_fan(global.op, vin_projector(gen, j).dimension()) - mode_measure(rho, L, j);
}

double bound_kyfan_lrd(const DensityMatrix& rho, const NumberOperator& L, int j) {
  require_matching(rho, L, "bound_kyfan_lrd");
  require_bound_range(L, j, "bound_kyfan_lrd");
  const BipartiteGenerator gen(L);
  const ModeOperator global = bipartite_mode(tensor(rho, rho), gen, j);
  double total = 0.0;
  for (const auto& block : lrd_decompose(global, gen)) total += clamped_ky_fan(block.op, block.vin_dimension());
  return total - mode_measure(rho, L, j);
}

bool kyfan_diagonal_lemma_check(const ComplexMatrix& p, const EntrySelection& selection, std::size_t k) {
  if (k < 1) throw ValidationError("kyfan_diagonal_lemma_check: k must be at least 1");
  if (selection.size() > k) {
    throw ValidationError("kyfan_diagonal_lemma_check: " + std::to_string(selection.size()) +
                          " entries selected for k = " + std::to_string(k));
  }
  std::set<std::size_t> rows;
  std::set<std::size_t> cols;
  double sum = 0.0;
  for (const auto& [r, c] : selection) {
    if (r >= p.rows() || c >= p.cols()) throw ValidationError("kyfan_diagonal_lemma_check: entry outside the matrix");
    if (!rows.insert(r).second) throw ValidationError("kyfan_diagonal_lemma_check: repeated row " + std::to_string(r));
    if (!cols.insert(c).second) throw ValidationError("kyfan_diagonal_lemma_check: repeated column " + std::to_string(c));
    sum += std::abs(p(r, c));
  }
  return sum <= clamped_ky_fan(p, k) + 1e-9;
}

const char* to_string(Verdict v) { return v == Verdict::no_go ? "no_go" : "not_applicable"; }

namespace {

bool nogo_pattern(const DensityMatrix& rho_ab, const BipartiteGenerator& gen) {
  if (rho_ab.dim() != gen.dim()) {
    throw DimensionError("nogo_check: state dim " + std::to_string(rho_ab.dim()) + " vs generator dim " +
                         std::to_string(gen.dim()));
  }
  const ModeSet set = modes(rho_ab, gen);
  return !set.intersects(1, static_cast<int>(gen.local_dim()) - 1) && !set.only_zero();
}

}  // namespace

Verdict nogo_check(const DensityMatrix& rho_ab, const BipartiteGenerator& gen) {
  return nogo_pattern(rho_ab, gen) ? Verdict::no_go : Verdict::not_applicable;
}

CorrelationWitness correlation_witness(const DensityMatrix& rho_ab, const BipartiteGenerator& gen) {
  CorrelationWitness w;
  w.pattern = nogo_pattern(rho_ab, gen);
  const std::size_t d = gen.local_dim();
  const ComplexMatrix product = tensor(partial_trace_b(rho_ab.matrix(), d, d), partial_trace_a(rho_ab.matrix(), d, d));
  w.product_distance = trace_norm(rho_ab.matrix() - product);
  w.numerically_correlated = w.product_distance > 1e-8;
  if (w.pattern && !w.numerically_correlated) {
    throw Error("correlation_witness: mode pattern fired on a product state (distance " +
                std::to_string(w.product_distance) + ")");
  }
  return w;
}

const char* to_string(Tighter t) {
  switch (t) {
    case Tighter::bound1: return "bound1";
    case Tighter::bound2: return "bound2";
    case Tighter::tie: return "tie";
  }
  return "unknown";
}

Tighter compare_bounds(double bound1, double bound2) {
  if (std::abs(bound1 - bound2) <= kBoundTieTolerance) return Tighter::tie;
  return bound1 < bound2 ? Tighter::bound1 : Tighter::bound2;
}

bool BoundReport::sound() const noexcept {
  if (!achieved) return true;
  return bound1 >= *achieved - 1e-8 && bound2 >= *achieved - 1e-8;
}

BoundReport make_bound_report(const DensityMatrix& rho, const NumberOperator& L, int j, std::optional<double> achieved) {
  BoundReport r;
  r.j = j;
  r.bound1 = bound_kyfan_global(rho, L, j);
  r.bound2 = bound_kyfan_lrd(rho, L, j);
  r.baseline = mode_measure(rho, L, j);
  r.achieved = achieved;
  r.tighter = compare_bounds(r.bound1, r.bound2);
  return r;
}

nlohmann::json to_json(const BoundReport& r) {
  nlohmann::json j{{"j", r.j},
                   {"bound1", r.bound1},
                   {"bound2", r.bound2},
                   {"baseline", r.baseline},
                   {"tighter", to_string(r.tighter)}};
  j["achieved"] = r.achieved ? nlohmann::json(*r.achieved) : nlohmann::json(nullptr);
  return j;
}

void write_bound_compare_csv(std::ostream& out, const std::vector<BoundCompareRow>& rows) {
  out << "seed,rank,j,bound1,bound2,achieved,tighter\n";
  for (const auto& row : rows) {
    out << row.seed << ',' << row.rank << ',' << row.j << ',' << format_real(row.bound1) << ','
        << format_real(row.bound2) << ',' << (row.achieved ? format_real(*row.achieved) : std::string()) << ','
        << to_string(row.tighter) << '\n';
  }
}

}  // namespace coherence
