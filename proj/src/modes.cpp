#include "coherence/modes.hpp"

#include <cstdlib>
#include <string>

#include "coherence/error.hpp"

namespace coherence {

namespace {

void require_local_range(int j, std::size_t dim, const char* op) {
  if (static_cast<std::size_t>(std::abs(j)) >= dim) {
    throw ValidationError(std::string(op) + ": mode index " + std::to_string(j) + " outside [-" +
                          std::to_string(dim - 1) + ", " + std::to_string(dim - 1) + "]");
  }
}

// V_in basis pairs (|n+j, m>, |n, m>) with n + m = c, as product kets.
std::vector<std::pair<ProductKet, ProductKet>> vin_pairs(std::size_t d, int j, std::size_t c) {
  std::vector<std::pair<ProductKet, ProductKet>> out;
  const auto shift = static_cast<std::size_t>(j);
  for (std::size_t n = 0; n + shift < d; ++n) {
    if (n > c || c - n >= d) continue;
    const std::size_t m = c - n;
    out.push_back({{n + shift, m}, {n, m}});
  }
  return out;
}

}  // namespace

bool ModeSet::intersects(int lo, int hi) const {
  auto it = present.lower_bound(lo);
  return it != present.end() && *it <= hi;
}

ModeOperator mode_component(const ComplexMatrix& x, const NumberOperator& L, int j) {
  if (x.rows() != L.dim() || x.cols() != L.dim()) {
    throw DimensionError("mode_component: operator is " + std::to_string(x.rows()) + "x" +
                         std::to_string(x.cols()) + ", generator dim " + std::to_string(L.dim()));
  }
  require_local_range(j, L.dim(), "mode_component");
  ModeOperator out{j, ComplexMatrix(L.dim(), L.dim())};
  for (std::size_t c = 0; c < L.dim(); ++c) {
    const long r = static_cast<long>(c) + j;
    if (r < 0 || r >= static_cast<long>(L.dim())) continue;
    out.op(static_cast<std::size_t>(r), c) = x(static_cast<std::size_t>(r), c);
  }
  return out;
}

ModeOperator mode_component(const DensityMatrix& rho, const NumberOperator& L, int j) {
  return mode_component(rho.matrix(), L, j);
}

double mode_measure(const ComplexMatrix& x, const NumberOperator& L, int j) {
  return trace_norm(mode_component(x, L, j).op);
}

double mode_measure(const DensityMatrix& rho, const NumberOperator& L, int j) {
  return mode_measure(rho.matrix(), L, j);
}

ModeSet modes(const DensityMatrix& rho, const NumberOperator& L) {
  ModeSet set;
  for (int j = 0; j < static_cast<int>(L.dim()); ++j)
    if (mode_measure(rho, L, j) > kModePresenceThreshold) set.present.insert(j);
  return set;
}

ModeOperator bipartite_mode(const ComplexMatrix& x_ab, const BipartiteGenerator& gen, int j) {
  if (x_ab.rows() != gen.dim() || x_ab.cols() != gen.dim()) {
    throw DimensionError("bipartite_mode: operator is " + std::to_string(x_ab.rows()) + "x" +
                         std::to_string(x_ab.cols()) + ", expected " + std::to_string(gen.dim()));
  }
  const int max_gap = static_cast<int>(gen.eigenvalue_count()) - 1;
  if (std::abs(j) > max_gap) {
    throw ValidationError("bipartite_mode: mode index " + std::to_string(j) + " outside [-" +
                          std::to_string(max_gap) + ", " + std::to_string(max_gap) + "]");
  }
  ModeOperator out{j, ComplexMatrix(gen.dim(), gen.dim())};
  for (std::size_t r = 0; r < gen.dim(); ++r)
    for (std::size_t c = 0; c < gen.dim(); ++c)
      if (static_cast<int>(gen.eigenvalue_of(r)) - static_cast<int>(gen.eigenvalue_of(c)) == j)
        out.op(r, c) = x_ab(r, c);
  return out;
}

ModeOperator bipartite_mode(const DensityMatrix& rho_ab, const BipartiteGenerator& gen, int j) {
  return bipartite_mode(rho_ab.matrix(), gen, j);
}

ModeSet modes(const DensityMatrix& rho_ab, const BipartiteGenerator& gen) {
  ModeSet set;
  for (int j = 0; j < static_cast<int>(gen.eigenvalue_count()); ++j)
    if (trace_norm(bipartite_mode(rho_ab, gen, j).op) > kModePresenceThreshold) set.present.insert(j);
  return set;
}

ModeOperator product_mode_convolution(const DensityMatrix& rho_a, const DensityMatrix& rho_b,
                                      const NumberOperator& L, int j) {
  const int top = static_cast<int>(L.dim()) - 1;
  if (std::abs(j) > 2 * top) throw ValidationError("product_mode_convolution: mode index out of range");
  const std::size_t d = L.dim();
  ModeOperator out{j, ComplexMatrix(d * d, d * d)};
  for (int k = -top; k <= top; ++k) {
    const int rest = j - k;
    if (std::abs(rest) > top) continue;
    out.op += tensor(mode_component(rho_a, L, k).op, mode_component(rho_b, L, rest).op);
  }
  return out;
}

ModeOperator local_mode_of_global(const ModeOperator& global, std::size_t dim_a, std::size_t dim_b) {
  return {global.j, partial_trace_b(global.op, dim_a, dim_b)};
}

ComplexMatrix VinSpec::mask(std::size_t dim) const {
  ComplexMatrix m(dim, dim);
  for (const auto& [r, c] : positions) m(r, c) = 1.0;
  return m;
}

VinSpec vin_projector(const BipartiteGenerator& gen, int j) {
  const std::size_t d = gen.local_dim();
  if (j <= 0 || static_cast<std::size_t>(j) > d - 1) {
    throw ValidationError("vin_projector: mode index " + std::to_string(j) + " outside [1, " +
                          std::to_string(d - 1) + "]");
  }
  VinSpec spec{j, {}};
  for (std::size_t n = 0; n + static_cast<std::size_t>(j) < d; ++n)
    for (std::size_t m = 0; m < d; ++m)
      spec.positions.emplace_back(gen.flat_index({n + static_cast<std::size_t>(j), m}), gen.flat_index({n, m}));
  return spec;
}

std::vector<LrdOperator> lrd_decompose(const ModeOperator& mode, const BipartiteGenerator& gen) {
  if (mode.op.rows() != gen.dim() || mode.op.cols() != gen.dim()) {
    throw DimensionError("lrd_decompose: mode operator does not match the generator dimension");
  }
  const int max_gap = static_cast<int>(gen.eigenvalue_count()) - 1;
  if (mode.j < 0 || mode.j > max_gap) {
    throw ValidationError("lrd_decompose: mode index " + std::to_string(mode.j) + " outside [0, " +
                          std::to_string(max_gap) + "]");
  }
  const auto shift = static_cast<std::size_t>(mode.j);
  std::vector<LrdOperator> blocks;
  for (std::size_t c = 0; c + shift < gen.eigenvalue_count(); ++c) {
    const auto& rows = gen.eigenspace(c + shift);
    const auto& cols = gen.eigenspace(c);
    LrdOperator block{mode.j, c, ComplexMatrix(rows.size(), cols.size()), {}};
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t s = 0; s < cols.size(); ++s)
        block.op(r, s) = mode.op(gen.flat_index(rows[r]), gen.flat_index(cols[s]));
    for (const auto& [out_ket, in_ket] : vin_pairs(gen.local_dim(), mode.j, c)) {
      block.vin_positions.emplace_back(gen.position_in_eigenspace(gen.flat_index(out_ket)),
                                       gen.position_in_eigenspace(gen.flat_index(in_ket)));
    }
    blocks.push_back(std::move(block));
  }
  return blocks;
}

ComplexMatrix lrd_reassemble(const std::vector<LrdOperator>& blocks, const BipartiteGenerator& gen) {
  ComplexMatrix out(gen.dim(), gen.dim());
  for (const auto& block : blocks) {
    const auto& rows = gen.eigenspace(block.c + static_cast<std::size_t>(block.j));
    const auto& cols = gen.eigenspace(block.c);
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t s = 0; s < cols.size(); ++s)
        out(gen.flat_index(rows[r]), gen.flat_index(cols[s])) += block.op(r, s);
  }
  return out;
}

}  // namespace coherence
