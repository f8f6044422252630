#include "coherence/optimizer.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "coherence/error.hpp"
#include "coherence/modes.hpp"
#include "coherence/sampling.hpp"
#include "coherence/state_io.hpp"

namespace coherence {

void UnitarySearchConfig::validate() const {
  if (restarts < 1) throw ValidationError("UnitarySearchConfig: restarts must be at least 1");
  if (max_iters < 1) throw ValidationError("UnitarySearchConfig: max_iters must be at least 1");
  if (!(tolerance > 0.0)) throw ValidationError("UnitarySearchConfig: tolerance must be positive");
  if (!(initial_step > 0.0) || !(min_step > 0.0)) throw ValidationError("UnitarySearchConfig: steps must be positive");
  if (!(step_decay > 0.0 && step_decay < 1.0)) throw ValidationError("UnitarySearchConfig: step_decay must lie in (0, 1)");
}

nlohmann::json to_json(const SearchOutcome& outcome) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : outcome.best_unitary.blocks()) blocks.push_back(matrix_to_json(b));
  return {{"best_delta_m", outcome.best_delta_m},
          {"history", outcome.history},
          {"converged", outcome.converged},
          {"best_restart", outcome.best_restart},
          {"best_unitary", {{"local_dim", outcome.best_unitary.generator().local_dim()}, {"blocks", blocks}}}};
}

ComplexMatrix parameterize_block_of_size(std::size_t n, std::span<const double> params) {
  if (params.size() != block_parameter_count(n)) {
    throw DimensionError("parameterize_block: expected " + std::to_string(block_parameter_count(n)) +
                         " parameters, got " + std::to_string(params.size()));
  }
  ComplexMatrix h(n, n);
  std::size_t k = 0;
  for (std::size_t r = 0; r < n; ++r) h(r, r) = params[k++];
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = r + 1; c < n; ++c) {
      h(r, c) = Complex(params[k], params[k + 1]);
      h(c, r) = std::conj(h(r, c));
      k += 2;
    }
  return exp_i_hermitian(h);
}

ComplexMatrix parameterize_block(const BipartiteGenerator& gen, std::size_t c, std::span<const double> params) {
  return parameterize_block_of_size(gen.degeneracy(c), params);
}

double delta_m_for_unitary(const DensityMatrix& rho_ab, const AllowedUnitary& u, int j) {
  const auto& gen = u.generator();
  if (rho_ab.dim() != gen.dim()) throw DimensionError("delta_m_for_unitary: state does not match the unitary");
  const std::size_t d = gen.local_dim();
  const DensityMatrix before = reduced_a(rho_ab, d, d);
  const DensityMatrix after = local_output(rho_ab, u);
  return mode_measure(after, gen.local(), j) - mode_measure(before, gen.local(), j);
}

namespace {

// Objective restricted to what the local mode can see: for each LR-D block
// only the V_in entries of V_{c+j} R V_c^dagger are formed and accumulated
// into the local stripe sigma_A(n+j, n). A single-stripe matrix has trace
// norm equal to the sum of its entry moduli.
class FastObjective {
 public:
  FastObjective(const DensityMatrix& rho_ab, const BipartiteGenerator& gen, int j) : gen_(gen), j_(j) {
    const ModeOperator global = bipartite_mode(rho_ab, gen, j);
    for (auto& block : lrd_decompose(global, gen)) {
      if (block.vin_positions.empty()) continue;
      Term t{block.c, std::move(block.op), {}};
      for (const auto& [r, s] : block.vin_positions) t.entries.push_back({r, s, gen.eigenspace(block.c)[s].n});
      terms_.push_back(std::move(t));
    }
    const std::size_t d = gen.local_dim();
    const ComplexMatrix local = partial_trace_b(rho_ab.matrix(), d, d);
    for (std::size_t n = 0; n + static_cast<std::size_t>(j) < d; ++n) baseline_ += std::abs(local(n + j, n));
  }

  double operator()(const std::vector<ComplexMatrix>& blocks) const {
    const std::size_t d = gen_.local_dim();
    std::vector<Complex> stripe(d - static_cast<std::size_t>(j_));
    for (const auto& t : terms_) {
      const ComplexMatrix& vout = blocks[t.c + static_cast<std::size_t>(j_)];
      const ComplexMatrix w = t.r * blocks[t.c].adjoint();
      for (const auto& e : t.entries) {
        Complex acc = 0.0;
        for (std::size_t a = 0; a < w.rows(); ++a) acc += vout(e.row, a) * w(a, e.col);
        stripe[e.n] += acc;
      }
    }
    double total = 0.0;
    for (const auto& z : stripe) total += std::abs(z);
    return total - baseline_;
  }

 private:
  struct Entry {
    std::size_t row;
    std::size_t col;
    std::size_t n;
  };
  struct Term {
    std::size_t c;
    ComplexMatrix r;
    std::vector<Entry> entries;
  };

  const BipartiteGenerator& gen_;
  int j_;
  std::vector<Term> terms_;
  double baseline_ = 0.0;
};

struct RestartResult {
  double best = 0.0;
  std::vector<std::vector<double>> params;
  bool stable = false;
};

RestartResult pattern_search(const FastObjective& objective, const BipartiteGenerator& gen,
                             std::vector<std::vector<double>> params, const UnitarySearchConfig& cfg) {
  const std::size_t blocks_n = gen.eigenvalue_count();
  std::vector<ComplexMatrix> blocks;
  for (std::size_t c = 0; c < blocks_n; ++c) blocks.push_back(parameterize_block(gen, c, params[c]));

  double best = objective(blocks);
  std::vector<double> trajectory{best};
  double step = cfg.initial_step;
  for (std::size_t iter = 0; iter < cfg.max_iters && step >= cfg.min_step; ++iter) {
    bool improved = false;
    for (std::size_t c = 0; c < blocks_n; ++c) {
      for (std::size_t k = 0; k < params[c].size(); ++k) {
        const double original = params[c][k];
        for (const double dir : {1.0, -1.0}) {
          params[c][k] = original + dir * step;
          ComplexMatrix candidate = parameterize_block(gen, c, params[c]);
          std::swap(blocks[c], candidate);
          const double value = objective(blocks);
          if (value > best) {
            best = value;
            improved = true;
            break;
          }
          std::swap(blocks[c], candidate);
          params[c][k] = original;
        }
      }
    }
    if (!improved) step *= cfg.step_decay;
    trajectory.push_back(best);
  }

  const std::size_t mark = (trajectory.size() - 1) * 4 / 5;
  return {best, std::move(params), best - trajectory[mark] <= cfg.tolerance};
}

}  // namespace

SearchOutcome maximize_delta_m(const DensityMatrix& rho_ab, const BipartiteGenerator& gen, int j,
                               const UnitarySearchConfig& cfg) {
  cfg.validate();
  const std::size_t d = gen.local_dim();
  if (d > kMaxSearchDim) {
    throw UnsupportedParameter("maximize_delta_m: local dimension " + std::to_string(d) + " exceeds the supported " +
                               std::to_string(kMaxSearchDim));
  }
  if (j <= 0 || static_cast<std::size_t>(j) > d - 1) {
    throw ValidationError("maximize_delta_m: mode index " + std::to_string(j) + " outside [1, " +
                          std::to_string(d - 1) + "]");
  }
  if (rho_ab.dim() != gen.dim()) throw DimensionError("maximize_delta_m: state does not match the generator");

  const FastObjective objective(rho_ab, gen, j);
  SearchOutcome outcome{0.0, AllowedUnitary::identity(gen), {}, false, 0};
  std::vector<std::vector<double>> best_params;
  bool have_best = false;
  for (std::size_t restart = 0; restart < cfg.restarts; ++restart) {
    std::vector<std::vector<double>> start(gen.eigenvalue_count());
    Rng rng(derive_seed(cfg.seed, restart));
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    for (std::size_t c = 0; c < start.size(); ++c) {
      start[c].assign(block_parameter_count(gen.degeneracy(c)), 0.0);
      if (restart > 0)
        for (auto& p : start[c]) p = angle(rng);
    }
    RestartResult r = pattern_search(objective, gen, std::move(start), cfg);
    outcome.history.push_back(r.best);
    if (!have_best || r.best > outcome.best_delta_m) {
      have_best = true;
      outcome.best_delta_m = r.best;
      outcome.best_restart = restart;
      outcome.converged = r.stable;
      best_params = std::move(r.params);
    }
  }

  std::vector<ComplexMatrix> blocks;
  for (std::size_t c = 0; c < gen.eigenvalue_count(); ++c) blocks.push_back(parameterize_block(gen, c, best_params[c]));
  outcome.best_unitary = AllowedUnitary(gen, std::move(blocks), 1e-10);
  return outcome;
}

SearchOutcome maximize_delta_m(const DensityMatrix& rho, const NumberOperator& L, int j,
                               const UnitarySearchConfig& cfg) {
  if (rho.dim() != L.dim()) throw DimensionError("maximize_delta_m: state does not match the generator");
  if (L.dim() > kMaxSearchDim) {
    throw UnsupportedParameter("maximize_delta_m: local dimension " + std::to_string(L.dim()) +
                               " exceeds the supported " + std::to_string(kMaxSearchDim));
  }
  return maximize_delta_m(tensor(rho, rho), BipartiteGenerator(L), j, cfg);
}

AllowedUnitary random_allowed_unitary(const BipartiteGenerator& gen, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ComplexMatrix> blocks;
  for (std::size_t c = 0; c < gen.eigenvalue_count(); ++c) blocks.push_back(haar_unitary(gen.degeneracy(c), rng));
  return AllowedUnitary(gen, std::move(blocks));
}

}  // namespace coherence
