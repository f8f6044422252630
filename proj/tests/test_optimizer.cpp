#include <gtest/gtest.h>

#include <cmath>

#include "coherence/bounds.hpp"
#include "coherence/error.hpp"
#include "coherence/modes.hpp"
#include "coherence/optimizer.hpp"
#include "coherence/qubit_protocol.hpp"
#include "coherence/sampling.hpp"
#include "test_support.hpp"

namespace coherence {
namespace {

using testing::to_eigen;

TEST(Parameterization, ZeroParametersGiveIdentity) {
  for (std::size_t n = 1; n <= 4; ++n) {
    const std::vector<double> zeros(block_parameter_count(n), 0.0);
    EXPECT_LT(max_abs_diff(parameterize_block_of_size(n, zeros), ComplexMatrix::identity(n)), 1e-15);
  }
}

TEST(Parameterization, ImaginaryOffDiagonalIsRealRotation) {
  const double theta = 0.6;
  const std::vector<double> params{0.0, 0.0, 0.0, theta};
  const ComplexMatrix r = parameterize_block_of_size(2, params);
  const ComplexMatrix expected{{std::cos(theta), -std::sin(theta)}, {std::sin(theta), std::cos(theta)}};
  EXPECT_LT(max_abs_diff(r, expected), 1e-15);
}

TEST(Parameterization, DiagonalParametersArePhases) {
  const std::vector<double> params{0.3, -1.1, 0.0, 0.0};
  const ComplexMatrix r = parameterize_block_of_size(2, params);
  EXPECT_NEAR(std::abs(r(0, 0) - std::polar(1.0, 0.3)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(r(1, 1) - std::polar(1.0, -1.1)), 0.0, 1e-15);
}

TEST(Parameterization, RandomBlocksAreUnitaryAndMatchEigenExponential) {
  Rng rng(21);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const BipartiteGenerator gen(3);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> p(block_parameter_count(3));
    for (auto& x : p) x = u(rng);
    const ComplexMatrix block = parameterize_block(gen, 2, p);
    ASSERT_EQ(block.rows(), 3u);
    EXPECT_LT(unitarity_residual(block), 1e-10);
    Eigen::Matrix3cd h = Eigen::Matrix3cd::Zero();
    for (int i = 0; i < 3; ++i) h(i, i) = p[static_cast<std::size_t>(i)];
    std::size_t next = 3;
    for (int r = 0; r < 3; ++r)
      for (int c = r + 1; c < 3; ++c) {
        h(r, c) = std::complex<double>(p[next], p[next + 1]);
        h(c, r) = std::conj(h(r, c));
        next += 2;
      }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(h);
    const Eigen::Vector3cd phases = (std::complex<double>(0.0, 1.0) * es.eigenvalues().cast<std::complex<double>>()).array().exp();
    const Eigen::Matrix3cd oracle = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    EXPECT_LT((to_eigen(block) - oracle).cwiseAbs().maxCoeff(), 1e-12);
  }
  EXPECT_THROW(parameterize_block(gen, 2, std::vector<double>(4)), DimensionError);
}

TEST(DeltaM, FullSimulationAgreesWithClosedForm) {
  const DensityMatrix rho(ComplexMatrix{{0.9, 0.1}, {0.1, 0.1}});
  const auto r = optimal_concentration(rho);
  EXPECT_NEAR(delta_m_for_unitary(tensor(rho, rho), r.unitary, 1), r.delta_m, 1e-14);
  const BipartiteGenerator gen(2);
  EXPECT_NEAR(delta_m_for_unitary(tensor(rho, rho), AllowedUnitary::identity(gen), 1), 0.0, 1e-15);
}

TEST(Search, QubitWorkedExample) {
  const DensityMatrix rho(ComplexMatrix{{0.9, 0.1}, {0.1, 0.1}});
  const auto out = maximize_delta_m(rho, NumberOperator(2), 1);
  EXPECT_NEAR(out.best_delta_m, 0.028062484748656982, 1e-6);
  EXPECT_TRUE(out.converged);
  EXPECT_EQ(out.history.size(), 8u);
  EXPECT_NEAR(delta_m_for_unitary(tensor(rho, rho), out.best_unitary, 1), out.best_delta_m, 1e-12);
}

TEST(Search, MatchesClosedFormOnRandomQubits) {
  Rng rng(22);
  for (int t = 0; t < 40; ++t) {
    const DensityMatrix rho = bloch_to_density(random_bloch(rng));
    UnitarySearchConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(t);
    const auto out = maximize_delta_m(rho, NumberOperator(2), 1, cfg);
    EXPECT_NEAR(out.best_delta_m, optimal_concentration(rho).delta_m, 1e-6);
  }
}

TEST(Search, BoundCoherenceCannotBeConcentrated) {
  for (const double p01 : {0.01, 0.2, 0.45}) {
    const DensityMatrix rho(ComplexMatrix{{0.5, p01}, {p01, 0.5}});
    const auto out = maximize_delta_m(rho, NumberOperator(2), 1);
    EXPECT_LE(out.best_delta_m, 1e-8);
    EXPECT_GE(out.best_delta_m, 0.0);
  }
}

TEST(Search, IncoherentQutritGainsNothing) {
  const DensityMatrix rho(ComplexMatrix::diagonal({0.6, 0.3, 0.1}));
  UnitarySearchConfig cfg;
  cfg.restarts = 3;
  for (int j = 1; j <= 2; ++j) EXPECT_LE(maximize_delta_m(rho, NumberOperator(3), j, cfg).best_delta_m, 1e-8);
}

TEST(Search, QutritResultsRespectBoundsAndSimulation) {
  Rng rng(23);
  const NumberOperator L(3);
  UnitarySearchConfig cfg;
  cfg.restarts = 3;
  for (int t = 0; t < 6; ++t) {
    const DensityMatrix rho = random_density(3, 1 + t % 3, rng);
    for (int j = 1; j <= 2; ++j) {
      cfg.seed = static_cast<std::uint64_t>(10 * t + j);
      const auto out = maximize_delta_m(rho, L, j, cfg);
      EXPECT_GE(out.best_delta_m, -1e-15);
      EXPECT_NEAR(delta_m_for_unitary(tensor(rho, rho), out.best_unitary, j), out.best_delta_m, 1e-10);
      EXPECT_LE(out.best_delta_m, bound_kyfan_lrd(rho, L, j) + 1e-8);
      EXPECT_LE(out.best_delta_m, bound_kyfan_global(rho, L, j) + 1e-8);
    }
  }
}

TEST(Search, LocalPhasesDoNotChangeTheOptimum) {
  Rng rng(24);
  const DensityMatrix rho = random_density(3, 2, rng);
  const DensityMatrix rotated = evolve(rho, ComplexMatrix::diagonal({1.0, std::polar(1.0, 1.3), std::polar(1.0, -0.4)}));
  UnitarySearchConfig cfg;
  cfg.restarts = 4;
  const double a = maximize_delta_m(rho, NumberOperator(3), 1, cfg).best_delta_m;
  const double b = maximize_delta_m(rotated, NumberOperator(3), 1, cfg).best_delta_m;
  EXPECT_NEAR(a, b, 1e-6);
}

TEST(Search, DeterministicForFixedSeed) {
  Rng rng(25);
  const DensityMatrix rho = random_density(3, 3, rng);
  UnitarySearchConfig cfg;
  cfg.restarts = 2;
  cfg.seed = 99;
  const auto a = maximize_delta_m(rho, NumberOperator(3), 2, cfg);
  const auto b = maximize_delta_m(rho, NumberOperator(3), 2, cfg);
  EXPECT_EQ(a.best_delta_m, b.best_delta_m);
  EXPECT_EQ(a.history, b.history);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
}

TEST(Search, BipartiteOverloadOnProductMatchesProductOverload) {
  const DensityMatrix rho = bloch_to_density({0.3, 0.2, 0.5});
  const auto a = maximize_delta_m(rho, NumberOperator(2), 1);
  const auto b = maximize_delta_m(tensor(rho, rho), BipartiteGenerator(2), 1);
  EXPECT_NEAR(a.best_delta_m, b.best_delta_m, 1e-9);
}

TEST(Search, IsotropicStateIsNoGo) {
  for (const double p : {0.1, 0.5, 1.0}) {
    const auto out = maximize_delta_m(isotropic_state(2, p), BipartiteGenerator(2), 1);
    EXPECT_LE(out.best_delta_m, 1e-9);
  }
}

TEST(Search, Errors) {
  const DensityMatrix q = DensityMatrix::maximally_mixed(3);
  EXPECT_THROW(maximize_delta_m(q, NumberOperator(3), 0), ValidationError);
  EXPECT_THROW(maximize_delta_m(q, NumberOperator(3), 3), ValidationError);
  EXPECT_THROW(maximize_delta_m(DensityMatrix::maximally_mixed(5), NumberOperator(5), 1), UnsupportedParameter);
  UnitarySearchConfig cfg;
  cfg.restarts = 0;
  EXPECT_THROW(cfg.validate(), ValidationError);
  EXPECT_THROW(maximize_delta_m(q, NumberOperator(3), 1, cfg), ValidationError);
  cfg = {};
  cfg.step_decay = 1.0;
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = {};
  cfg.tolerance = 0.0;
  EXPECT_THROW(cfg.validate(), ValidationError);
  EXPECT_NO_THROW(UnitarySearchConfig{}.validate());
}

TEST(RandomAllowedUnitary, ReproducibleAndCovariant) {
  const BipartiteGenerator gen(3);
  const auto a = assemble_allowed_unitary(random_allowed_unitary(gen, 5));
  const auto b = assemble_allowed_unitary(random_allowed_unitary(gen, 5));
  const auto c = assemble_allowed_unitary(random_allowed_unitary(gen, 6));
  EXPECT_EQ(a, b);
  EXPECT_GT(max_abs_diff(a, c), 1e-3);
  EXPECT_LT(unitarity_residual(a), 1e-12);
  EXPECT_LT(max_abs(commutator(a, gen.matrix())), 1e-12);
}

TEST(SearchOutcome, JsonFields) {
  const auto out = maximize_delta_m(bloch_to_density({0.2, 0.0, 0.4}), NumberOperator(2), 1);
  const auto j = to_json(out);
  for (const char* key : {"best_delta_m", "history", "converged", "best_restart", "best_unitary"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j.at("best_unitary").at("local_dim"), 2);
  EXPECT_EQ(j.at("best_unitary").at("blocks").size(), 3u);
}

}  // namespace
}  // namespace coherence
