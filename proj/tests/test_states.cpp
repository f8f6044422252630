#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "coherence/error.hpp"
#include "coherence/sampling.hpp"
#include "coherence/state_io.hpp"
#include "coherence/states.hpp"

namespace coherence {
namespace {

TEST(DensityMatrix, AcceptsValidStates) {
  const DensityMatrix rho(ComplexMatrix{{0.7, Complex(0.1, 0.2)}, {Complex(0.1, -0.2), 0.3}});
  EXPECT_EQ(rho.dim(), 2u);
  EXPECT_NEAR(rho.purity(), 0.49 + 0.09 + 2 * 0.05, 1e-15);
  EXPECT_NEAR(DensityMatrix::maximally_mixed(4).purity(), 0.25, 1e-15);
}

TEST(DensityMatrix, ReportsEachViolatedInvariant) {
  EXPECT_THROW(DensityMatrix(ComplexMatrix(2, 3)), DimensionError);
  EXPECT_THROW(DensityMatrix{ComplexMatrix{}}, DimensionError);
  try {
    DensityMatrix(ComplexMatrix{{0.5, 0.1}, {0.0, 0.5}});
    FAIL() << "non-Hermitian input accepted";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("Hermitian"), std::string::npos);
  }
  try {
    DensityMatrix(ComplexMatrix::diagonal({0.5, 0.6}));
    FAIL() << "trace 1.1 accepted";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("trace"), std::string::npos);
  }
  try {
    DensityMatrix(ComplexMatrix::diagonal({1.2, -0.2}));
    FAIL() << "negative eigenvalue accepted";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("positive"), std::string::npos);
  }
}

TEST(NumberOperator, SpectrumAndTranslation) {
  EXPECT_THROW(NumberOperator(1), ValidationError);
  const NumberOperator L(3);
  EXPECT_EQ(L.matrix(), ComplexMatrix::diagonal({0.0, 1.0, 2.0}));
  const ComplexMatrix t = L.translation(0.7);
  EXPECT_LT(unitarity_residual(t), 1e-15);
  EXPECT_NEAR(std::arg(t(2, 2)), -1.4, 1e-15);
}

TEST(BipartiteGenerator, DegeneracyMatchesCounting) {
  for (std::size_t d = 2; d <= 6; ++d) {
    const BipartiteGenerator gen(d);
    EXPECT_EQ(gen.eigenvalue_count(), 2 * d - 1);
    std::size_t total = 0;
    for (std::size_t c = 0; c < gen.eigenvalue_count(); ++c) {
      std::size_t count = 0;
      for (std::size_t n = 0; n < d; ++n)
        for (std::size_t m = 0; m < d; ++m) count += (n + m == c);
      EXPECT_EQ(gen.degeneracy(c), count) << "d=" << d << " c=" << c;
      EXPECT_EQ(gen.eigenspace(c).size(), count);
      for (std::size_t i = 1; i < gen.eigenspace(c).size(); ++i)
        EXPECT_LT(gen.eigenspace(c)[i - 1].n, gen.eigenspace(c)[i].n);
      total += count;
    }
    EXPECT_EQ(total, d * d);
    EXPECT_THROW(gen.degeneracy(2 * d - 1), ValidationError);
  }
}

TEST(BipartiteGenerator, MatrixIsLocalSum) {
  const NumberOperator L(3);
  const BipartiteGenerator gen(L);
  const ComplexMatrix id = ComplexMatrix::identity(3);
  EXPECT_EQ(gen.matrix(), tensor(L.matrix(), id) + tensor(id, L.matrix()));
  ComplexMatrix sum(9, 9);
  for (std::size_t c = 0; c < gen.eigenvalue_count(); ++c) sum += gen.projector(c);
  EXPECT_EQ(sum, ComplexMatrix::identity(9));
  for (std::size_t flat = 0; flat < 9; ++flat) {
    const std::size_t c = gen.eigenvalue_of(flat);
    EXPECT_EQ(gen.flat_index(gen.eigenspace(c)[gen.position_in_eigenspace(flat)]), flat);
  }
  EXPECT_LT(max_abs_diff(gen.translation(0.4), tensor(L.translation(0.4), L.translation(0.4))), 1e-15);
}

TEST(Bloch, RoundTripAndValidation) {
  const BlochState b{0.3, -0.4, 0.5};
  const DensityMatrix rho = bloch_to_density(b);
  EXPECT_NEAR(rho(0, 0).real(), 0.75, 1e-15);
  EXPECT_NEAR(rho(0, 1).real(), 0.15, 1e-15);
  EXPECT_NEAR(rho(0, 1).imag(), -0.2, 1e-15);
  const BlochState back = density_to_bloch(rho);
  EXPECT_NEAR(back.nx, b.nx, 1e-15);
  EXPECT_NEAR(back.ny, b.ny, 1e-15);
  EXPECT_NEAR(back.nz, b.nz, 1e-15);
  EXPECT_NEAR(2.0 * rho.purity() - 1.0, b.norm() * b.norm(), 1e-15);
  EXPECT_THROW(validate(BlochState{0.8, 0.0, 0.8}), ValidationError);
  EXPECT_THROW(bloch_to_density(BlochState{std::nan(""), 0.0, 0.0}), ValidationError);
  EXPECT_THROW(density_to_bloch(DensityMatrix::maximally_mixed(3)), DimensionError);
}

TEST(AllowedUnitary, ValidatesShapesAndUnitarity) {
  const BipartiteGenerator gen(2);
  EXPECT_THROW(AllowedUnitary(gen, {ComplexMatrix::identity(1)}), DimensionError);
  EXPECT_THROW(AllowedUnitary(gen, {ComplexMatrix::identity(1), ComplexMatrix::identity(3), ComplexMatrix::identity(1)}),
               DimensionError);
  EXPECT_THROW(AllowedUnitary(gen, {ComplexMatrix::identity(1), ComplexMatrix::diagonal({1.0, 2.0}),
                                    ComplexMatrix::identity(1)}),
               ValidationError);
  EXPECT_EQ(assemble_allowed_unitary(AllowedUnitary::identity(gen)), ComplexMatrix::identity(4));
}

TEST(AllowedUnitary, AssembledUnitaryCommutesWithGenerator) {
  for (std::size_t d = 2; d <= 4; ++d) {
    const BipartiteGenerator gen(d);
    Rng rng(d);
    std::vector<ComplexMatrix> blocks;
    for (std::size_t c = 0; c < gen.eigenvalue_count(); ++c) blocks.push_back(haar_unitary(gen.degeneracy(c), rng));
    const ComplexMatrix v = assemble_allowed_unitary(AllowedUnitary(gen, blocks));
    EXPECT_LT(unitarity_residual(v), 1e-13);
    EXPECT_LT(max_abs(commutator(v, gen.matrix())), 1e-13);
  }
}

TEST(Incoherence, DiagonalStatesOnly) {
  const NumberOperator L(3);
  EXPECT_TRUE(is_incoherent(DensityMatrix(ComplexMatrix::diagonal({0.2, 0.3, 0.5})), L));
  Rng rng(11);
  EXPECT_FALSE(is_incoherent(random_density(3, 2, rng), L));
  EXPECT_THROW(is_incoherent(DensityMatrix::maximally_mixed(2), L), DimensionError);
  const BipartiteGenerator gen(L);
  // |01> and |10> share the eigenvalue 1, so coherence between them is free.
  ComplexMatrix m = ComplexMatrix::diagonal({0.0, 0.5, 0.0, 0.5, 0, 0, 0, 0, 0});
  m(1, 3) = m(3, 1) = 0.5;
  EXPECT_TRUE(is_incoherent(DensityMatrix(m), gen));
}

TEST(Composite, TensorAndReductions) {
  Rng rng(12);
  const DensityMatrix a = random_density(2, 2, rng);
  const DensityMatrix b = random_density(3, 1, rng);
  const DensityMatrix ab = tensor(a, b);
  EXPECT_LT(max_abs_diff(reduced_a(ab, 2, 3).matrix(), a.matrix()), 1e-15);
  EXPECT_LT(max_abs_diff(reduced_b(ab, 2, 3).matrix(), b.matrix()), 1e-15);
  const ComplexMatrix u = haar_unitary(6, rng);
  const DensityMatrix evolved = evolve(ab, u);
  EXPECT_NEAR(evolved.purity(), ab.purity(), 1e-13);
}

TEST(Isotropic, StructureAndRange) {
  for (std::size_t d = 2; d <= 4; ++d) {
    const DensityMatrix iso = isotropic_state(d, 0.4);
    EXPECT_NEAR(iso.matrix().trace().real(), 1.0, 1e-15);
    const double dd = static_cast<double>(d);
    EXPECT_NEAR(iso(0, 0).real(), 0.4 / dd + 0.6 / (dd * dd), 1e-15);
    EXPECT_NEAR(iso(0, d + 1).real(), 0.4 / dd, 1e-15);
    EXPECT_LT(max_abs_diff(reduced_a(iso, d, d).matrix(), (1.0 / dd) * ComplexMatrix::identity(d)), 1e-15);
  }
  EXPECT_NEAR(isotropic_state(2, 1.0).purity(), 1.0, 1e-15);
  EXPECT_THROW(isotropic_state(2, 1.5), ValidationError);
  EXPECT_THROW(isotropic_state(2, -0.1), ValidationError);
}

TEST(LocalOutput, IdentityGivesMarginal) {
  Rng rng(13);
  const DensityMatrix rho = random_density(3, 3, rng);
  const BipartiteGenerator gen(3);
  EXPECT_LT(max_abs_diff(local_output(tensor(rho, rho), AllowedUnitary::identity(gen)).matrix(), rho.matrix()), 1e-15);
}

TEST(Sampling, DeriveSeedIsDeterministicAndSpreads) {
  EXPECT_EQ(derive_seed(7, 3), derive_seed(7, 3));
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 1000; ++s) seen.insert(derive_seed(42, s));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_NE(derive_seed(1, 0), derive_seed(0, 1));
}

TEST(Sampling, RandomDensityHasRequestedRank) {
  Rng rng(14);
  for (std::size_t d = 2; d <= 4; ++d)
    for (std::size_t r = 1; r <= d; ++r) {
      const DensityMatrix rho = random_density(d, r, rng);
      const auto eig = hermitian_eigen(rho.matrix());
      std::size_t nonzero = 0;
      for (double v : eig.values) nonzero += v > 1e-10;
      EXPECT_EQ(nonzero, r);
      EXPECT_EQ(rho.matrix(), rho.matrix().adjoint());
    }
  EXPECT_THROW(random_density(3, 0, rng), ValidationError);
  EXPECT_THROW(random_density(3, 4, rng), ValidationError);
}

TEST(Sampling, HaarUnitaryAndBallPoints) {
  Rng rng(15);
  for (std::size_t n = 1; n <= 6; ++n) EXPECT_LT(unitarity_residual(haar_unitary(n, rng)), 1e-14);
  double mean_r3 = 0.0;
  for (int i = 0; i < 4000; ++i) {
    const BlochState b = random_bloch(rng);
    EXPECT_LE(b.norm(), 1.0);
    mean_r3 += std::pow(b.norm(), 3);
  }
  // r^3 is uniform on [0, 1] for a uniform point of the ball
  EXPECT_NEAR(mean_r3 / 4000, 0.5, 0.03);
  Rng a(99), b(99);
  EXPECT_EQ(haar_unitary(3, a), haar_unitary(3, b));
}

TEST(StateIo, DensityRoundTrip) {
  Rng rng(16);
  const DensityMatrix rho = random_density(3, 2, rng);
  const auto j = density_to_json(rho);
  EXPECT_EQ(j.at("dim"), 3);
  EXPECT_EQ(density_from_json(j).matrix(), rho.matrix());
  const auto src = state_source_from_json(density_to_json(isotropic_state(2, 0.5), 2));
  ASSERT_TRUE(src.bipartite());
  EXPECT_EQ(*src.local_dim, 2u);
}

TEST(StateIo, RealMatricesMayOmitImaginaryPart) {
  const auto rho = density_from_json(nlohmann::json::parse(R"({"dim": 2, "re": [[0.9, 0.1], [0.1, 0.1]]})"));
  EXPECT_DOUBLE_EQ(rho(0, 1).real(), 0.1);
}

TEST(StateIo, RejectsMalformedInput) {
  using nlohmann::json;
  EXPECT_THROW(density_from_json(json::parse(R"({"dim": 2})")), ValidationError);
  EXPECT_THROW(density_from_json(json::parse(R"({"dim": 3, "re": [[1, 0], [0, 0]]})")), ValidationError);
  EXPECT_THROW(density_from_json(json::parse(R"({"re": [[1, 0], [0]]})")), ValidationError);
  EXPECT_THROW(density_from_json(json::parse(R"({"re": [[1, "x"], [0, 0]]})")), ValidationError);
  EXPECT_THROW(density_from_json(json::parse(R"({"re": [[0.5, 0], [0, 0.6]]})")), ValidationError);
  EXPECT_THROW(state_source_from_json(json::parse(R"({"re": [[1, 0], [0, 0]], "local_dim": 2})")), ValidationError);
  EXPECT_THROW(bloch_from_json(json::parse(R"({"nx": 0.9, "nz": 0.9})")), ValidationError);
  EXPECT_THROW(bloch_from_json(json::parse(R"({"nx": 0.1})")), ValidationError);
}

TEST(StateIo, BlochInputAndFiles) {
  const auto src = state_source_from_json(nlohmann::json::parse(R"({"nx": 0.2, "nz": 0.8})"));
  EXPECT_FALSE(src.bipartite());
  EXPECT_DOUBLE_EQ(src.state(0, 0).real(), 0.9);
  EXPECT_DOUBLE_EQ(src.state(0, 1).real(), 0.1);

  const auto dir = std::filesystem::temp_directory_path() / "coherence_state_io_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "bad.json") << "{not json";
    std::ofstream(dir / "good.json") << R"({"nx": 0.0, "ny": 0.5, "nz": 0.0})";
  }
  EXPECT_THROW(load_state_file((dir / "bad.json").string()), ValidationError);
  EXPECT_THROW(load_state_file((dir / "missing.json").string()), ValidationError);
  EXPECT_DOUBLE_EQ(load_state_file((dir / "good.json").string()).state(0, 1).imag(), 0.25);
  std::filesystem::remove_all(dir);
}

TEST(StateIo, MatrixJsonRoundTrip) {
  Rng rng(17);
  const ComplexMatrix m = complex_gaussian(2, 3, rng);
  EXPECT_EQ(matrix_from_json(matrix_to_json(m)), m);
}

}  // namespace
}  // namespace coherence
