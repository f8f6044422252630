#include "coherence/sampling.hpp"

#include <cmath>
#include <numbers>

#include "coherence/error.hpp"

namespace coherence {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  // splitmix64 finaliser over a combination of both inputs
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

ComplexMatrix complex_gaussian(std::size_t rows, std::size_t cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  ComplexMatrix g(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(r, c) = Complex(re, im);
    }
  return g;
}

ComplexMatrix haar_unitary(std::size_t n, Rng& rng) {
  ComplexMatrix q = complex_gaussian(n, n, rng);
  // modified Gram-Schmidt on columns, applied twice for stability
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < j; ++k) {
        Complex dot = 0.0;
        for (std::size_t r = 0; r < n; ++r) dot += std::conj(q(r, k)) * q(r, j);
        for (std::size_t r = 0; r < n; ++r) q(r, j) -= dot * q(r, k);
      }
      double norm = 0.0;
      for (std::size_t r = 0; r < n; ++r) norm += std::norm(q(r, j));
      norm = std::sqrt(norm);
      for (std::size_t r = 0; r < n; ++r) q(r, j) /= norm;
    }
  }
  return q;
}

DensityMatrix random_density(std::size_t dim, std::size_t rank, Rng& rng) {
  if (rank < 1 || rank > dim) {
    throw ValidationError("random_density: rank " + std::to_string(rank) + " outside [1, " +
                          std::to_string(dim) + "]");
  }
  const ComplexMatrix g = complex_gaussian(dim, rank, rng);
  ComplexMatrix rho = g * g.adjoint();
  const double tr = rho.trace().real();
  rho *= 1.0 / tr;
  // exact Hermitian symmetry, so downstream mode pairing holds bit-for-bit
  for (std::size_t r = 0; r < dim; ++r) {
    rho(r, r) = rho(r, r).real();
    for (std::size_t c = r + 1; c < dim; ++c) rho(c, r) = std::conj(rho(r, c));
  }
  return DensityMatrix(std::move(rho));
}

BlochState random_bloch(Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r = std::cbrt(unit(rng));
  const double cos_theta = 2.0 * unit(rng) - 1.0;
  const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
  const double phi = 2.0 * std::numbers::pi * unit(rng);
  return {r * sin_theta * std::cos(phi), r * sin_theta * std::sin(phi), r * cos_theta};
}

}  // namespace coherence
