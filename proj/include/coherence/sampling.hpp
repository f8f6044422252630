#pragma once

#include <cstdint>
#include <random>

#include "coherence/states.hpp"

namespace coherence {

using Rng = std::mt19937_64;

/// Deterministic 64-bit mixing used to derive independent per-sample seeds
/// from (base seed, stream index).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// Matrix of i.i.d. standard complex Gaussians (E|z|^2 = 1).
ComplexMatrix complex_gaussian(std::size_t rows, std::size_t cols, Rng& rng);

/// Haar-random n x n unitary: Gram-Schmidt orthonormalisation of a complex
/// Gaussian matrix (the implied R factor has a positive diagonal).
ComplexMatrix haar_unitary(std::size_t n, Rng& rng);

/// Random density matrix of rank `rank`: the reduced state of a Haar-random
/// pure state on C^dim (x) C^rank, i.e. G G^dagger / tr(G G^dagger) with G a
/// dim x rank Gaussian matrix.
DensityMatrix random_density(std::size_t dim, std::size_t rank, Rng& rng);

/// Uniform point of the closed Bloch ball.
BlochState random_bloch(Rng& rng);

}  // namespace coherence
