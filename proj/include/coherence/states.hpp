#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "coherence/linalg.hpp"

namespace coherence {

/// Hermitian, positive semidefinite, unit-trace operator. Construction
/// validates all three invariants and reports the violated one together with
/// its residual.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix matrix, double tol = kDefaultTolerance);

  std::size_t dim() const noexcept { return matrix_.rows(); }
  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  Complex operator()(std::size_t r, std::size_t c) const { return matrix_(r, c); }

  double purity() const;

  static DensityMatrix maximally_mixed(std::size_t dim);

 private:
  ComplexMatrix matrix_;
};

/// Truncated number operator L = sum_n n |n><n| on a d-level system.
class NumberOperator {
 public:
  explicit NumberOperator(std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }
  int eigenvalue(std::size_t n) const { return static_cast<int>(n); }
  ComplexMatrix matrix() const;
  /// e^{-i L x}.
  ComplexMatrix translation(double x) const;

  friend bool operator==(const NumberOperator&, const NumberOperator&) = default;

 private:
  std::size_t dim_;
};

/// Product ket |n, m> of the bipartite basis; flat index n*d + m.
struct ProductKet {
  std::size_t n;
  std::size_t m;
  friend bool operator==(const ProductKet&, const ProductKet&) = default;
};

/// L_AB = L (x) I + I (x) L for two copies of the same number operator,
/// organised by eigenspace. Eigenvalue c ranges over 0..2d-2 and its basis
/// is |n, c-n> ordered by increasing n.
class BipartiteGenerator {
 public:
  explicit BipartiteGenerator(NumberOperator local);
  explicit BipartiteGenerator(std::size_t local_dim) : BipartiteGenerator(NumberOperator(local_dim)) {}

  const NumberOperator& local() const noexcept { return local_; }
  std::size_t local_dim() const noexcept { return local_.dim(); }
  std::size_t dim() const noexcept { return local_.dim() * local_.dim(); }
  std::size_t eigenvalue_count() const noexcept { return 2 * local_.dim() - 1; }

  /// d(c): c+1 below d-1, 2d-1-c from d-1 upward.
  std::size_t degeneracy(std::size_t c) const;
  /// Basis kets of eigenspace c in canonical order.
  const std::vector<ProductKet>& eigenspace(std::size_t c) const { return eigenspaces_.at(c); }
  std::size_t flat_index(ProductKet k) const noexcept { return k.n * local_.dim() + k.m; }
  /// Eigenvalue of a flat basis index.
  std::size_t eigenvalue_of(std::size_t flat) const noexcept { return flat / local_.dim() + flat % local_.dim(); }
  /// Position of a flat basis index inside its eigenspace.
  std::size_t position_in_eigenspace(std::size_t flat) const noexcept { return position_[flat]; }

  ComplexMatrix projector(std::size_t c) const;
  ComplexMatrix matrix() const;
  ComplexMatrix translation(double x) const;

 private:
  NumberOperator local_;
  std::vector<std::vector<ProductKet>> eigenspaces_;
  std::vector<std::size_t> position_;
};

/// Qubit Bloch vector. p00 = (1 + nz) / 2, p01 = (nx + i ny) / 2.
struct BlochState {
  double nx = 0.0;
  double ny = 0.0;
  double nz = 0.0;

  double norm() const;
};

/// Throws ValidationError when the norm exceeds 1 + tol.
void validate(const BlochState& b, double tol = kDefaultTolerance);

DensityMatrix bloch_to_density(const BlochState& b);
/// Requires dim 2.
BlochState density_to_bloch(const DensityMatrix& rho);

/// Unitary commuting with L_AB, stored as one block per eigenspace.
class AllowedUnitary {
 public:
  /// Validates block shapes against d(c) and block unitarity to `tol`.
  AllowedUnitary(BipartiteGenerator generator, std::vector<ComplexMatrix> blocks,
                 double tol = kDefaultTolerance);

  static AllowedUnitary identity(const BipartiteGenerator& generator);

  const BipartiteGenerator& generator() const noexcept { return generator_; }
  const std::vector<ComplexMatrix>& blocks() const noexcept { return blocks_; }
  const ComplexMatrix& block(std::size_t c) const { return blocks_.at(c); }

 private:
  BipartiteGenerator generator_;
  std::vector<ComplexMatrix> blocks_;
};

/// V = sum_c V_c Pi_c as a dense d^2 x d^2 matrix.
ComplexMatrix assemble_allowed_unitary(const AllowedUnitary& u);

/// max |[rho, L]_{rc}| <= tol.
bool is_incoherent(const DensityMatrix& rho, const NumberOperator& L, double tol = kDefaultTolerance);
/// Same test against L_AB for a bipartite state.
bool is_incoherent(const DensityMatrix& rho_ab, const BipartiteGenerator& gen, double tol = kDefaultTolerance);

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);
DensityMatrix reduced_a(const DensityMatrix& rho_ab, std::size_t dim_a, std::size_t dim_b);
DensityMatrix reduced_b(const DensityMatrix& rho_ab, std::size_t dim_a, std::size_t dim_b);

/// u rho u^dagger; u must be unitary.
DensityMatrix evolve(const DensityMatrix& rho, const ComplexMatrix& u);

/// p |Phi+><Phi+| + (1 - p) I / d^2 with |Phi+> = sum_n |nn> / sqrt(d).
DensityMatrix isotropic_state(std::size_t local_dim, double p);

/// tr_B[V rho_AB V^dagger] for an allowed unitary V.
DensityMatrix local_output(const DensityMatrix& rho_ab, const AllowedUnitary& u);

}  // namespace coherence
