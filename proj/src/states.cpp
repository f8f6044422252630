#include "coherence/states.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "coherence/error.hpp"

namespace coherence {

DensityMatrix::DensityMatrix(ComplexMatrix matrix, double tol) : matrix_(std::move(matrix)) {
  if (!matrix_.is_square() || matrix_.rows() == 0) {
    throw DimensionError("DensityMatrix: expected a non-empty square matrix, got " +
                         std::to_string(matrix_.rows()) + "x" + std::to_string(matrix_.cols()));
  }
  const double herm = max_abs_diff(matrix_, matrix_.adjoint());
  if (herm > tol) throw ValidationError("DensityMatrix: not Hermitian, residual " + std::to_string(herm));
  const Complex tr = matrix_.trace();
  const double trace_residual = std::abs(tr - 1.0);
  if (trace_residual > tol) {
    throw ValidationError("DensityMatrix: trace != 1, residual " + std::to_string(trace_residual));
  }
  const auto eig = hermitian_eigen(matrix_, tol);
  if (eig.values.front() < -tol) {
    throw ValidationError("DensityMatrix: not positive semidefinite, min eigenvalue " +
                          std::to_string(eig.values.front()));
  }
}

double DensityMatrix::purity() const { return (matrix_ * matrix_).trace().real(); }

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  return DensityMatrix((1.0 / static_cast<double>(dim)) * ComplexMatrix::identity(dim));
}

NumberOperator::NumberOperator(std::size_t dim) : dim_(dim) {
  if (dim < 2) throw ValidationError("NumberOperator: dimension must be at least 2");
}

ComplexMatrix NumberOperator::matrix() const {
  ComplexMatrix m(dim_, dim_);
  for (std::size_t n = 0; n < dim_; ++n) m(n, n) = static_cast<double>(n);
  return m;
}

ComplexMatrix NumberOperator::translation(double x) const {
  ComplexMatrix m(dim_, dim_);
  for (std::size_t n = 0; n < dim_; ++n) m(n, n) = std::polar(1.0, -static_cast<double>(n) * x);
  return m;
}

BipartiteGenerator::BipartiteGenerator(NumberOperator local)
    : local_(local), eigenspaces_(2 * local.dim() - 1), position_(local.dim() * local.dim()) {
  const std::size_t d = local_.dim();
  for (std::size_t c = 0; c < eigenspaces_.size(); ++c) {
    const std::size_t lo = c >= d - 1 ? c - (d - 1) : 0;
    const std::size_t hi = std::min(c, d - 1);
    for (std::size_t n = lo; n <= hi; ++n) {
      const ProductKet k{n, c - n};
      position_[flat_index(k)] = eigenspaces_[c].size();
      eigenspaces_[c].push_back(k);
    }
  }
}

std::size_t BipartiteGenerator::degeneracy(std::size_t c) const {
  const std::size_t d = local_.dim();
  if (c >= eigenvalue_count()) throw ValidationError("degeneracy: eigenvalue index out of range");
  return c < d - 1 ? c + 1 : 2 * d - 1 - c;
}

ComplexMatrix BipartiteGenerator::projector(std::size_t c) const {
  ComplexMatrix p(dim(), dim());
  for (const auto& k : eigenspace(c)) p(flat_index(k), flat_index(k)) = 1.0;
  return p;
}

ComplexMatrix BipartiteGenerator::matrix() const {
  ComplexMatrix m(dim(), dim());
  for (std::size_t i = 0; i < dim(); ++i) m(i, i) = static_cast<double>(eigenvalue_of(i));
  return m;
}

ComplexMatrix BipartiteGenerator::translation(double x) const {
  ComplexMatrix m(dim(), dim());
  for (std::size_t i = 0; i < dim(); ++i) m(i, i) = std::polar(1.0, -static_cast<double>(eigenvalue_of(i)) * x);
  return m;
}

double BlochState::norm() const { return std::sqrt(nx * nx + ny * ny + nz * nz); }

void validate(const BlochState& b, double tol) {
  if (!std::isfinite(b.nx) || !std::isfinite(b.ny) || !std::isfinite(b.nz)) {
    throw ValidationError("BlochState: non-finite component");
  }
  const double norm = b.norm();
  if (norm > 1.0 + tol) {
    throw ValidationError("BlochState: norm exceeds 1, residual " + std::to_string(norm - 1.0));
  }
}

DensityMatrix bloch_to_density(const BlochState& b) {
  validate(b);
  const Complex p00 = 0.5 * (1.0 + b.nz);
  const Complex p01(0.5 * b.nx, 0.5 * b.ny);
  return DensityMatrix(ComplexMatrix{{p00, p01}, {std::conj(p01), 1.0 - p00}});
}

BlochState density_to_bloch(const DensityMatrix& rho) {
  if (rho.dim() != 2) throw DimensionError("density_to_bloch: expected a qubit, got dim " + std::to_string(rho.dim()));
  const Complex p01 = rho(0, 1);
  return {2.0 * p01.real(), 2.0 * p01.imag(), rho(0, 0).real() - rho(1, 1).real()};
}

AllowedUnitary::AllowedUnitary(BipartiteGenerator generator, std::vector<ComplexMatrix> blocks, double tol)
    : generator_(std::move(generator)), blocks_(std::move(blocks)) {
  if (blocks_.size() != generator_.eigenvalue_count()) {
    throw DimensionError("AllowedUnitary: expected " + std::to_string(generator_.eigenvalue_count()) +
                         " blocks, got " + std::to_string(blocks_.size()));
  }
  for (std::size_t c = 0; c < blocks_.size(); ++c) {
    const std::size_t dc = generator_.degeneracy(c);
    if (blocks_[c].rows() != dc || blocks_[c].cols() != dc) {
      throw DimensionError("AllowedUnitary: block " + std::to_string(c) + " must be " + std::to_string(dc) +
                           "x" + std::to_string(dc));
    }
    const double residual = unitarity_residual(blocks_[c]);
    if (residual > tol) {
      throw ValidationError("AllowedUnitary: block " + std::to_string(c) + " not unitary, residual " +
                            std::to_string(residual));
    }
  }
}

AllowedUnitary AllowedUnitary::identity(const BipartiteGenerator& generator) {
  std::vector<ComplexMatrix> blocks;
  for (std::size_t c = 0; c < generator.eigenvalue_count(); ++c)
    blocks.push_back(ComplexMatrix::identity(generator.degeneracy(c)));
  return AllowedUnitary(generator, std::move(blocks));
}

ComplexMatrix assemble_allowed_unitary(const AllowedUnitary& u) {
  const auto& gen = u.generator();
  ComplexMatrix v(gen.dim(), gen.dim());
  for (std::size_t c = 0; c < gen.eigenvalue_count(); ++c) {
    const auto& basis = gen.eigenspace(c);
    const auto& block = u.block(c);
    for (std::size_t r = 0; r < basis.size(); ++r)
      for (std::size_t s = 0; s < basis.size(); ++s)
        v(gen.flat_index(basis[r]), gen.flat_index(basis[s])) = block(r, s);
  }
  return v;
}

bool is_incoherent(const DensityMatrix& rho, const NumberOperator& L, double tol) {
  if (rho.dim() != L.dim()) {
    throw DimensionError("is_incoherent: state dim " + std::to_string(rho.dim()) + " vs generator dim " +
                         std::to_string(L.dim()));
  }
  return max_abs(commutator(rho.matrix(), L.matrix())) <= tol;
}

bool is_incoherent(const DensityMatrix& rho_ab, const BipartiteGenerator& gen, double tol) {
  if (rho_ab.dim() != gen.dim()) {
    throw DimensionError("is_incoherent: state dim " + std::to_string(rho_ab.dim()) + " vs generator dim " +
                         std::to_string(gen.dim()));
  }
  return max_abs(commutator(rho_ab.matrix(), gen.matrix())) <= tol;
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(tensor(a.matrix(), b.matrix()));
}

DensityMatrix reduced_a(const DensityMatrix& rho_ab, std::size_t dim_a, std::size_t dim_b) {
  return DensityMatrix(partial_trace_b(rho_ab.matrix(), dim_a, dim_b));
}

DensityMatrix reduced_b(const DensityMatrix& rho_ab, std::size_t dim_a, std::size_t dim_b) {
  return DensityMatrix(partial_trace_a(rho_ab.matrix(), dim_a, dim_b));
}

DensityMatrix evolve(const DensityMatrix& rho, const ComplexMatrix& u) {
  return DensityMatrix(conjugate(u, rho.matrix()));
}

DensityMatrix isotropic_state(std::size_t local_dim, double p) {
  if (p < 0.0 || p > 1.0) throw ValidationError("isotropic_state: p must lie in [0, 1]");
  const std::size_t d = local_dim;
  const double dd = static_cast<double>(d);
  ComplexMatrix m = ((1.0 - p) / (dd * dd)) * ComplexMatrix::identity(d * d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) m(a * d + a, b * d + b) += p / dd;
  return DensityMatrix(std::move(m));
}

DensityMatrix local_output(const DensityMatrix& rho_ab, const AllowedUnitary& u) {
  const std::size_t d = u.generator().local_dim();
  return reduced_a(evolve(rho_ab, assemble_allowed_unitary(u)), d, d);
}

}  // namespace coherence
