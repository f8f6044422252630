#pragma once

// Dense complex linear algebra for the small operators (dimension <= 16) used
// throughout the library. Everything here is a pure function of its inputs.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace coherence {

using Complex = std::complex<double>;

/// Absolute tolerance used for structural comparisons unless an operation
/// states its own.
inline constexpr double kDefaultTolerance = 1e-9;

/// Row-major dense complex matrix.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  /// Zero-filled rows x cols matrix.
  ComplexMatrix(std::size_t rows, std::size_t cols);
  /// Takes ownership of row-major entries. Throws DimensionError on a size
  /// mismatch and ValidationError on non-finite entries.
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
  /// Nested-list constructor, mostly for tests and fixtures.
  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix diagonal(std::span<const Complex> values);
  static ComplexMatrix diagonal(std::initializer_list<Complex> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return entries_.empty(); }

  Complex& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  std::span<const Complex> entries() const noexcept { return entries_; }

  ComplexMatrix adjoint() const;
  Complex trace() const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(Complex scalar);

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> entries_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex scalar, ComplexMatrix m);

/// a * b - b * a.
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

/// u * m * u^dagger.
ComplexMatrix conjugate(const ComplexMatrix& u, const ComplexMatrix& m);

/// Largest entry modulus. Used as the residual in structural checks.
double max_abs(const ComplexMatrix& m);
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
double frobenius_norm(const ComplexMatrix& m);

/// Kronecker product: (a (x) b)[i*rb + k, j*cb + l] = a[i, j] * b[k, l].
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);

/// Trace over the second factor of a (dim_a*dim_b)-square operator.
ComplexMatrix partial_trace_b(const ComplexMatrix& m, std::size_t dim_a, std::size_t dim_b);
/// Trace over the first factor.
ComplexMatrix partial_trace_a(const ComplexMatrix& m, std::size_t dim_a, std::size_t dim_b);

/// Singular values sorted in descending order, length min(rows, cols).
class SingularSpectrum {
 public:
  SingularSpectrum() = default;
  /// Sorts descending and clamps entries in [-tol, 0) to zero. Throws
  /// ValidationError on an entry below -tol.
  explicit SingularSpectrum(std::vector<double> values, double tol = 1e-10);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Sum of the k largest values; k is clamped to size().
  double leading_sum(std::size_t k) const;

 private:
  std::vector<double> values_;
};

struct HermitianEigen {
  std::vector<double> values;  ///< ascending
  ComplexMatrix vectors;       ///< column i pairs with values[i]
};

/// Cyclic Jacobi diagonalisation of a Hermitian matrix. The input must be
/// Hermitian to `hermitian_tol`; throws ValidationError otherwise and
/// ConvergenceError when the sweep budget is exhausted.
HermitianEigen hermitian_eigen(const ComplexMatrix& h, double hermitian_tol = kDefaultTolerance);

/// Singular values of an arbitrary matrix. One-sided (Hestenes) Jacobi: the
/// plane rotations that would diagonalise m^dagger m are applied to the
/// columns of m directly, so small singular values keep full absolute
/// accuracy instead of coming out as sqrt(roundoff).
SingularSpectrum singular_values(const ComplexMatrix& m);

/// Sum of the k largest singular values, 1 <= k <= min(rows, cols).
double ky_fan_norm(const ComplexMatrix& m, std::size_t k);

/// Sum of all singular values.
double trace_norm(const ComplexMatrix& m);

/// exp(i * h) for Hermitian h, via its eigendecomposition.
ComplexMatrix exp_i_hermitian(const ComplexMatrix& h);

/// max |(u^dagger u - I)_{rc}|.
double unitarity_residual(const ComplexMatrix& u);

}  // namespace coherence
