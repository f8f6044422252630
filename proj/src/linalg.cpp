#include "coherence/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <functional>
#include <numeric>
#include <string>

#include "coherence/error.hpp"

namespace coherence {

namespace {

constexpr int kMaxJacobiSweeps = 60;

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shape " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
  }
}

// Plane rotation G acting on coordinates (p, q) that zeroes the off-diagonal
// of the Hermitian 2x2 [[a, g], [conj(g), b]] under G^dagger (.) G.
struct PlaneRotation {
  Complex pp, pq, qp, qq;
};

PlaneRotation jacobi_rotation(double a, double b, Complex g) {
  const double r = std::abs(g);
  const Complex phase_conj = std::conj(g / r);
  const double theta = 0.5 * std::atan2(2.0 * r, b - a);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c, s, -s * phase_conj, c * phase_conj};
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, Complex{0.0, 0.0}) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_) {
    throw DimensionError("ComplexMatrix: " + std::to_string(entries_.size()) +
                         " entries for a " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                         " matrix");
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!std::isfinite(entries_[i].real()) || !std::isfinite(entries_[i].imag())) {
      throw ValidationError("ComplexMatrix: non-finite entry at (" + std::to_string(i / cols_) +
                            ", " + std::to_string(i % cols_) + ")");
    }
  }
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  entries_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw DimensionError("ComplexMatrix: ragged initializer list");
    entries_.insert(entries_.end(), row.begin(), row.end());
  }
  *this = ComplexMatrix(rows_, cols_, std::move(entries_));
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const Complex> values) {
  ComplexMatrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::initializer_list<Complex> values) {
  return diagonal(std::span<const Complex>(values.begin(), values.size()));
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

Complex ComplexMatrix::trace() const {
  if (!is_square()) throw DimensionError("trace of a non-square matrix");
  Complex t = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  require_same_shape(*this, other, "operator+");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  require_same_shape(*this, other, "operator-");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= other.entries_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scalar) {
  for (auto& e : entries_) e *= scalar;
  return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(Complex scalar, ComplexMatrix m) { return m *= scalar; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("operator*: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  ComplexMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b - b * a; }

ComplexMatrix conjugate(const ComplexMatrix& u, const ComplexMatrix& m) { return u * m * u.adjoint(); }

double max_abs(const ComplexMatrix& m) {
  double best = 0.0;
  for (const auto& e : m.entries()) best = std::max(best, std::abs(e));
  return best;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double best = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i)
    best = std::max(best, std::abs(a.entries()[i] - b.entries()[i]));
  return best;
}

double frobenius_norm(const ComplexMatrix& m) {
  double sum = 0.0;
  for (const auto& e : m.entries()) sum += std::norm(e);
  return std::sqrt(sum);
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t rb = b.rows();
  const std::size_t cb = b.cols();
  ComplexMatrix out(a.rows() * rb, a.cols() * cb);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Complex aij = a(i, j);
      for (std::size_t k = 0; k < rb; ++k)
        for (std::size_t l = 0; l < cb; ++l) out(i * rb + k, j * cb + l) = aij * b(k, l);
    }
  return out;
}

ComplexMatrix partial_trace_b(const ComplexMatrix& m, std::size_t dim_a, std::size_t dim_b) {
  const std::size_t n = dim_a * dim_b;
  if (m.rows() != n || m.cols() != n) {
    throw DimensionError("partial_trace_b: expected " + std::to_string(n) + "x" +
                         std::to_string(n) + ", got " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
  ComplexMatrix out(dim_a, dim_a);
  for (std::size_t i = 0; i < dim_a; ++i)
    for (std::size_t j = 0; j < dim_a; ++j) {
      Complex sum = 0.0;
      for (std::size_t k = 0; k < dim_b; ++k) sum += m(i * dim_b + k, j * dim_b + k);
      out(i, j) = sum;
    }
  return out;
}

ComplexMatrix partial_trace_a(const ComplexMatrix& m, std::size_t dim_a, std::size_t dim_b) {
  const std::size_t n = dim_a * dim_b;
  if (m.rows() != n || m.cols() != n) {
    throw DimensionError("partial_trace_a: expected " + std::to_string(n) + "x" +
                         std::to_string(n) + ", got " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
  ComplexMatrix out(dim_b, dim_b);
  for (std::size_t k = 0; k < dim_b; ++k)
    for (std::size_t l = 0; l < dim_b; ++l) {
      Complex sum = 0.0;
      for (std::size_t i = 0; i < dim_a; ++i) sum += m(i * dim_b + k, i * dim_b + l);
      out(k, l) = sum;
    }
  return out;
}

SingularSpectrum::SingularSpectrum(std::vector<double> values, double tol) : values_(std::move(values)) {
  for (auto& v : values_) {
    if (v < -tol) throw ValidationError("SingularSpectrum: negative value " + std::to_string(v));
    if (v < 0.0) v = 0.0;
  }
  std::sort(values_.begin(), values_.end(), std::greater<>());
}

double SingularSpectrum::leading_sum(std::size_t k) const {
  k = std::min(k, values_.size());
  return std::accumulate(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(k), 0.0);
}

HermitianEigen hermitian_eigen(const ComplexMatrix& h, double hermitian_tol) {
  if (!h.is_square()) throw DimensionError("hermitian_eigen: matrix is not square");
  const double residual = max_abs_diff(h, h.adjoint());
  if (residual > hermitian_tol) {
    throw ValidationError("hermitian_eigen: not Hermitian, residual " + std::to_string(residual));
  }
  const std::size_t n = h.rows();
  ComplexMatrix a = h;
  ComplexMatrix v = ComplexMatrix::identity(n);
  for (std::size_t i = 0; i < n; ++i) a(i, i) = a(i, i).real();

  const double scale = std::max(frobenius_norm(a), 1e-300);
  int sweep = 0;
  for (;; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (std::sqrt(off) <= static_cast<double>(n) * std::numeric_limits<double>::epsilon() * scale) break;
    if (sweep == kMaxJacobiSweeps) throw ConvergenceError("hermitian_eigen did not converge", sweep);

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const auto g = jacobi_rotation(a(p, p).real(), a(q, q).real(), apq);
        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = akp * g.pp + akq * g.qp;
          a(k, q) = akp * g.pq + akq * g.qq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k);
          const Complex aqk = a(q, k);
          a(p, k) = std::conj(g.pp) * apk + std::conj(g.qp) * aqk;
          a(q, k) = std::conj(g.pq) * apk + std::conj(g.qq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {
          const Complex vkp = v(k, p);
          const Complex vkq = v(k, q);
          v(k, p) = vkp * g.pp + vkq * g.qp;
          v(k, q) = vkp * g.pq + vkq * g.qq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
  HermitianEigen out{std::vector<double>(n), ComplexMatrix(n, n)};
  for (std::size_t i = 0; i < n; ++i) {
    out.values[i] = a(order[i], order[i]).real();
    for (std::size_t k = 0; k < n; ++k) out.vectors(k, i) = v(k, order[i]);
  }
  return out;
}

SingularSpectrum singular_values(const ComplexMatrix& m) {
  // Work on the orientation with at least as many rows as columns so the
  // column count equals min(rows, cols).
  ComplexMatrix w = m.rows() >= m.cols() ? m : m.adjoint();
  const std::size_t rows = w.rows();
  const std::size_t n = w.cols();

  auto column_dot = [&](std::size_t p, std::size_t q) {
    Complex s = 0.0;
    for (std::size_t k = 0; k < rows; ++k) s += std::conj(w(k, p)) * w(k, q);
    return s;
  };

  // Columns count as orthogonal once their overlap is at the roundoff level
  // of a length-`rows` dot product.
  const double orth_tol = static_cast<double>(rows) * std::numeric_limits<double>::epsilon();
  // A column whose norm is at roundoff level relative to the whole matrix
  // carries no resolvable direction; rotating it against a large column only
  // shrinks it geometrically without ever meeting the relative test.
  const double negligible = std::pow(std::numeric_limits<double>::epsilon() * frobenius_norm(w), 2);
  int sweep = 0;
  for (;; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double alpha = column_dot(p, p).real();
        const double beta = column_dot(q, q).real();
        const Complex gamma = column_dot(p, q);
        if (std::abs(gamma) <= orth_tol * std::sqrt(alpha * beta) || std::abs(gamma) <= 1e-300) continue;
        if (std::min(alpha, beta) <= negligible) continue;
        rotated = true;
        const auto g = jacobi_rotation(alpha, beta, gamma);
        for (std::size_t k = 0; k < rows; ++k) {
          const Complex wkp = w(k, p);
          const Complex wkq = w(k, q);
          w(k, p) = wkp * g.pp + wkq * g.qp;
          w(k, q) = wkp * g.pq + wkq * g.qq;
        }
      }
    }
    if (!rotated) break;
    if (sweep == kMaxJacobiSweeps) throw ConvergenceError("singular_values did not converge", sweep);
  }

  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = std::sqrt(column_dot(i, i).real());
  return SingularSpectrum(std::move(values));
}

double ky_fan_norm(const ComplexMatrix& m, std::size_t k) {
  const std::size_t limit = std::min(m.rows(), m.cols());
  if (k < 1 || k > limit) {
    throw ValidationError("ky_fan_norm: k = " + std::to_string(k) + " outside [1, " +
                          std::to_string(limit) + "]");
  }
  return singular_values(m).leading_sum(k);
}

double trace_norm(const ComplexMatrix& m) {
  if (m.empty()) return 0.0;
  return singular_values(m).leading_sum(std::min(m.rows(), m.cols()));
}

ComplexMatrix exp_i_hermitian(const ComplexMatrix& h) {
  const auto eig = hermitian_eigen(h);
  const std::size_t n = h.rows();
  ComplexMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const Complex phase = std::polar(1.0, eig.values[i]);
    for (std::size_t r = 0; r < n; ++r) {
      const Complex vr = eig.vectors(r, i) * phase;
      for (std::size_t c = 0; c < n; ++c) out(r, c) += vr * std::conj(eig.vectors(c, i));
    }
  }
  return out;
}

double unitarity_residual(const ComplexMatrix& u) {
  if (!u.is_square()) throw DimensionError("unitarity_residual: matrix is not square");
  return max_abs_diff(u.adjoint() * u, ComplexMatrix::identity(u.rows()));
}

}  // namespace coherence
