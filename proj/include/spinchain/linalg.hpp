#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "spinchain/errors.hpp"

namespace spinchain {

/// Dense row-major real matrix.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  const std::vector<double>& data() const noexcept { return data_; }

  double max_abs() const noexcept {
    double m = 0.0;
    for (double x : data_) m = std::max(m, std::abs(x));
    return m;
  }

  bool all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
  }

  /// Exact symmetry test (no tolerance).
  bool is_symmetric() const noexcept {
    if (!square()) return false;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = i + 1; j < cols_; ++j)
        if ((*this)(i, j) != (*this)(j, i)) return false;
    return true;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

/// Largest entrywise absolute difference; shapes must agree.
inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k)
    m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  return m;
}

/// Eigenpairs of a real symmetric matrix. Column j of `vectors` pairs with
/// `values[j]`; values ascend.
struct SymmetricEigen {
  std::vector<double> values;
  Matrix vectors;
  int sweeps = 0;
};

struct JacobiOptions {
  /// Convergence when the off-diagonal Frobenius norm drops below
  /// `tolerance * ||A||_F`.
  double tolerance = 1e-12;
  int max_sweeps = 100;
};

namespace detail {

inline double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) s += a(i, j) * a(i, j);
  return std::sqrt(2.0 * s);
}

inline double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double x : a.data()) s += x * x;
  return std::sqrt(s);
}

// Flip each column so that its largest-magnitude component is positive.
// Components within a relative 1e-12 of the maximum count as ties, and the
// lowest index among them decides.
inline void canonicalize_signs(Matrix& v) {
  const std::size_t n = v.rows();
  for (std::size_t j = 0; j < v.cols(); ++j) {
    double biggest = 0.0;
    for (std::size_t i = 0; i < n; ++i) biggest = std::max(biggest, std::abs(v(i, j)));
    if (biggest == 0.0) continue;
    std::size_t pick = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(v(i, j)) >= biggest * (1.0 - 1e-12)) {
        pick = i;
        break;
      }
    if (v(pick, j) < 0.0)
      for (std::size_t i = 0; i < n; ++i) v(i, j) = -v(i, j);
  }
}

}  // namespace detail

/// Cyclic Jacobi diagonalization of a dense real symmetric matrix.
///
/// Each sweep annihilates every off-diagonal pair (p, q) once with a plane
/// rotation. Throws NumericalError if the off-diagonal norm has not reached
/// the tolerance after `max_sweeps` sweeps; the message carries the residual.
inline SymmetricEigen jacobi_eigen(Matrix a, const JacobiOptions& opts = {}) {
  if (!a.square()) throw std::invalid_argument("jacobi_eigen: matrix must be square");
  if (!a.all_finite()) throw std::invalid_argument("jacobi_eigen: non-finite entries");
  if (!a.is_symmetric()) throw std::invalid_argument("jacobi_eigen: matrix is not symmetric");

  const std::size_t n = a.rows();
  Matrix v = Matrix::identity(n);
  const double scale = detail::frobenius_norm(a);
  const double target = opts.tolerance * scale;

  int sweep = 0;
  double off = detail::off_diagonal_norm(a);
  while (off > target && off > 0.0) {
    if (sweep == opts.max_sweeps) {
      std::ostringstream msg;
      msg << "jacobi_eigen: no convergence after " << opts.max_sweeps
          << " sweeps (off-diagonal residual " << off << ", target " << target << ")";
      throw NumericalError(msg.str());
    }
    ++sweep;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r != p && r != q) {
            const double arp = a(r, p);
            const double arq = a(r, q);
            const double np = arp - s * (arq + tau * arp);
            const double nq = arq + s * (arp - tau * arq);
            a(r, p) = np;
            a(p, r) = np;
            a(r, q) = nq;
            a(q, r) = nq;
          }
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = vrp - s * (vrq + tau * vrp);
          v(r, q) = vrq + s * (vrp - tau * vrq);
        }
      }
    }
    off = detail::off_diagonal_norm(a);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });

  SymmetricEigen out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  out.sweeps = sweep;
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  detail::canonicalize_signs(out.vectors);
  return out;
}

}  // namespace spinchain
