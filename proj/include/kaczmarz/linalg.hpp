#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "kaczmarz/errors.hpp"

namespace kaczmarz {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles. Row access is the hot path of every
// projection step, so rows are contiguous.
class DenseMatrix {
 public:
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {
    assert(rows >= 1 && cols >= 1);
  }

  DenseMatrix(std::size_t rows, std::size_t cols, Vector entries)
      : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    assert(rows >= 1 && cols >= 1);
    assert(entries_.size() == rows * cols);
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) {
    return entries_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_[i * cols_ + j];
  }

  std::span<double> row(std::size_t i) {
    return {entries_.data() + i * cols_, cols_};
  }
  std::span<const double> row(std::size_t i) const {
    return {entries_.data() + i * cols_, cols_};
  }

  const Vector& entries() const noexcept { return entries_; }

  // A x
  Vector multiply(std::span<const double> x) const {
    assert(x.size() == cols_);
    Vector y(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      const double* a = entries_.data() + i * cols_;
      double s = 0.0;
      for (std::size_t j = 0; j < cols_; ++j) s += a[j] * x[j];
      y[i] = s;
    }
    return y;
  }

  // A^T y
  Vector multiply_transpose(std::span<const double> y) const {
    assert(y.size() == rows_);
    Vector x(cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      const double* a = entries_.data() + i * cols_;
      const double yi = y[i];
      for (std::size_t j = 0; j < cols_; ++j) x[j] += a[j] * yi;
    }
    return x;
  }

  // A^T A, symmetric cols x cols
  DenseMatrix gramian() const {
    DenseMatrix g(cols_, cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
      const double* a = entries_.data() + i * cols_;
      for (std::size_t j = 0; j < cols_; ++j) {
        for (std::size_t k = j; k < cols_; ++k) g(j, k) += a[j] * a[k];
      }
    }
    for (std::size_t j = 0; j < cols_; ++j)
      for (std::size_t k = 0; k < j; ++k) g(j, k) = g(k, j);
    return g;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  Vector entries_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double l2_norm_sq(std::span<const double> a) { return dot(a, a); }

inline double l2_norm(std::span<const double> a) {
  return std::sqrt(l2_norm_sq(a));
}

inline double linf_norm(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s = std::max(s, std::abs(v));
  return s;
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline Vector subtract(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  Vector d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

inline bool all_finite(std::span<const double> a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

// Cholesky factorization G = L L^T of a symmetric positive definite matrix,
// factored once and reused for many solves.
class CholeskyFactor {
 public:
  explicit CholeskyFactor(const DenseMatrix& g) : n_(g.rows()), l_(g) {
    assert(g.rows() == g.cols());
    for (std::size_t j = 0; j < n_; ++j) {
      double d = l_(j, j);
      for (std::size_t k = 0; k < j; ++k) d -= l_(j, k) * l_(j, k);
      if (!(d > 0.0) || !std::isfinite(d)) {
        throw SingularOrIllConditioned(
            "Cholesky pivot " + std::to_string(j) +
            " not positive; matrix is numerically rank-deficient");
      }
      const double ljj = std::sqrt(d);
      l_(j, j) = ljj;
      for (std::size_t i = j + 1; i < n_; ++i) {
        double s = l_(i, j);
        for (std::size_t k = 0; k < j; ++k) s -= l_(i, k) * l_(j, k);
        l_(i, j) = s / ljj;
      }
      for (std::size_t k = j + 1; k < n_; ++k) l_(j, k) = 0.0;
    }
  }

  // Solve G x = b.
  Vector solve(std::span<const double> b) const {
    assert(b.size() == n_);
    Vector x(b.begin(), b.end());
    for (std::size_t i = 0; i < n_; ++i) {  // L y = b
      double s = x[i];
      for (std::size_t k = 0; k < i; ++k) s -= l_(i, k) * x[k];
      x[i] = s / l_(i, i);
    }
    for (std::size_t ii = n_; ii-- > 0;) {  // L^T x = y
      double s = x[ii];
      for (std::size_t k = ii + 1; k < n_; ++k) s -= l_(k, ii) * x[k];
      x[ii] = s / l_(ii, ii);
    }
    return x;
  }

 private:
  std::size_t n_;
  DenseMatrix l_;
};

}  // namespace kaczmarz
