#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "kaczmarz/errors.hpp"
#include "kaczmarz/linalg.hpp"

namespace kaczmarz {

inline constexpr double kZeroRowGuard = 1e-300;

// Linear system A x = b with every row of A scaled to unit 2-norm. The
// original row norms are kept so callers can map residuals back to the
// unscaled system. An optional known solution enables error diagnostics.
struct NormalizedSystem {
  DenseMatrix A;
  Vector b;
  std::optional<Vector> solution;
  Vector row_scales;

  std::size_t row_count() const noexcept { return A.rows(); }
  std::size_t col_count() const noexcept { return A.cols(); }
};

// m x m table of pairwise row inner products Q_ij = <a_i, a_j>. Stored fully
// (symmetric) so a projection against row i can read row Q_i contiguously.
class GramMatrix {
 public:
  explicit GramMatrix(DenseMatrix entries) : entries_(std::move(entries)) {}

  std::size_t size() const noexcept { return entries_.rows(); }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_(i, j);
  }
  std::span<const double> row(std::size_t i) const { return entries_.row(i); }

 private:
  DenseMatrix entries_;
};

using ResidualVector = Vector;  // r_i = <a_i, x> - b_i

// Scales each equation by 1/||a_i||, which leaves the solution set unchanged
// (both the row and its right-hand side are divided by the same positive
// number). Rows below the zero guard are unusable equations.
inline NormalizedSystem normalize_system(
    const DenseMatrix& a_raw, std::span<const double> b_raw,
    std::optional<Vector> known_solution = std::nullopt) {
  const std::size_t m = a_raw.rows();
  const std::size_t n = a_raw.cols();
  if (b_raw.size() != m)
    throw std::invalid_argument("rhs length does not match row count");

  DenseMatrix a(m, n);
  Vector b(m);
  Vector scales(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto row = a_raw.row(i);
    if (!all_finite(row) || !std::isfinite(b_raw[i]))
      throw std::invalid_argument("non-finite entry in row " +
                                  std::to_string(i));
    const double norm = l2_norm(row);
    if (!(norm >= kZeroRowGuard)) throw ZeroRowError(i);
    const double inv = 1.0 / norm;
    for (std::size_t j = 0; j < n; ++j) a(i, j) = row[j] * inv;
    b[i] = b_raw[i] * inv;
    scales[i] = norm;
  }
  return NormalizedSystem{std::move(a), std::move(b),
                          std::move(known_solution), std::move(scales)};
}

inline GramMatrix gram(const NormalizedSystem& system) {
  const std::size_t m = system.row_count();
  DenseMatrix q(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto ai = system.A.row(i);
    q(i, i) = dot(ai, ai);
    for (std::size_t j = i + 1; j < m; ++j) {
      const double v = dot(ai, system.A.row(j));
      q(i, j) = v;
      q(j, i) = v;  // symmetric exactly as stored
    }
  }
  return GramMatrix(std::move(q));
}

inline ResidualVector residual(const NormalizedSystem& system,
                               std::span<const double> x) {
  ResidualVector r = system.A.multiply(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= system.b[i];
  return r;
}

}  // namespace kaczmarz
