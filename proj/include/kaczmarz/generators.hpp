#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kaczmarz/errors.hpp"
#include "kaczmarz/rng.hpp"
#include "kaczmarz/system.hpp"

namespace kaczmarz {

// m x n matrix with i.i.d. standard normal entries, rows normalized.
// The right-hand side is built as b = A x* so the solution is known; the
// default x* = 0 gives the homogeneous problem A x = 0.
inline NormalizedSystem gen_gaussian(std::size_t m, std::size_t n,
                                     std::uint64_t seed,
                                     std::span<const double> x_star = {}) {
  if (m < 1 || n < 1 || m < n)
    throw GeneratorError("gaussian generator needs m >= n >= 1");
  if (!x_star.empty() && x_star.size() != n)
    throw GeneratorError("x* length does not match column count");

  Rng rng(seed);
  DenseMatrix a(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.gaussian();

  Vector solution(n, 0.0);
  if (!x_star.empty()) solution.assign(x_star.begin(), x_star.end());

  Vector b_raw(m, 0.0);
  if (!x_star.empty()) b_raw = a.multiply(solution);

  return normalize_system(a, b_raw, std::move(solution));
}

// Square n x n matrix: standard normal entries plus shift * identity, rows
// normalized afterwards. Strong diagonal dominance keeps the smallest
// singular value at unit scale. Solves A x = 0 with solution 0 stored.
inline NormalizedSystem gen_gaussian_shifted(std::size_t n, double shift,
                                             std::uint64_t seed) {
  if (n < 1) throw GeneratorError("shifted generator needs n >= 1");
  if (!(shift > 0.0)) throw GeneratorError("shift must be positive");

  Rng rng(seed);
  DenseMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.gaussian();
  for (std::size_t i = 0; i < n; ++i) a(i, i) += shift;

  Vector b_raw(n, 0.0);
  return normalize_system(a, b_raw, Vector(n, 0.0));
}

}  // namespace kaczmarz
