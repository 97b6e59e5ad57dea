#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "kaczmarz/errors.hpp"
#include "kaczmarz/linalg.hpp"
#include "kaczmarz/rng.hpp"
#include "kaczmarz/system.hpp"

namespace kaczmarz {

// Extreme singular pair of A plus the Frobenius mass, from inverse power
// iteration on A^T A.
struct SpectralInfo {
  double sigma_min = 0.0;
  Vector v_min;
  double frobenius_sq = 0.0;
  std::size_t iterations_used = 0;
  bool converged = false;
};

// Rate quantities for one exponent p: the classical randomized-Kaczmarz
// contraction factor and the best found value of the weighted-rate
// functional, bracketed from below by sigma_min^2 / m.
struct RateReport {
  double p = 0.0;
  double rk_factor = 0.0;
  std::map<std::string, double> jp_value_at;
  double jp_inf_estimate = 0.0;
  double weighted_factor_estimate = 0.0;
};

namespace detail {

// J_p from a residual image r = A z, powers normalized by ||r||_inf so that
// large p cannot overflow: J = ||r||_inf^2 * sum t^(p+2) / (sum t^p ||z||^2).
inline double jp_from_image(std::span<const double> r, double p,
                            double z_norm_sq) {
  const double sup = linf_norm(r);
  if (!(sup > 0.0))
    throw SingularOrIllConditioned("A z vanished for nonzero z");
  double num = 0.0, den = 0.0;
  for (double v : r) {
    const double t = std::abs(v) / sup;
    const double tp = std::pow(t, p);
    den += tp;
    num += tp * t * t;
  }
  return sup * sup * (num / den) / z_norm_sq;
}

}  // namespace detail

// The weighted-rate functional J_p(z) = ||Az||_{p+2}^{p+2} /
// (||Az||_p^p ||z||_2^2).
inline double jp(const NormalizedSystem& system, std::span<const double> z,
                 double p) {
  const double z_sq = l2_norm_sq(z);
  if (!(std::sqrt(z_sq) > 1e-300)) throw ZeroVectorError();
  const Vector image = system.A.multiply(z);
  return detail::jp_from_image(image, p, z_sq);
}

// Smallest singular value and vector via inverse power iteration on A^T A,
// with one upfront Cholesky factorization. Converged means successive
// Rayleigh quotients differ by at most tol relatively.
inline SpectralInfo smallest_singular(const NormalizedSystem& system,
                                      double tol = 1e-10,
                                      std::size_t max_iters = 10000) {
  const std::size_t n = system.col_count();
  const DenseMatrix g = system.A.gramian();
  const CholeskyFactor factor(g);

  // generic start: a deterministic random direction avoids starting exactly
  // orthogonal to the target eigenvector
  Rng rng(0x5eed0dd5u);
  Vector v(n);
  for (double& c : v) c = rng.gaussian();
  double inv = 1.0 / l2_norm(v);
  for (double& c : v) c *= inv;

  SpectralInfo info;
  double rho_prev = -1.0;
  for (std::size_t it = 1; it <= max_iters; ++it) {
    Vector w = factor.solve(v);
    inv = 1.0 / l2_norm(w);
    for (double& c : w) c *= inv;
    v = std::move(w);

    const double rho = l2_norm_sq(system.A.multiply(v));
    info.iterations_used = it;
    if (rho_prev >= 0.0 && std::abs(rho - rho_prev) <= tol * rho) {
      info.converged = true;
      rho_prev = rho;
      break;
    }
    rho_prev = rho;
  }

  for (double c : v) {
    if (c != 0.0) {
      if (c < 0.0)
        for (double& cc : v) cc = -cc;
      break;
    }
  }

  info.sigma_min = std::sqrt(rho_prev);
  info.v_min = std::move(v);
  info.frobenius_sq = l2_norm_sq(system.A.entries());
  return info;
}

// Strohmer-Vershynin contraction factor 1 - sigma_min^2 / m (unit-row A has
// ||A||_F^2 = m).
inline double rk_rate(const NormalizedSystem& system,
                      const SpectralInfo& spectral) {
  return 1.0 -
         spectral.sigma_min * spectral.sigma_min /
             static_cast<double>(system.row_count());
}

namespace detail {

// Minimizes J_p over the unit sphere by projected gradient descent with a
// backtracking line search. The gradient is central finite differences; the
// residual image is updated per coordinate from the matrix columns, so one
// gradient costs O(m n) like a single matvec.
class JpMinimizer {
 public:
  JpMinimizer(const NormalizedSystem& system, double p, std::uint64_t seed)
      : system_(system), p_(p), jitter_rng_(seed ^ 0x9e3779b97f4a7c15ull) {}

  double minimize(Vector z, std::size_t max_iters = 600) {
    normalize(z);
    Vector image = system_.A.multiply(z);
    jitter_if_degenerate(z, image);
    double value = jp_from_image(image, p_, 1.0);

    double eta = 0.25;
    std::size_t stall = 0;
    for (std::size_t it = 0; it < max_iters && stall < 4; ++it) {
      const Vector grad = fd_gradient(z, image);
      Vector tangent = grad;
      axpy(-dot(grad, z), z, tangent);
      const double tangent_sq = l2_norm_sq(tangent);
      if (tangent_sq < 1e-26) break;

      bool accepted = false;
      while (eta > 1e-16) {
        Vector trial = z;
        axpy(-eta, tangent, trial);
        normalize(trial);
        Vector trial_image = system_.A.multiply(trial);
        const double trial_value = jp_from_image(trial_image, p_, 1.0);
        if (trial_value < value - 1e-4 * eta * tangent_sq) {
          stall = (value - trial_value < 1e-14 * std::max(1.0, value))
                      ? stall + 1
                      : 0;
          z = std::move(trial);
          image = std::move(trial_image);
          value = trial_value;
          eta = std::min(eta * 1.6, 4.0);
          accepted = true;
          break;
        }
        eta *= 0.5;
      }
      if (!accepted) break;
      jitter_if_degenerate(z, image);
    }
    return value;
  }

 private:
  void normalize(Vector& z) const {
    const double norm = l2_norm(z);
    if (!(norm > 1e-300)) throw ZeroVectorError();
    for (double& c : z) c /= norm;
  }

  // p < 1 is non-smooth where a residual entry vanishes; nudge off the kink
  void jitter_if_degenerate(Vector& z, Vector& image) {
    bool degenerate = false;
    for (double v : image)
      if (std::abs(v) < 1e-13) degenerate = true;
    if (!degenerate) return;
    for (double& c : z) c += 1e-12 * jitter_rng_.gaussian();
    normalize(z);
    image = system_.A.multiply(z);
  }

  Vector fd_gradient(const Vector& z, const Vector& image) const {
    const std::size_t m = system_.row_count();
    const std::size_t n = system_.col_count();
    const double h = 1e-6 * (1.0 + l2_norm(z));
    const double z_sq = l2_norm_sq(z);

    Vector grad(n);
    Vector shifted(m);
    for (std::size_t j = 0; j < n; ++j) {
      // A (z +- h e_j) = image +- h * column j
      for (std::size_t i = 0; i < m; ++i)
        shifted[i] = image[i] + h * system_.A(i, j);
      const double plus =
          jp_from_image(shifted, p_, z_sq + 2.0 * h * z[j] + h * h);
      for (std::size_t i = 0; i < m; ++i)
        shifted[i] = image[i] - h * system_.A(i, j);
      const double minus =
          jp_from_image(shifted, p_, z_sq - 2.0 * h * z[j] + h * h);
      grad[j] = (plus - minus) / (2.0 * h);
    }
    return grad;
  }

  const NormalizedSystem& system_;
  double p_;
  Rng jitter_rng_;
};

}  // namespace detail

// Certified-from-above estimate of inf_z J_p(z): multi-start projected
// gradient descent from v_min and random directions, with two fixed probes
// always evaluated (v_min itself and the least-squares preimage of the
// all-ones vector, the Hoelder equality direction). The Theorem floor
// sigma_min^2 / m must lie below the estimate; a violation is an
// implementation bug, not a property of the input.
inline RateReport jp_inf_estimate(const NormalizedSystem& system, double p,
                                  std::size_t restarts, std::uint64_t seed) {
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  const std::size_t n = system.col_count();
  const SpectralInfo spectral = smallest_singular(system);
  const double floor =
      spectral.sigma_min * spectral.sigma_min / system.row_count();

  RateReport report;
  report.p = p;
  report.rk_factor = rk_rate(system, spectral);

  const double at_vmin = jp(system, spectral.v_min, p);
  report.jp_value_at["v_min"] = at_vmin;
  double best = at_vmin;

  // least-squares solution of A z ~ all-ones
  {
    const CholeskyFactor factor(system.A.gramian());
    Vector ones(system.row_count(), 1.0);
    Vector probe = factor.solve(system.A.multiply_transpose(ones));
    if (l2_norm(probe) > 1e-300) {
      const double at_probe = jp(system, probe, p);
      report.jp_value_at["ones_image"] = at_probe;
      best = std::min(best, at_probe);
    }
  }

  detail::JpMinimizer minimizer(system, p, seed);
  best = std::min(best, minimizer.minimize(spectral.v_min));
  Rng rng(seed);
  for (std::size_t s = 1; s < restarts; ++s) {
    Vector z(n);
    for (double& c : z) c = rng.gaussian();
    best = std::min(best, minimizer.minimize(std::move(z)));
  }

  if (best < floor - 1e-10) throw FloorViolated(best, floor);
  report.jp_inf_estimate = best;
  report.weighted_factor_estimate = 1.0 - best;
  return report;
}

struct SvIdentitySides {
  double lhs = 0.0;
  double rhs = 0.0;
};

// One-step form of the uniform-rule singular-vector identity: the expected
// next iterate is averaged explicitly over all m row choices, then compared
// against (1 - sigma^2/m) <x_k - x, v>. Holds for uniform sampling only.
inline SvIdentitySides rk_sv_identity_check(const NormalizedSystem& system,
                                            std::span<const double> x,
                                            double sigma,
                                            std::span<const double> v) {
  if (!system.solution)
    throw std::invalid_argument("identity check needs a known solution");
  const std::size_t m = system.row_count();
  const std::size_t n = system.col_count();

  // (sigma, v) must be an eigenpair of A^T A
  Vector gv = system.A.multiply_transpose(system.A.multiply(v));
  axpy(-sigma * sigma, v, gv);
  if (l2_norm(gv) > 1e-6)
    throw std::invalid_argument("(sigma, v) is not an eigenpair of A^T A");

  const ResidualVector r = residual(system, x);
  Vector mean_next(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    Vector outcome(x.begin(), x.end());
    axpy(-r[i], system.A.row(i), outcome);
    axpy(1.0 / static_cast<double>(m), outcome, mean_next);
  }

  SvIdentitySides sides;
  const Vector mean_err = subtract(mean_next, *system.solution);
  sides.lhs = dot(mean_err, v);
  const Vector err = subtract(x, *system.solution);
  sides.rhs =
      (1.0 - sigma * sigma / static_cast<double>(m)) * dot(err, v);
  return sides;
}

}  // namespace kaczmarz
