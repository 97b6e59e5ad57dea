#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "kaczmarz/errors.hpp"
#include "kaczmarz/system.hpp"

namespace kaczmarz {

// Below this residual sup-norm the weighted distribution is numerically
// meaningless and the system counts as solved.
inline constexpr double kSolvedThreshold = 1e-14;

// Row-selection strategy. Weighted(p) draws row i with probability
// |r_i|^p / ||r||_p^p; MaxCorrection is its p -> infinity limit and Uniform
// its p -> 0 limit. NormWeighted (likelihood proportional to ||a_i||^2)
// coincides with Uniform on unit-row systems.
struct SelectionRule {
  enum class Kind { Cyclic, Uniform, NormWeighted, Weighted, MaxCorrection };

  Kind kind = Kind::Uniform;
  double p = 0.0;  // meaningful for Kind::Weighted only

  static SelectionRule cyclic() { return {Kind::Cyclic, 0.0}; }
  static SelectionRule uniform() { return {Kind::Uniform, 0.0}; }
  static SelectionRule norm_weighted() { return {Kind::NormWeighted, 0.0}; }
  static SelectionRule weighted(double p) {
    if (!(p > 0.0) || !std::isfinite(p))
      throw std::invalid_argument("weighted rule needs finite p > 0");
    return {Kind::Weighted, p};
  }
  static SelectionRule max_correction() { return {Kind::MaxCorrection, 0.0}; }

  bool stochastic() const noexcept { return kind != Kind::Cyclic; }

  std::string label() const {
    switch (kind) {
      case Kind::Cyclic:
        return "cyclic";
      case Kind::Uniform:
        return "uniform";
      case Kind::NormWeighted:
        return "norm";
      case Kind::MaxCorrection:
        return "max";
      case Kind::Weighted: {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "p%g", p);
        return buf;
      }
    }
    return "?";
  }
};

// Probabilities over rows plus their prefix sums for inverse-CDF draws.
struct WeightProfile {
  Vector q;
  Vector c;

  static WeightProfile from_probabilities(Vector probabilities) {
    WeightProfile profile{std::move(probabilities), {}};
    profile.c.resize(profile.q.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < profile.q.size(); ++i) {
      acc += profile.q[i];
      profile.c[i] = acc;
    }
    return profile;
  }
};

// Selection probabilities for one residual. Weighted powers are computed on
// |r_i| / ||r||_inf, which is algebraically the same distribution but cannot
// overflow for large p.
inline WeightProfile weights(const ResidualVector& r,
                             const SelectionRule& rule) {
  const std::size_t m = r.size();
  switch (rule.kind) {
    case SelectionRule::Kind::Cyclic:
      throw RuleNotStochastic();

    case SelectionRule::Kind::Uniform:
    case SelectionRule::Kind::NormWeighted:
      return WeightProfile::from_probabilities(Vector(m, 1.0 / m));

    case SelectionRule::Kind::MaxCorrection: {
      const double sup = linf_norm(r);
      if (sup <= kSolvedThreshold) throw SolutionReached();
      Vector q(m, 0.0);
      std::size_t argmax = 0;
      for (std::size_t i = 1; i < m; ++i)
        if (std::abs(r[i]) > std::abs(r[argmax])) argmax = i;
      q[argmax] = 1.0;  // ties resolve to the lowest index
      return WeightProfile::from_probabilities(std::move(q));
    }

    case SelectionRule::Kind::Weighted: {
      const double sup = linf_norm(r);
      if (sup <= kSolvedThreshold) throw SolutionReached();
      Vector q(m);
      double total = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        q[i] = std::pow(std::abs(r[i]) / sup, rule.p);
        total += q[i];
      }
      for (double& v : q) v /= total;
      return WeightProfile::from_probabilities(std::move(q));
    }
  }
  throw std::logic_error("unreachable");
}

// Inverse-CDF draw: smallest index whose cumulative sum exceeds u.
inline std::size_t sample_index(const WeightProfile& profile, double u) {
  const auto it =
      std::upper_bound(profile.c.begin(), profile.c.end(), u);
  if (it != profile.c.end())
    return static_cast<std::size_t>(it - profile.c.begin());
  // u fell beyond the (rounded) total mass: take the last positive-weight row
  for (std::size_t i = profile.q.size(); i-- > 0;)
    if (profile.q[i] > 0.0) return i;
  return profile.q.size() - 1;
}

// Total Weighted(p) probability mass on rows attaining ||r||_inf. Quantifies
// how close Weighted(p) is to the deterministic maximal-correction pick.
inline double effective_argmax_mass(const ResidualVector& r, double p) {
  const double sup = linf_norm(r);
  if (!(sup > 0.0)) throw ZeroVectorError();
  double total = 0.0;
  double on_max = 0.0;
  for (double v : r) {
    const double t = std::pow(std::abs(v) / sup, p);
    total += t;
    if (std::abs(v) == sup) on_max += t;
  }
  return on_max / total;
}

}  // namespace kaczmarz
