#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kaczmarz/rng.hpp"
#include "kaczmarz/sampling.hpp"
#include "kaczmarz/system.hpp"

namespace kaczmarz {

struct SolverState {
  Vector x;                       // current iterate x_k
  ResidualVector r;               // cached A x_k - b
  std::size_t k = 0;              // steps applied since initialization
  std::size_t cyclic_cursor = 0;  // next row for the cyclic rule
};

enum class ResidualStrategy {
  GramUpdate,       // r += lambda * Q_i, O(m) per step, periodic refresh
  DirectRecompute,  // r = A x - b every step, O(m n)
};

struct SolveConfig {
  SelectionRule rule = SelectionRule::uniform();
  std::size_t max_iters = 1000;
  double stop_tol = 0.0;  // stop when ||r||_inf <= stop_tol
  std::size_t trace_every = 1;
  ResidualStrategy residual_strategy = ResidualStrategy::GramUpdate;
  std::size_t refresh_every = 10000;  // exact recompute cadence (GramUpdate)
};

// Per-checkpoint diagnostics. l2_error needs a known solution and
// sv_alignment additionally needs a reference singular vector; chosen_row is
// the row projected by the step that produced iterate k (absent at k = 0).
struct TraceRecord {
  std::size_t k = 0;
  std::optional<std::size_t> chosen_row;
  std::optional<double> l2_error;
  double linf_residual = 0.0;
  std::optional<double> sv_alignment;
};

inline SolverState init_state(const NormalizedSystem& system,
                              std::span<const double> x0) {
  SolverState state;
  state.x.assign(x0.begin(), x0.end());
  state.r = residual(system, state.x);
  return state;
}

// One projection of x onto the hyperplane of equation i. lambda comes from
// the cached residual entry, which equals b_i - <a_i, x> up to cache drift.
inline void step(SolverState& state, std::size_t i,
                 const NormalizedSystem& system, const GramMatrix* q,
                 const SolveConfig& config) {
  const double lambda = -state.r[i];
  axpy(lambda, system.A.row(i), state.x);
  state.k += 1;

  if (config.residual_strategy == ResidualStrategy::GramUpdate) {
    axpy(lambda, q->row(i), state.r);
    if (state.k % config.refresh_every == 0)
      state.r = residual(system, state.x);
  } else {
    state.r = residual(system, state.x);
  }
}

namespace detail {

inline double alignment(std::span<const double> error,
                        std::span<const double> v_min) {
  const double norm = l2_norm(error);
  if (!(norm > 0.0)) return 0.0;
  return std::abs(dot(error, v_min)) / norm;
}

inline TraceRecord make_record(const NormalizedSystem& system,
                               const SolverState& state,
                               std::optional<std::size_t> chosen_row,
                               std::span<const double> v_min) {
  TraceRecord rec;
  rec.k = state.k;
  rec.chosen_row = chosen_row;
  rec.linf_residual = linf_norm(state.r);
  if (system.solution) {
    const Vector err = subtract(state.x, *system.solution);
    rec.l2_error = l2_norm(err);
    if (!v_min.empty()) rec.sv_alignment = detail::alignment(err, v_min);
  }
  return rec;
}

}  // namespace detail

// Full solve loop for callers that already hold the Gram matrix (the
// experiment harness shares one across rules and trials). q may be null
// under DirectRecompute. Stochastic rules draw through weights +
// sample_index from the seeded stream; the cyclic rule walks rows 0..m-1
// wrapping. Emits a trace record at k = 0, every trace_every steps, and at
// termination. SolutionReached from the sampler is a clean stop.
inline std::vector<TraceRecord> solve_with_gram(
    const NormalizedSystem& system, std::span<const double> x0,
    const SolveConfig& config, std::uint64_t rng_seed, const GramMatrix* q,
    std::span<const double> v_min = {}) {
  const std::size_t m = system.row_count();
  SolverState state = init_state(system, x0);
  Rng rng(rng_seed);

  std::vector<TraceRecord> trace;
  trace.push_back(detail::make_record(system, state, std::nullopt, v_min));

  std::optional<std::size_t> last_row;
  while (state.k < config.max_iters) {
    if (linf_norm(state.r) <= config.stop_tol) break;

    std::size_t row = 0;
    if (config.rule.kind == SelectionRule::Kind::Cyclic) {
      row = state.cyclic_cursor;
      state.cyclic_cursor = (state.cyclic_cursor + 1) % m;
    } else {
      WeightProfile profile;
      try {
        profile = weights(state.r, config.rule);
      } catch (const SolutionReached&) {
        break;  // solved to numerical precision
      }
      row = sample_index(profile, rng.uniform());
    }

    step(state, row, system, q, config);
    last_row = row;

    const bool terminal = state.k == config.max_iters ||
                          linf_norm(state.r) <= config.stop_tol;
    if (terminal || state.k % config.trace_every == 0)
      trace.push_back(detail::make_record(system, state, row, v_min));
    if (terminal) break;
  }

  // stops between checkpoints (sampler-signalled) still record the end state
  if (trace.back().k != state.k)
    trace.push_back(detail::make_record(system, state, last_row, v_min));
  return trace;
}

inline std::vector<TraceRecord> solve(const NormalizedSystem& system,
                                      std::span<const double> x0,
                                      const SolveConfig& config,
                                      std::uint64_t rng_seed,
                                      std::span<const double> v_min = {}) {
  if (config.residual_strategy == ResidualStrategy::GramUpdate) {
    const GramMatrix q = gram(system);
    return solve_with_gram(system, x0, config, rng_seed, &q, v_min);
  }
  return solve_with_gram(system, x0, config, rng_seed, nullptr, v_min);
}

// Exact one-step expectation of the squared error under Weighted(p):
// sum_i q_i (||e||^2 - r_i^2). The algebraically identical norm-ratio form
// ||e||^2 - ||Ae||_{p+2}^{p+2} / ||Ae||_p^p is evaluated alongside as a
// self-check.
inline double expected_next_error_sq(const NormalizedSystem& system,
                                     std::span<const double> x, double p) {
  if (!system.solution)
    throw std::invalid_argument(
        "expected_next_error_sq needs a known solution");
  const Vector e = subtract(x, *system.solution);
  const ResidualVector r = residual(system, x);
  const double sup = linf_norm(r);
  if (sup <= kSolvedThreshold) throw AtSolution();

  const double err_sq = l2_norm_sq(e);
  const WeightProfile profile = weights(r, SelectionRule::weighted(p));
  double outcome_sum = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i)
    outcome_sum += profile.q[i] * (err_sq - r[i] * r[i]);

  // norm-ratio form with the same sup-normalized powers
  double num = 0.0, den = 0.0;
  for (double v : r) {
    const double t = std::abs(v) / sup;
    const double tp = std::pow(t, p);
    den += tp;
    num += tp * t * t;
  }
  const double norm_ratio = err_sq - sup * sup * num / den;

  const double scale = std::max(std::abs(outcome_sum), std::abs(norm_ratio));
  if (std::abs(outcome_sum - norm_ratio) >
      1e-11 * std::max(scale, 1e-6 * err_sq))
    throw std::logic_error("one-step expectation forms disagree");
  return outcome_sum;
}

}  // namespace kaczmarz
