#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "kaczmarz/analysis.hpp"
#include "kaczmarz/errors.hpp"
#include "kaczmarz/generators.hpp"
#include "kaczmarz/io.hpp"
#include "kaczmarz/solver.hpp"

namespace kaczmarz {

struct GaussianSource {
  std::size_t m = 200;
  std::size_t n = 200;
};

struct ShiftedGaussianSource {
  std::size_t n = 200;
  double shift = 100.0;
};

struct FileSource {
  std::filesystem::path matrix_path;
  std::filesystem::path rhs_path;
};

using MatrixSource =
    std::variant<GaussianSource, ShiftedGaussianSource, FileSource>;

struct ExperimentSpec {
  MatrixSource source = ShiftedGaussianSource{};
  std::vector<SelectionRule> rules;
  std::vector<double> p_values;  // sugar: appended as Weighted rules
  std::size_t iters = 2000;
  std::size_t trials = 20;
  std::uint64_t base_seed = 1;
  std::size_t trace_every = 1;
  std::filesystem::path out_dir;
  bool track_sv = false;
  ResidualStrategy strategy = ResidualStrategy::GramUpdate;
  double stop_tol = 0.0;
  std::size_t restarts = 6;  // minimizer restarts for bounds
};

struct SummaryRow {
  std::string rule;
  std::size_t trials = 0;
  std::size_t iters = 0;
  std::optional<double> median_l2;
  double median_linf = 0.0;
  std::optional<double> median_sv_align;
  double wall_ms = 0.0;  // kept at 0 in files so outputs stay reproducible
};

struct BoundsRow {
  double p = 0.0;
  double sigma_min = 0.0;
  std::size_t m = 0;
  double rk_factor = 0.0;
  double jp_floor = 0.0;
  double jp_inf_estimate = 0.0;
  double weighted_factor = 0.0;
};

struct RunOutputs {
  std::vector<std::filesystem::path> trace_files;
  std::filesystem::path summary_file;
  std::vector<SummaryRow> summary;
};

struct BoundsOutputs {
  std::filesystem::path bounds_file;
  std::vector<BoundsRow> rows;
};

// "uniform,cyclic,max,norm,p:2" -> selection rules
inline std::vector<SelectionRule> parse_rules(const std::string& text) {
  std::vector<SelectionRule> rules;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string token =
        text.substr(start, comma == std::string::npos ? comma : comma - start);
    start = comma == std::string::npos ? text.size() + 1 : comma + 1;
    if (token.empty()) continue;
    if (token == "uniform") {
      rules.push_back(SelectionRule::uniform());
    } else if (token == "cyclic") {
      rules.push_back(SelectionRule::cyclic());
    } else if (token == "max") {
      rules.push_back(SelectionRule::max_correction());
    } else if (token == "norm") {
      rules.push_back(SelectionRule::norm_weighted());
    } else if (token.rfind("p:", 0) == 0) {
      std::size_t used = 0;
      double p = 0.0;
      try {
        p = std::stod(token.substr(2), &used);
      } catch (const std::exception&) {
        throw GeneratorError("bad rule token '" + token + "'");
      }
      if (used != token.size() - 2 || !(p > 0.0) || !std::isfinite(p))
        throw GeneratorError("bad rule token '" + token + "'");
      rules.push_back(SelectionRule::weighted(p));
    } else {
      throw GeneratorError("unknown rule '" + token + "'");
    }
  }
  return rules;
}

inline std::vector<double> parse_p_values(const std::string& text) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string token =
        text.substr(start, comma == std::string::npos ? comma : comma - start);
    start = comma == std::string::npos ? text.size() + 1 : comma + 1;
    if (token.empty()) continue;
    std::size_t used = 0;
    double p = 0.0;
    try {
      p = std::stod(token, &used);
    } catch (const std::exception&) {
      throw GeneratorError("bad p value '" + token + "'");
    }
    if (used != token.size() || !(p > 0.0) || !std::isfinite(p))
      throw GeneratorError("bad p value '" + token + "'");
    values.push_back(p);
  }
  return values;
}

namespace detail {

inline NormalizedSystem build_system(const MatrixSource& source,
                                     std::uint64_t seed) {
  if (const auto* gaussian = std::get_if<GaussianSource>(&source))
    return gen_gaussian(gaussian->m, gaussian->n, seed);
  if (const auto* shifted = std::get_if<ShiftedGaussianSource>(&source))
    return gen_gaussian_shifted(shifted->n, shifted->shift, seed);
  const auto& file = std::get<FileSource>(source);
  const DenseMatrix a = read_matrix(file.matrix_path);
  const Vector b = read_rhs(file.rhs_path);
  if (b.size() != a.rows())
    throw BadMatrixFile(file.rhs_path.string(), b.size() + 1,
                        "rhs has " + std::to_string(b.size()) +
                            " entries but matrix has " +
                            std::to_string(a.rows()) + " rows");
  return normalize_system(a, b);
}

inline double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2]
               : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

inline std::string cell(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

inline void write_trace(const std::filesystem::path& path,
                        const std::vector<TraceRecord>& trace) {
  std::ofstream out = open_out(path);
  out << "iter,chosen_row,l2_error,linf_residual,sv_alignment\n";
  for (const TraceRecord& rec : trace) {
    out << rec.k << ',';
    if (rec.chosen_row) out << *rec.chosen_row;
    out << ',' << cell(rec.l2_error) << ','
        << format_double(rec.linf_residual) << ',' << cell(rec.sv_alignment)
        << '\n';
  }
  if (!out) throw IoError("write failed on " + path.string());
}

}  // namespace detail

// Runs every rule x trial combination on one matrix built (or loaded) from
// the spec, writing one trace CSV per run plus a summary CSV of per-rule
// medians. All randomness flows from base_seed (matrix: base_seed, trial t:
// base_seed + t), so identical specs produce byte-identical files.
inline RunOutputs run_experiment(const ExperimentSpec& spec) {
  if (spec.trials < 1) throw GeneratorError("trials must be >= 1");
  std::vector<SelectionRule> rules = spec.rules;
  for (double p : spec.p_values) rules.push_back(SelectionRule::weighted(p));
  if (rules.empty()) throw GeneratorError("no selection rules given");

  std::error_code ec;
  std::filesystem::create_directories(spec.out_dir, ec);
  if (ec) throw IoError("cannot create " + spec.out_dir.string());

  const NormalizedSystem system = detail::build_system(spec.source, spec.base_seed);
  const GramMatrix q = gram(system);
  const Vector x0(system.col_count(), 1.0);

  Vector v_min;
  if (spec.track_sv) v_min = smallest_singular(system).v_min;

  RunOutputs outputs;
  for (const SelectionRule& rule : rules) {
    SolveConfig config;
    config.rule = rule;
    config.max_iters = spec.iters;
    config.stop_tol = spec.stop_tol;
    config.trace_every = spec.trace_every;
    config.residual_strategy = spec.strategy;

    std::vector<double> final_l2, final_linf, final_sv;
    const auto started = std::chrono::steady_clock::now();
    for (std::size_t trial = 0; trial < spec.trials; ++trial) {
      const std::vector<TraceRecord> trace =
          solve_with_gram(system, x0, config, spec.base_seed + trial,
                          spec.strategy == ResidualStrategy::GramUpdate
                              ? &q
                              : nullptr,
                          v_min);
      const std::filesystem::path path =
          spec.out_dir / ("trace_" + rule.label() + "_t" +
                          std::to_string(trial) + ".csv");
      detail::write_trace(path, trace);
      outputs.trace_files.push_back(path);

      const TraceRecord& last = trace.back();
      if (last.l2_error) final_l2.push_back(*last.l2_error);
      final_linf.push_back(last.linf_residual);
      if (last.sv_alignment) final_sv.push_back(*last.sv_alignment);
    }
    const double wall_ms =
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - started)
            .count();
    std::cerr << "# rule " << rule.label() << ": " << spec.trials
              << " trials in " << wall_ms << " ms\n";

    SummaryRow row;
    row.rule = rule.label();
    row.trials = spec.trials;
    row.iters = spec.iters;
    if (final_l2.size() == spec.trials)
      row.median_l2 = detail::median(std::move(final_l2));
    row.median_linf = detail::median(std::move(final_linf));
    if (final_sv.size() == spec.trials)
      row.median_sv_align = detail::median(std::move(final_sv));
    outputs.summary.push_back(std::move(row));
  }

  outputs.summary_file = spec.out_dir / "summary.csv";
  std::ofstream out = detail::open_out(outputs.summary_file);
  out << "rule,trials,iters,median_l2,median_linf,median_sv_align,wall_ms\n";
  for (const SummaryRow& row : outputs.summary) {
    out << row.rule << ',' << row.trials << ',' << row.iters << ','
        << detail::cell(row.median_l2) << ',' << format_double(row.median_linf)
        << ',' << detail::cell(row.median_sv_align) << ','
        << format_double(row.wall_ms) << '\n';
  }
  if (!out) throw IoError("write failed on " + outputs.summary_file.string());
  return outputs;
}

// Rate quantities for the spec's matrix at each requested p.
inline BoundsOutputs report_bounds(const ExperimentSpec& spec) {
  if (spec.p_values.empty())
    throw GeneratorError("bounds needs at least one p value");

  std::error_code ec;
  std::filesystem::create_directories(spec.out_dir, ec);
  if (ec) throw IoError("cannot create " + spec.out_dir.string());

  const NormalizedSystem system = detail::build_system(spec.source, spec.base_seed);
  const SpectralInfo spectral = smallest_singular(system);
  const double floor = spectral.sigma_min * spectral.sigma_min /
                       static_cast<double>(system.row_count());

  BoundsOutputs outputs;
  for (double p : spec.p_values) {
    const RateReport report =
        jp_inf_estimate(system, p, spec.restarts, spec.base_seed);
    BoundsRow row;
    row.p = p;
    row.sigma_min = spectral.sigma_min;
    row.m = system.row_count();
    row.rk_factor = report.rk_factor;
    row.jp_floor = floor;
    row.jp_inf_estimate = report.jp_inf_estimate;
    row.weighted_factor = report.weighted_factor_estimate;
    outputs.rows.push_back(row);
  }

  outputs.bounds_file = spec.out_dir / "bounds.csv";
  std::ofstream out = detail::open_out(outputs.bounds_file);
  out << "p,sigma_min,m,rk_factor,jp_floor,jp_inf_estimate,weighted_factor\n";
  for (const BoundsRow& row : outputs.rows) {
    out << format_double(row.p) << ',' << format_double(row.sigma_min) << ','
        << row.m << ',' << format_double(row.rk_factor) << ','
        << format_double(row.jp_floor) << ','
        << format_double(row.jp_inf_estimate) << ','
        << format_double(row.weighted_factor) << '\n';
  }
  if (!out) throw IoError("write failed on " + outputs.bounds_file.string());
  return outputs;
}

}  // namespace kaczmarz
