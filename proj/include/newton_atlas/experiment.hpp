#pragma once

/**
 * @file experiment.hpp
 * @brief Desk-scale experiments on random root ensembles: iteration-count
 * scaling in d, near-phase lengths across epsilon, and displacement audits.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "complex_poly.hpp"
#include "ensemble.hpp"
#include "errors.hpp"
#include "orbit.hpp"
#include "pipeline.hpp"
#include "rng.hpp"
#include "starting_grid.hpp"

namespace newton_atlas {

/// Every slack constant used when checking measurements against the theory.
namespace slack {
/// Chosen orbits must take at least this fraction of the linear far-field floor.
inline constexpr double kFloorFraction = 0.5;
/// Near-phase lengths may exceed the quadratic budget by this many steps.
inline constexpr int kNearBudget = 5;
/// Bracket for the fitted exponent beta in total ~ c d^beta ln^4 d.
inline constexpr double kBetaMin = 1.0;
inline constexpr double kBetaMax = 2.3;
}  // namespace slack

/// Steps of w -> ((d-1)/d) w needed to go from start_modulus down to 1 + 1/d.
inline std::int64_t farfield_iteration_floor(int degree, double start_modulus) {
  if (degree < 2) throw InvalidDegree(degree);
  if (!(start_modulus > 1.0)) throw InvalidArgument("start modulus must exceed 1");
  const double d = degree;
  const double target = 1.0 + 1.0 / d;
  if (start_modulus <= target) return 0;
  return static_cast<std::int64_t>(
      std::ceil(std::log(start_modulus / target) / std::log(d / (d - 1.0))));
}

// ---------------------------------------------------------------------------
// Displacement audit
// ---------------------------------------------------------------------------

struct AuditRow {
  Regime regime = Regime::Far;
  std::int64_t steps = 0;
  double min_displacement = std::numeric_limits<double>::infinity();
  /// Smallest C with displacement >= C * shape on every step; shape is
  /// 1/(d ln d) for Far, 1/(k 2^k) for Intermediate. Outside2Disk uses the
  /// exact bound 1/d and C stays 1.
  double fitted_c = std::numeric_limits<double>::infinity();
  /// Steps below the bound (1/d exact, or the common fitted C times the shape).
  std::int64_t violations = 0;
  /// Steps below the area-condition bound 1/((1+2C_d)2^(K+1) + 16 pi C_d d).
  std::int64_t area_bound_violations = 0;
};

struct DisplacementAudit {
  std::vector<AuditRow> rows;  // empty for empty input
  double common_c = std::numeric_limits<double>::infinity();
  bool truncated_input = false;
};

inline double far_shape(int degree) {
  const double d = degree;
  return 1.0 / (d * std::log(d));
}
inline double intermediate_shape(int k) { return 1.0 / (k * std::ldexp(1.0, k)); }

/// Audits recorded steps per regime. c_d, when given, is parallel to traces
/// and enables the area-condition bound for steps inside D_2(0).
inline DisplacementAudit displacement_audit(std::span<const OrbitTrace> traces,
                                            std::span<const double> c_d = {}) {
  DisplacementAudit audit;
  if (traces.empty()) return audit;
  if (!c_d.empty() && c_d.size() != traces.size())
    throw InvalidArgument("c_d must be empty or parallel to traces");

  std::array<AuditRow, 4> rows;
  for (std::size_t r = 0; r < rows.size(); ++r) rows[r].regime = static_cast<Regime>(r);
  rows[static_cast<std::size_t>(Regime::Outside2Disk)].fitted_c = 1.0;

  for (std::size_t t = 0; t < traces.size(); ++t) {
    const OrbitTrace& trace = traces[t];
    audit.truncated_input |= trace.truncated;
    const int d = std::max(trace.degree, 2);
    for (const OrbitStep& s : trace.steps) {
      if (!s.displacement || s.regime == Regime::Unclassified) continue;
      AuditRow& row = rows[static_cast<std::size_t>(s.regime)];
      const double disp = *s.displacement;
      ++row.steps;
      row.min_displacement = std::min(row.min_displacement, disp);
      switch (s.regime) {
        case Regime::Outside2Disk:
          if (!(disp > 1.0 / d)) ++row.violations;
          break;
        case Regime::Far:
          row.fitted_c = std::min(row.fitted_c, disp / far_shape(d));
          break;
        case Regime::Intermediate:
          row.fitted_c = std::min(row.fitted_c, disp / intermediate_shape(*s.k_index));
          break;
        default:
          break;
      }
      if (!c_d.empty() && s.regime != Regime::Outside2Disk && s.k_index && *s.k_index >= -2 &&
          disp < displacement_lower_bound(d, *s.k_index, c_d[t], false))
        ++row.area_bound_violations;
    }
  }

  audit.common_c = std::min(rows[0].fitted_c, rows[1].fitted_c);
  // second pass: violations against the common constant
  for (const OrbitTrace& trace : traces) {
    const int d = std::max(trace.degree, 2);
    for (const OrbitStep& s : trace.steps) {
      if (!s.displacement) continue;
      // same quotient as the fit, so the defining step never counts against itself
      if (s.regime == Regime::Far && *s.displacement / far_shape(d) < audit.common_c)
        ++rows[0].violations;
      if (s.regime == Regime::Intermediate &&
          *s.displacement / intermediate_shape(*s.k_index) < audit.common_c)
        ++rows[1].violations;
    }
  }
  audit.rows.assign(rows.begin(), rows.end());
  return audit;
}

// ---------------------------------------------------------------------------
// Scaling experiment
// ---------------------------------------------------------------------------

struct ExperimentConfig {
  std::vector<int> degrees{10, 20, 40, 80};
  int trials = 20;
  double epsilon = 1e-10;
  std::uint64_t seed = 1;
  std::uint64_t phase_seed = 1;
  double log_base = 0.0;
  double eta = kDefaultEta;
  unsigned workers = 1;
  /// Keep chosen-orbit traces for the audit and histograms.
  bool record_traces = true;

  int sweep_degree = 20;
  std::vector<double> sweep_epsilons{1e-4, 1e-8, 1e-16};
  int sweep_trials = 0;  // 0 reuses `trials`; negative disables the sweep
};

struct ExperimentRow {
  int degree = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::int64_t total_iterations_chosen = 0;
  std::int64_t far_steps = 0;
  std::int64_t intermediate_steps = 0;
  std::int64_t near_steps = 0;
  std::int64_t outside_steps = 0;
  bool dc_holds = false;
  double dc_min = 0.0;
  bool ac_holds = false;
  double ac_fitted_cd = 0.0;
  std::int64_t unresolved = 0;
  std::int64_t max_near_phase = 0;
  std::int64_t floor_violations = 0;    // chosen orbits shorter than kFloorFraction * floor
  double min_floor_ratio = 0.0;         // min over chosen orbits of iterations / floor
  std::int64_t outside_violations = 0;  // over every orbit of the solve
  std::int64_t outside_steps_all = 0;   // over every orbit of the solve
  std::size_t orbits_run = 0;
};

struct DegreeSummary {
  int degree = 0;
  int trials = 0;
  int dc_trials = 0;
  double median_total = 0.0;
  double median_far = 0.0;
  double median_intermediate = 0.0;
  double median_near = 0.0;
  double median_outside = 0.0;
};

struct ScalingFit {
  double beta = std::numeric_limits<double>::quiet_NaN();       // ln^4 d divided out
  double intercept = std::numeric_limits<double>::quiet_NaN();
  double raw_beta = std::numeric_limits<double>::quiet_NaN();   // plain log-log slope
};

struct SweepRow {
  double epsilon = 0.0;
  int budget = 0;
  int dc_trials = 0;
  std::int64_t max_near_phase = 0;
  double mean_near_phase = 0.0;
  std::int64_t violations = 0;  // chosen orbits with near phase > budget + slack
};

/// log10(displacement) histogram per regime, bins of width 0.5 on [-20, 2).
struct DisplacementHistogram {
  static constexpr double kLow = -20.0;
  static constexpr double kWidth = 0.5;
  static constexpr std::size_t kBins = 44;
  std::array<std::array<std::int64_t, kBins>, 4> counts{};

  void add(Regime r, double displacement) {
    if (r == Regime::Unclassified || !(displacement > 0.0)) return;
    const double x = (std::log10(displacement) - kLow) / kWidth;
    const auto bin = static_cast<std::size_t>(std::clamp(x, 0.0, static_cast<double>(kBins - 1)));
    ++counts[static_cast<std::size_t>(r)][bin];
  }
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<ExperimentRow> rows;
  std::vector<DegreeSummary> summaries;
  ScalingFit fit;
  DisplacementAudit audit;
  DisplacementHistogram histogram;
  std::vector<SweepRow> sweep;
};

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

/// Least-squares slope of ln(total / ln^4 d) on ln d; raw_beta omits the division.
inline ScalingFit fit_scaling_exponent(std::span<const int> degrees,
                                       std::span<const double> median_totals) {
  ScalingFit fit;
  std::vector<double> xs, ys, raw;
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    if (!(median_totals[i] > 0.0)) continue;
    const double l = std::log(static_cast<double>(degrees[i]));
    xs.push_back(l);
    ys.push_back(std::log(median_totals[i]) - 4.0 * std::log(l));
    raw.push_back(std::log(median_totals[i]));
  }
  if (xs.size() < 2) return fit;
  auto slope = [&](const std::vector<double>& y, double* intercept) {
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (y[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    const double b = sxy / sxx;
    if (intercept) *intercept = my - b * mx;
    return b;
  };
  fit.beta = slope(ys, &fit.intercept);
  fit.raw_beta = slope(raw, nullptr);
  return fit;
}

/// Seed of trial t at degree d; independent of execution order.
inline std::uint64_t trial_seed(std::uint64_t master, int degree, int trial) {
  return derive_seed(master, static_cast<std::uint64_t>(degree), static_cast<std::uint64_t>(trial));
}

namespace detail {

inline ExperimentRow measure_trial(const Polynomial& p, const StartingGrid& grid, double epsilon,
                                   const ExperimentConfig& config, RootFindingReport& solved) {
  const auto roots = p.roots();
  const int d = p.degree();
  ExperimentRow row;
  row.degree = d;

  const ConditionReport cond = check_conditions(roots, config.eta, default_ac_constant(d));
  row.dc_holds = cond.dc_holds;
  row.dc_min = cond.dc_min_pairwise;
  row.ac_holds = cond.ac_holds;
  row.ac_fitted_cd = cond.ac_constant;

  SolveOptions so;
  so.eta = config.eta;
  so.workers = config.workers;
  so.record_chosen_traces = config.record_traces;
  solved = solve(p, grid, epsilon, so);

  row.total_iterations_chosen = solved.total_iterations_chosen;
  row.far_steps = solved.chosen_regime_steps[static_cast<std::size_t>(Regime::Far)];
  row.intermediate_steps = solved.chosen_regime_steps[static_cast<std::size_t>(Regime::Intermediate)];
  row.near_steps = solved.chosen_regime_steps[static_cast<std::size_t>(Regime::Near)];
  row.outside_steps = solved.chosen_regime_steps[static_cast<std::size_t>(Regime::Outside2Disk)];
  row.unresolved = solved.unresolved_count;
  row.outside_violations = solved.all_outside_violations;
  row.outside_steps_all = solved.all_regime_steps[static_cast<std::size_t>(Regime::Outside2Disk)];
  row.orbits_run = solved.orbits_run;
  row.min_floor_ratio = std::numeric_limits<double>::infinity();
  for (const ChosenStart& s : solved.chosen_starts) {
    row.max_near_phase = std::max(row.max_near_phase, s.near_phase_length);
    const auto floor = farfield_iteration_floor(d, s.start_modulus);
    if (floor > 0) {
      row.min_floor_ratio =
          std::min(row.min_floor_ratio, static_cast<double>(s.iterations) / static_cast<double>(floor));
      if (static_cast<double>(s.iterations) < slack::kFloorFraction * static_cast<double>(floor))
        ++row.floor_violations;
    }
  }
  return row;
}

}  // namespace detail

/// Near-phase lengths of chosen orbits at one degree across several epsilons.
/// The same root samples are reused for every epsilon; only DC trials count.
inline std::vector<SweepRow> epsilon_sweep(int degree, std::span<const double> epsilons, int trials,
                                           std::uint64_t seed, const ExperimentConfig& config) {
  std::vector<SweepRow> table;
  const StartingGrid grid = build_grid(degree, config.phase_seed, config.log_base);
  for (const double eps : epsilons) {
    SweepRow row;
    row.epsilon = eps;
    row.budget = quadratic_phase_budget(eps);
    std::int64_t near_sum = 0, chosen = 0;
    for (int t = 0; t < trials; ++t) {
      const auto roots = sample_roots(degree, trial_seed(seed, degree, t));
      if (!check_dc(roots, config.eta).holds) continue;
      ++row.dc_trials;
      SolveOptions so;
      so.eta = config.eta;
      so.workers = config.workers;
      const auto solved = solve(Polynomial::from_roots(roots), grid, eps, so);
      for (const ChosenStart& s : solved.chosen_starts) {
        row.max_near_phase = std::max(row.max_near_phase, s.near_phase_length);
        near_sum += s.near_phase_length;
        ++chosen;
        if (s.near_phase_length > row.budget + slack::kNearBudget) ++row.violations;
      }
    }
    row.mean_near_phase = chosen ? static_cast<double>(near_sum) / static_cast<double>(chosen) : 0.0;
    table.push_back(row);
  }
  return table;
}

/// For each degree and trial: sample roots, check AC/DC, solve, and record
/// per-regime step counts of the chosen orbits. The exponent fit uses the
/// median over DC-satisfying trials only.
inline ExperimentReport scaling_experiment(const ExperimentConfig& config) {
  if (config.degrees.empty()) throw InvalidArgument("no degrees given");
  if (!std::is_sorted(config.degrees.begin(), config.degrees.end()))
    throw InvalidArgument("degrees must be sorted ascending");
  for (const int d : config.degrees)
    if (d < 2) throw InvalidDegree(d);
  if (config.trials < 1) throw InvalidArgument("trials must be >= 1");

  ExperimentReport report;
  report.config = config;
  std::vector<OrbitTrace> audit_traces;
  std::vector<double> audit_cd;

  std::vector<double> medians;
  for (const int d : config.degrees) {
    const StartingGrid grid = build_grid(d, config.phase_seed, config.log_base);
    DegreeSummary summary;
    summary.degree = d;
    std::vector<double> totals, far, inter, near, outside;
    for (int t = 0; t < config.trials; ++t) {
      const std::uint64_t seed = trial_seed(config.seed, d, t);
      const Polynomial p = Polynomial::from_roots(sample_roots(d, seed));
      RootFindingReport solved;
      ExperimentRow row = detail::measure_trial(p, grid, config.epsilon, config, solved);
      row.trial = t;
      row.seed = seed;
      ++summary.trials;
      if (row.dc_holds) {
        ++summary.dc_trials;
        totals.push_back(static_cast<double>(row.total_iterations_chosen));
        far.push_back(static_cast<double>(row.far_steps));
        inter.push_back(static_cast<double>(row.intermediate_steps));
        near.push_back(static_cast<double>(row.near_steps));
        outside.push_back(static_cast<double>(row.outside_steps));
      }
      for (OrbitTrace& trace : solved.chosen_traces) {
        for (const OrbitStep& s : trace.steps)
          if (s.displacement) report.histogram.add(s.regime, *s.displacement);
        if (row.ac_holds) {
          audit_traces.push_back(std::move(trace));
          audit_cd.push_back(row.ac_fitted_cd);
        }
      }
      report.rows.push_back(row);
    }
    summary.median_total = median(totals);
    summary.median_far = median(far);
    summary.median_intermediate = median(inter);
    summary.median_near = median(near);
    summary.median_outside = median(outside);
    medians.push_back(summary.median_total);
    report.summaries.push_back(summary);
  }
  report.fit = fit_scaling_exponent(config.degrees, medians);
  report.audit = displacement_audit(audit_traces, audit_cd);

  const int sweep_trials = config.sweep_trials == 0 ? config.trials : config.sweep_trials;
  if (sweep_trials > 0 && !config.sweep_epsilons.empty())
    report.sweep = epsilon_sweep(config.sweep_degree, config.sweep_epsilons, sweep_trials,
                                 config.seed, config);
  return report;
}

}  // namespace newton_atlas
