// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.
// Seeds and tolerances are fixed here so the run is reproducible.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "newton_atlas/newton_atlas.hpp"

namespace na = newton_atlas;
using C = na::ComplexPoint;

namespace {

constexpr std::uint64_t kSeed = 1;
constexpr double kEpsilon = 1e-10;

// criterion 1
constexpr int kHitTrials = 100;
constexpr double kHitFraction = 0.99;
// criterion 2 and 6
constexpr int kScalingTrials = 20;
// criterion 3
constexpr int kSweepDegree = 20;
constexpr int kSweepTrials = 50;
// criterion 4
constexpr int kDcDegree = 100;
constexpr int kDcSeeds = 1000;
constexpr double kDcTarget = 0.9;
// criterion 5
constexpr int kDigitDegree = 20;
constexpr int kDigitSeeds = 100000;
// criterion 7
constexpr int kOracleMax = 8;
constexpr int kMinDistInstances = 100;
constexpr int kMinDistMaxDegree = 200;
constexpr int kFormPairs = 1000;
constexpr double kFormTolerance = 1e-8;
// criterion 8
constexpr int kFloorTrials = 50;
// criterion 9
constexpr double kR100 = 14.0;
constexpr double kR1000 = 7.5;

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& run) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = run();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::cout << fmt::format("criterion {}: {} {} | {} [{:.1f}s]", id, o.pass ? "PASS" : "FAIL", name, o.detail, secs)
            << std::endl;
}

na::ExperimentConfig base_config() {
  na::ExperimentConfig c;
  c.epsilon = kEpsilon;
  c.seed = kSeed;
  c.phase_seed = 1;
  c.workers = workers();
  c.record_traces = false;
  c.sweep_trials = -1;
  return c;
}

Outcome universal_hitting() {
  std::string detail;
  bool pass = true;
  for (const int d : {10, 20, 50}) {
    const auto grid = na::build_grid(d, 1);
    int resolved = 0;
    for (int t = 0; t < kHitTrials; ++t) {
      const auto p = na::Polynomial::from_roots(na::sample_roots(d, na::trial_seed(kSeed, d, t)));
      na::SolveOptions o;
      o.workers = workers();
      resolved += na::solve(p, grid, kEpsilon, o).unresolved_count == 0;
    }
    const double frac = static_cast<double>(resolved) / kHitTrials;
    pass &= frac >= kHitFraction;
    detail += fmt::format("d={}: {}/{} resolved; ", d, resolved, kHitTrials);
  }
  return {pass, detail + fmt::format("need >= {:.0f}% per degree", 100 * kHitFraction)};
}

na::ExperimentReport scaling_runs() {
  auto cfg = base_config();
  cfg.degrees = {10, 20, 40, 80, 160};
  cfg.trials = kScalingTrials;
  return na::scaling_experiment(cfg);
}

Outcome scaling_exponent(const na::ExperimentReport& r) {
  const bool pass = r.fit.beta >= na::slack::kBetaMin && r.fit.beta <= na::slack::kBetaMax;
  std::string medians;
  for (const auto& s : r.summaries) medians += fmt::format("{}:{} ", s.degree, s.median_total);
  return {pass, fmt::format("beta = {:.4f} (ln^4 d divided out), bracket [{}, {}]; raw log-log slope = {:.4f}; "
                            "median totals {}",
                            r.fit.beta, na::slack::kBetaMin, na::slack::kBetaMax, r.fit.raw_beta, medians)};
}

Outcome epsilon_sweep() {
  auto cfg = base_config();
  const std::vector<double> eps{1e-4, 1e-8, 1e-16};
  const auto rows = na::epsilon_sweep(kSweepDegree, eps, kSweepTrials, kSeed, cfg);
  std::int64_t violations = 0;
  std::string detail;
  for (const auto& r : rows) {
    violations += r.violations;
    detail += fmt::format("eps={:g}: max near phase {} (budget {}+{}), {} DC trials; ", r.epsilon,
                          r.max_near_phase, r.budget, na::slack::kNearBudget, r.dc_trials);
  }
  return {violations == 0, detail + fmt::format("violations = {}", violations)};
}

Outcome dc_monte_carlo() {
  int holds = 0;
  for (int i = 0; i < kDcSeeds; ++i)
    holds += na::check_dc(na::sample_roots(kDcDegree, na::derive_seed(kSeed, 0, i)), na::kDefaultEta).holds;
  const double p = static_cast<double>(holds) / kDcSeeds;
  const double need = kDcTarget - 3.0 * std::sqrt(kDcTarget * (1 - kDcTarget) / kDcSeeds);
  return {p >= need, fmt::format("P(DC) = {:.4f}, need >= {:.4f}", p, need)};
}

Outcome digit_tail() {
  const int alpha = na::digit_alpha(kDigitDegree);
  int tail = 0;
  for (int i = 0; i < kDigitSeeds; ++i)
    tail += na::digit_multiplicity_trial(kDigitDegree, na::derive_seed(kSeed, 1, i)) >= alpha;
  const double p = static_cast<double>(tail) / kDigitSeeds;
  const double bound = na::digit_tail_bound(kDigitDegree, alpha);
  const double sigma = std::sqrt(bound * (1 - bound) / kDigitSeeds);
  return {p <= bound + 3 * sigma,
          fmt::format("alpha = {}, P(max mult >= alpha) = {:.5f}, bound d/alpha! + 3 sigma = {:.5f}", alpha, p,
                      bound + 3 * sigma)};
}

Outcome outside_law(const na::ExperimentReport& r) {
  std::int64_t violations = 0, steps = 0;
  for (const auto& row : r.rows) {
    violations += row.outside_violations;
    steps += row.outside_steps_all;
  }
  return {violations == 0, fmt::format("{} violations over {} steps with |z| > 2", violations, steps)};
}

Outcome oracles() {
  int multiset_bad = 0;
  std::function<std::int64_t(int, int)> tuples = [&](int n, int r) -> std::int64_t {
    if (r == 1) return 1;
    std::int64_t total = 0;
    for (int first = 0; first <= n; ++first) total += tuples(n - first, r - 1);
    return total;
  };
  for (int n = 0; n <= kOracleMax; ++n)
    for (int r = 1; r <= kOracleMax; ++r) multiset_bad += na::multiset_count(n, r) != tuples(n, r);

  int mindist_bad = 0;
  na::SplitMix64 rng(kSeed);
  for (int inst = 0; inst < kMinDistInstances; ++inst) {
    const int d = 2 + static_cast<int>(rng.below(kMinDistMaxDegree - 1));
    const auto pts = na::sample_roots(d, na::derive_seed(kSeed, 2, inst));
    double brute = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = 0; j < i; ++j) brute = std::min(brute, std::abs(pts[i] - pts[j]));
    mindist_bad += na::min_pairwise_distance(pts) != brute;
  }

  int form_bad = 0;
  double worst = 0.0;
  for (int checked = 0, trial = 0; checked < kFormPairs; ++trial) {
    const int d = 2 + static_cast<int>(rng.below(19));
    const auto roots = na::sample_roots(d, na::derive_seed(kSeed, 3, trial));
    const C z = std::polar(3.0 * std::sqrt(rng.uniform()), rng.angle());
    if (na::scan_roots(roots, z).min_distance < 1e-3) continue;
    const auto p = na::Polynomial::from_roots(roots);
    const C a = na::try_newton_step_roots(p.roots(), z).z;
    const C b = na::try_newton_step_coeffs(p.coeffs(), z).z;
    const double rel = std::abs(a - b) / std::max(1.0, std::abs(a));
    worst = std::max(worst, rel);
    form_bad += rel > kFormTolerance;
    ++checked;
  }
  return {multiset_bad == 0 && mindist_bad == 0 && form_bad == 0,
          fmt::format("multiset mismatches {}, min-distance mismatches {}, form disagreements {} (worst rel {:.2e})",
                      multiset_bad, mindist_bad, form_bad, worst)};
}

Outcome farfield_floor() {
  auto cfg = base_config();
  cfg.degrees = {50, 100};
  cfg.trials = kFloorTrials;
  const auto r = na::scaling_experiment(cfg);
  std::int64_t violations = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& row : r.rows) {
    violations += row.floor_violations;
    worst = std::min(worst, row.min_floor_ratio);
  }
  return {violations == 0, fmt::format("{} violations; smallest length/floor ratio {:.3f} (need >= {})", violations,
                                       worst, na::slack::kFloorFraction)};
}

Outcome r_bound() {
  const double a = na::r_central_bound(100), b = na::r_central_bound(1000);
  return {a < kR100 && b < kR1000, fmt::format("R(100) = {:.4f} < {}, R(1000) = {:.4f} < {}", a, kR100, b, kR1000)};
}

}  // namespace

int main() {
  report(1, "universal hitting", universal_hitting);
  std::optional<na::ExperimentReport> scaling;
  report(2, "scaling exponent", [&] {
    scaling = scaling_runs();
    return scaling_exponent(*scaling);
  });
  report(3, "epsilon sweep near-phase budget", epsilon_sweep);
  report(4, "distance condition Monte Carlo", dc_monte_carlo);
  report(5, "digit multiplicity tail", digit_tail);
  report(6, "outside-2-disk displacement law", [&] {
    if (!scaling) return Outcome{false, "scaling runs did not complete"};
    return outside_law(*scaling);
  });
  report(7, "oracle equivalences", oracles);
  report(8, "far-field floor", farfield_floor);
  report(9, "R-bound sanity", r_bound);
  std::cout << fmt::format("{} of 9 criteria failed", failures) << std::endl;
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
