#pragma once

/**
 * @file orbit.hpp
 * @brief Newton orbits with per-step dyadic distance bins and regime tags.
 *
 * A point z sits in bin S_k when its distance to the nearest root lies in
 * (2^-(k+1), 2^-k]. The bin index determines the regime:
 *
 *   Far           2^-k >= 1/d
 *   Intermediate  1/(8 d^(2+eta)) <= 2^-k < 1/d
 *   Near          2^-k < 1/(8 d^(2+eta))
 *
 * and any point with |z| > 2 is tagged Outside2Disk regardless of k.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "complex_poly.hpp"
#include "errors.hpp"
#include "rng.hpp"
#include "starting_grid.hpp"

namespace newton_atlas {

inline constexpr double kDefaultEta = 0.25;
inline constexpr std::size_t kDefaultStepCap = 1'000'000;
inline constexpr double kJitterScale = 1e-12;
inline constexpr double kMaxEpsilon = 1e-2;
/// Orbits leaving D_{factor * R}(0) are declared divergent.
inline constexpr double kDivergenceFactor = 4.0;
/// Consecutive small steps required to accept convergence without known roots.
inline constexpr int kSmallStepRun = 3;

enum class Regime : int { Far = 0, Intermediate, Near, Outside2Disk, Unclassified };
inline constexpr std::size_t kRegimeCount = 5;

constexpr std::string_view to_string(Regime r) noexcept {
  switch (r) {
    case Regime::Far: return "far";
    case Regime::Intermediate: return "intermediate";
    case Regime::Near: return "near";
    case Regime::Outside2Disk: return "outside";
    case Regime::Unclassified: return "unclassified";
  }
  return "?";
}

enum class Outcome { Converged, Diverged, Stalled, CriticalFailure };

constexpr std::string_view to_string(Outcome o) noexcept {
  switch (o) {
    case Outcome::Converged: return "converged";
    case Outcome::Diverged: return "diverged";
    case Outcome::Stalled: return "stalled";
    case Outcome::CriticalFailure: return "critical_failure";
  }
  return "?";
}

/// k with distance in (2^-(k+1), 2^-k]; distance must be positive and finite.
inline int sk_index(double distance) {
  int e = 0;
  const double mantissa = std::frexp(distance, &e);  // distance = mantissa * 2^e, mantissa in [0.5, 1)
  return mantissa == 0.5 ? 1 - e : -e;
}

inline int classify_sk(ComplexPoint z, std::span<const ComplexPoint> roots) {
  if (roots.empty()) throw InvalidArgument("classify_sk needs at least one root");
  double best = std::numeric_limits<double>::infinity();
  for (const auto a : roots) best = std::min(best, std::abs(z - a));
  if (best == 0.0) throw NotClassifiable("point coincides with a root");
  return sk_index(best);
}

inline double near_case_threshold(int degree, double eta) {
  if (degree < 2) throw InvalidDegree(degree);
  if (!(eta >= 0.0)) throw InvalidArgument("eta must be non-negative");
  return 1.0 / (8.0 * std::pow(static_cast<double>(degree), 2.0 + eta));
}

inline Regime regime_for(int k, int degree, double eta, double modulus) {
  if (modulus > 2.0) return Regime::Outside2Disk;
  const double scale = std::ldexp(1.0, -k);
  if (scale >= 1.0 / degree) return Regime::Far;
  if (scale < near_case_threshold(std::max(degree, 2), eta)) return Regime::Near;
  return Regime::Intermediate;
}

/// ceil(log2 |log2 eps - 5|): iterations that suffice once the orbit is Near.
inline int quadratic_phase_budget(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must lie in (0, 1)");
  return static_cast<int>(std::ceil(std::log2(std::abs(std::log2(epsilon) - 5.0))));
}

/// Lower bound on |z_n - z_{n+1}| for z_n in S_K. Outside D_2(0) this is 1/d;
/// inside it is 1 / ((1 + 2 C_d) 2^(K+1) + 16 pi C_d d) under the area condition.
inline double displacement_lower_bound(int degree, int k, double c_d, bool outside_2disk) {
  if (degree < 1) throw InvalidDegree(degree);
  if (outside_2disk) return 1.0 / degree;
  if (k < -2) throw InvalidArgument("inside D_2(0) the bin index K is at least -2");
  if (!(c_d > 0.0)) throw InvalidArgument("C_d must be positive");
  return 1.0 / ((1.0 + 2.0 * c_d) * std::ldexp(1.0, k + 1) +
                16.0 * std::numbers::pi * c_d * degree);
}

/// ceil(10 d^2 ln^4 d) + d * quadratic_phase_budget(eps).
inline std::int64_t default_max_iter(int degree, double epsilon) {
  const double d = degree;
  const double l = std::log(d);
  return static_cast<std::int64_t>(std::ceil(10.0 * d * d * l * l * l * l)) +
         static_cast<std::int64_t>(degree) * quadratic_phase_budget(epsilon);
}

struct OrbitStep {
  ComplexPoint z;
  std::optional<int> k_index;
  Regime regime = Regime::Unclassified;
  std::optional<double> displacement;  // none on the last step
};

struct OrbitOptions {
  double eta = kDefaultEta;
  std::int64_t max_iter = 0;  // 0 selects default_max_iter
  bool record_steps = true;
  std::size_t step_cap = kDefaultStepCap;
  std::uint64_t jitter_seed = 0;
};

struct OrbitTrace {
  int degree = 0;
  ComplexPoint start;
  double eta = kDefaultEta;
  Outcome outcome = Outcome::Stalled;
  std::int64_t iterations = 0;
  ComplexPoint final_z;
  std::optional<std::size_t> root_index;

  std::vector<OrbitStep> steps;
  bool truncated = false;  // step storage hit the cap; counters still complete

  std::array<std::int64_t, kRegimeCount> regime_steps{};
  std::array<double, kRegimeCount> min_displacement = [] {
    std::array<double, kRegimeCount> a{};
    a.fill(std::numeric_limits<double>::infinity());
    return a;
  }();
  /// Steps with |z_n| > 2 whose displacement is not > 1/d.
  std::int64_t outside_violations = 0;
  /// Index n of the first Near-tagged z_n.
  std::optional<std::int64_t> first_near;

  bool jittered = false;
  std::string diagnostic;

  std::int64_t steps_in(Regime r) const noexcept {
    return regime_steps[static_cast<std::size_t>(r)];
  }

  /// Iterations from first entering Near until termination.
  std::int64_t near_phase_length() const noexcept {
    return first_near ? iterations - *first_near : 0;
  }
};

namespace detail {

struct OrbitRecorder {
  OrbitTrace& trace;
  const OrbitOptions& options;

  void step(ComplexPoint z, std::optional<int> k, Regime regime, double displacement) {
    const auto slot = static_cast<std::size_t>(regime);
    ++trace.regime_steps[slot];
    trace.min_displacement[slot] = std::min(trace.min_displacement[slot], displacement);
    if (regime == Regime::Outside2Disk && !(displacement > 1.0 / trace.degree))
      ++trace.outside_violations;
    push({z, k, regime, displacement});
  }

  void last(ComplexPoint z, std::optional<int> k, Regime regime) { push({z, k, regime, {}}); }

 private:
  void push(OrbitStep s) {
    if (!options.record_steps) return;
    if (trace.steps.size() >= options.step_cap) {
      trace.truncated = true;
      return;
    }
    trace.steps.push_back(s);
  }
};

inline ComplexPoint jitter(ComplexPoint z, std::uint64_t seed) {
  SplitMix64 rng(seed);
  return z + std::polar(kJitterScale * (1.0 + std::abs(z)), rng.angle());
}

}  // namespace detail

/// Iterates N_p from z0 until epsilon-convergence, divergence, or max_iter.
///
/// With known roots, convergence means the nearest root is closer than
/// epsilon. Without them, three consecutive steps shorter than
/// epsilon * (1 + |z|) are required. A critical point is jittered once by
/// 1e-12 (1 + |z|) in a seeded direction; a second one ends the orbit with
/// Outcome::CriticalFailure.
inline OrbitTrace run_orbit(const Polynomial& p, ComplexPoint z0, double epsilon,
                            const OrbitOptions& options = {}) {
  if (!(epsilon > 0.0 && epsilon <= kMaxEpsilon))
    throw InvalidArgument("epsilon must lie in (0, 1e-2]");
  const int d = p.degree();
  const std::int64_t max_iter =
      options.max_iter > 0 ? options.max_iter : default_max_iter(std::max(d, 2), epsilon);
  const double escape = kDivergenceFactor * r_central_bound(std::max(d, 2));

  OrbitTrace trace;
  trace.degree = d;
  trace.start = z0;
  trace.eta = options.eta;
  detail::OrbitRecorder rec{trace, options};

  ComplexPoint z = z0;
  std::int64_t n = 0;

  auto finish = [&](Outcome o) {
    trace.outcome = o;
    trace.iterations = n;
    trace.final_z = z;
    return trace;
  };
  auto critical = [&]() -> bool {
    if (trace.jittered) {
      trace.diagnostic = "critical point hit twice; orbit aborted";
      return false;
    }
    trace.jittered = true;
    trace.diagnostic = "critical point at iteration " + std::to_string(n) + "; jittered";
    z = detail::jitter(z, options.jitter_seed);
    return true;
  };

  if (p.has_roots()) {
    const auto roots = p.roots();
    for (;;) {
      if (!is_finite(z)) return finish(Outcome::Diverged);
      const RootScan scan = scan_roots(roots, z);
      if (scan.at_root || scan.min_distance < epsilon) {
        trace.root_index = scan.nearest;
        if (scan.at_root)
          rec.last(z, {}, Regime::Unclassified);
        else {
          const int k = sk_index(scan.min_distance);
          rec.last(z, k, regime_for(k, d, options.eta, std::abs(z)));
        }
        return finish(Outcome::Converged);
      }
      const int k = sk_index(scan.min_distance);
      const double modulus = std::abs(z);
      const Regime regime = regime_for(k, d, options.eta, modulus);
      if (modulus > escape) {
        rec.last(z, k, regime);
        return finish(Outcome::Diverged);
      }
      if (n >= max_iter) {
        rec.last(z, k, regime);
        return finish(Outcome::Stalled);
      }
      if (scan.reciprocal_sum == ComplexPoint{0.0, 0.0}) {
        if (critical()) continue;
        rec.last(z, k, regime);
        return finish(Outcome::CriticalFailure);
      }
      const ComplexPoint next = z - 1.0 / scan.reciprocal_sum;
      if (regime == Regime::Near && !trace.first_near) trace.first_near = n;
      rec.step(z, k, regime, std::abs(next - z));
      z = next;
      ++n;
    }
  }

  const auto coeffs = p.coeffs();
  int small_run = 0;
  for (;;) {
    if (!is_finite(z)) return finish(Outcome::Diverged);
    const double modulus = std::abs(z);
    const Regime regime = modulus > 2.0 ? Regime::Outside2Disk : Regime::Unclassified;
    if (small_run >= kSmallStepRun) {
      rec.last(z, {}, regime);
      return finish(Outcome::Converged);
    }
    if (modulus > escape) {
      rec.last(z, {}, regime);
      return finish(Outcome::Diverged);
    }
    if (n >= max_iter) {
      rec.last(z, {}, regime);
      return finish(Outcome::Stalled);
    }
    StepResult r;
    try {
      r = try_newton_step_coeffs(coeffs, z);
    } catch (const EvaluationOverflow& e) {
      trace.diagnostic = e.what();
      rec.last(z, {}, regime);
      return finish(Outcome::Diverged);
    }
    if (r.status == StepStatus::AtRoot) {
      rec.last(z, {}, regime);
      return finish(Outcome::Converged);
    }
    if (r.status == StepStatus::CriticalPoint) {
      if (critical()) continue;
      rec.last(z, {}, regime);
      return finish(Outcome::CriticalFailure);
    }
    const double displacement = std::abs(r.z - z);
    small_run = displacement < epsilon * (1.0 + modulus) ? small_run + 1 : 0;
    rec.step(z, {}, regime, displacement);
    z = r.z;
    ++n;
  }
}

}  // namespace newton_atlas
