#pragma once

/**
 * @file complex_poly.hpp
 * @brief Monic complex polynomials, their evaluation, and the Newton map.
 *
 * A Polynomial carries its roots, its coefficients, or both. When roots are
 * known they are authoritative: the Newton map is evaluated through the
 * reciprocal sum
 *
 *     N_p(z) = z - 1 / sum_j 1/(z - a_j)
 *
 * which never forms p(z) and so cannot overflow for large degree. The
 * coefficient form uses simultaneous Horner evaluation of p and p'.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace newton_atlas {

using ComplexPoint = std::complex<double>;

inline bool is_finite(ComplexPoint z) noexcept {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// Coefficient expansion from roots is only offered up to this degree.
inline constexpr int kMaxExpansionDegree = 64;

/// Per-coefficient tolerance when both representations are given.
inline constexpr double kFormAgreementTolerance = 1e-8;

/// Roots may exceed the unit circle by this much (rounding in r*cos, r*sin).
inline constexpr double kUnitDiskSlack = 4.0 * std::numeric_limits<double>::epsilon();

/// Coefficients of prod_j (z - a_j), constant term first, leading term 1.
inline std::vector<ComplexPoint> expand_roots(std::span<const ComplexPoint> roots) {
  std::vector<ComplexPoint> c(roots.size() + 1, ComplexPoint{0.0, 0.0});
  c[0] = 1.0;
  std::size_t n = 0;
  for (const ComplexPoint a : roots) {
    // multiply the degree-n polynomial c by (z - a)
    c[n + 1] = c[n];
    for (std::size_t i = n; i > 0; --i) c[i] = c[i - 1] - a * c[i];
    c[0] = -a * c[0];
    ++n;
  }
  return c;
}

class Polynomial {
 public:
  static Polynomial from_roots(std::vector<ComplexPoint> roots) {
    if (roots.empty()) throw InvalidPolynomial("polynomial needs at least one root");
    check_roots(roots);
    Polynomial p;
    p.degree_ = static_cast<int>(roots.size());
    if (p.degree_ <= kMaxExpansionDegree) p.coeffs_ = expand_roots(roots);
    p.roots_ = std::move(roots);
    return p;
  }

  static Polynomial from_coeffs(std::vector<ComplexPoint> coeffs) {
    check_coeffs(coeffs);
    Polynomial p;
    p.degree_ = static_cast<int>(coeffs.size()) - 1;
    p.coeffs_ = std::move(coeffs);
    return p;
  }

  /// Both forms given; coefficients must match the root expansion.
  static Polynomial from_both(std::vector<ComplexPoint> coeffs, std::vector<ComplexPoint> roots) {
    check_coeffs(coeffs);
    check_roots(roots);
    if (coeffs.size() != roots.size() + 1)
      throw InvalidPolynomial("coeffs has " + std::to_string(coeffs.size()) + " entries but " +
                              std::to_string(roots.size()) + " roots were given");
    const auto expanded = expand_roots(roots);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      const double scale = std::max(std::abs(expanded[i]), 1.0);
      if (std::abs(coeffs[i] - expanded[i]) > kFormAgreementTolerance * scale)
        throw InvalidPolynomial("coeffs[" + std::to_string(i) +
                                "] disagrees with the expansion of the roots");
    }
    Polynomial p;
    p.degree_ = static_cast<int>(roots.size());
    p.coeffs_ = std::move(coeffs);
    p.roots_ = std::move(roots);
    return p;
  }

  int degree() const noexcept { return degree_; }
  bool has_roots() const noexcept { return roots_.has_value(); }
  bool has_coeffs() const noexcept { return coeffs_.has_value(); }

  std::span<const ComplexPoint> roots() const {
    if (!roots_) throw Error("polynomial has no root representation");
    return *roots_;
  }
  std::span<const ComplexPoint> coeffs() const {
    if (!coeffs_) throw Error("polynomial has no coefficient representation");
    return *coeffs_;
  }

  /// Sum of the roots, from the roots or from -c_{d-1}.
  ComplexPoint root_sum() const {
    if (roots_) {
      ComplexPoint s{0.0, 0.0};
      for (const auto a : *roots_) s += a;
      return s;
    }
    return -(*coeffs_)[static_cast<std::size_t>(degree_) - 1];
  }

 private:
  Polynomial() = default;

  static void check_roots(std::span<const ComplexPoint> roots) {
    for (std::size_t i = 0; i < roots.size(); ++i) {
      if (!is_finite(roots[i]))
        throw InvalidPolynomial("roots[" + std::to_string(i) + "] is not finite");
      if (std::abs(roots[i]) > 1.0 + kUnitDiskSlack)
        throw InvalidPolynomial("roots[" + std::to_string(i) + "] lies outside the unit disk");
    }
  }

  static void check_coeffs(std::span<const ComplexPoint> coeffs) {
    if (coeffs.size() < 2) throw InvalidPolynomial("coeffs must have at least 2 entries");
    for (std::size_t i = 0; i < coeffs.size(); ++i)
      if (!is_finite(coeffs[i]))
        throw InvalidPolynomial("coeffs[" + std::to_string(i) + "] is not finite");
    if (coeffs.back() != ComplexPoint{1.0, 0.0})
      throw InvalidPolynomial("leading coefficient must be exactly 1 (monic)");
  }

  int degree_ = 0;
  std::optional<std::vector<ComplexPoint>> coeffs_;
  std::optional<std::vector<ComplexPoint>> roots_;
};

struct Evaluation {
  ComplexPoint value;
  ComplexPoint derivative;
};

/// Simultaneous Horner evaluation of p and p'.
inline Evaluation evaluate_coeffs(std::span<const ComplexPoint> coeffs, ComplexPoint z) {
  ComplexPoint p = coeffs.back();
  ComplexPoint dp{0.0, 0.0};
  for (std::size_t i = coeffs.size() - 1; i-- > 0;) {
    dp = dp * z + p;
    p = p * z + coeffs[i];
  }
  if (!is_finite(p) || !is_finite(dp))
    throw EvaluationOverflow("coefficient-form evaluation overflowed; use root form");
  return {p, dp};
}

/// One pass over the roots: sum of 1/(z - a_j) plus the nearest root.
struct RootScan {
  ComplexPoint reciprocal_sum{0.0, 0.0};
  double min_distance = std::numeric_limits<double>::infinity();
  std::size_t nearest = 0;
  bool at_root = false;
};

inline RootScan scan_roots(std::span<const ComplexPoint> roots, ComplexPoint z) noexcept {
  RootScan scan;
  double sr = 0.0, si = 0.0;
  double best = std::numeric_limits<double>::infinity();
  const double zr = z.real(), zi = z.imag();
  for (std::size_t j = 0; j < roots.size(); ++j) {
    const double dx = zr - roots[j].real();
    const double dy = zi - roots[j].imag();
    const double n2 = dx * dx + dy * dy;
    if (n2 < best) {
      best = n2;
      scan.nearest = j;
    }
    if (n2 == 0.0) {
      scan.at_root = true;
      continue;
    }
    sr += dx / n2;
    si -= dy / n2;
  }
  scan.reciprocal_sum = {sr, si};
  scan.min_distance = std::abs(z - roots[scan.nearest]);
  if (scan.min_distance == 0.0) scan.at_root = true;
  return scan;
}

/// log|p(z)|, arg p(z) and p'/p, accumulated without forming p itself.
struct LogEvaluation {
  double log_abs = 0.0;
  double arg = 0.0;
  ComplexPoint log_derivative{0.0, 0.0};
  bool at_root = false;
};

inline LogEvaluation evaluate_roots_log(std::span<const ComplexPoint> roots, ComplexPoint z) {
  LogEvaluation out;
  for (const auto a : roots) {
    const ComplexPoint w = z - a;
    if (w == ComplexPoint{0.0, 0.0}) {
      out.at_root = true;
      continue;
    }
    out.log_abs += std::log(std::abs(w));
    out.arg += std::arg(w);
    out.log_derivative += 1.0 / w;
  }
  out.arg = std::remainder(out.arg, 2.0 * std::numbers::pi);
  return out;
}

/// p(z) and p'(z) from the roots. At a root, p' is the product over the other roots.
inline Evaluation evaluate_roots(std::span<const ComplexPoint> roots, ComplexPoint z) {
  const LogEvaluation le = evaluate_roots_log(roots, z);
  if (le.at_root) {
    std::size_t zeros = 0;
    ComplexPoint rest{1.0, 0.0};
    for (const auto a : roots) {
      if (z == a)
        ++zeros;
      else
        rest *= z - a;
    }
    return {ComplexPoint{0.0, 0.0}, zeros == 1 ? rest : ComplexPoint{0.0, 0.0}};
  }
  if (le.log_abs > std::log(std::numeric_limits<double>::max()))
    throw EvaluationOverflow("|p(z)| exceeds double range; use evaluate_roots_log");
  const ComplexPoint p = std::polar(std::exp(le.log_abs), le.arg);
  return {p, p * le.log_derivative};
}

/// p(z) and p'(z); root form is used when available.
inline Evaluation evaluate(const Polynomial& p, ComplexPoint z) {
  return p.has_roots() ? evaluate_roots(p.roots(), z) : evaluate_coeffs(p.coeffs(), z);
}

enum class StepStatus { Ok, AtRoot, CriticalPoint };

struct StepResult {
  ComplexPoint z;
  StepStatus status = StepStatus::Ok;
};

inline StepResult try_newton_step_roots(std::span<const ComplexPoint> roots, ComplexPoint z) {
  const RootScan scan = scan_roots(roots, z);
  if (scan.at_root) return {z, StepStatus::AtRoot};
  if (scan.reciprocal_sum == ComplexPoint{0.0, 0.0}) return {z, StepStatus::CriticalPoint};
  return {z - 1.0 / scan.reciprocal_sum, StepStatus::Ok};
}

inline StepResult try_newton_step_coeffs(std::span<const ComplexPoint> coeffs, ComplexPoint z) {
  const Evaluation e = evaluate_coeffs(coeffs, z);
  if (e.value == ComplexPoint{0.0, 0.0}) return {z, StepStatus::AtRoot};
  if (e.derivative == ComplexPoint{0.0, 0.0}) return {z, StepStatus::CriticalPoint};
  return {z - e.value / e.derivative, StepStatus::Ok};
}

inline StepResult try_newton_step(const Polynomial& p, ComplexPoint z) {
  return p.has_roots() ? try_newton_step_roots(p.roots(), z)
                       : try_newton_step_coeffs(p.coeffs(), z);
}

/// N_p(z). Roots are fixed points; throws CriticalPoint where p' vanishes.
inline ComplexPoint newton_step(const Polynomial& p, ComplexPoint z) {
  const StepResult r = try_newton_step(p, z);
  if (r.status == StepStatus::CriticalPoint)
    throw CriticalPoint("p'(z) = 0 at a non-root");
  return r.z;
}

/// Affine map the Newton map approaches as |z| grows: contraction by (d-1)/d
/// toward the root centroid c, i.e. ((d-1)/d) z + c/d.
inline ComplexPoint farfield_linearization(const Polynomial& p, ComplexPoint z) {
  const double d = p.degree();
  const ComplexPoint centroid = p.root_sum() / d;
  return ((d - 1.0) / d) * (z - centroid) + centroid;
}

}  // namespace newton_atlas
