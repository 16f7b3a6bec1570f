#pragma once

/**
 * @file ensemble.hpp
 * @brief Random root ensembles and the conditions that make them "typical".
 *
 * Roots are sampled i.i.d. uniformly in the unit disk. Sampling ordered roots
 * also samples the unordered model (the quotient by permutations of the
 * roots), so there is a single sampler.
 *
 * Distance condition (DC): min pairwise root distance >= d^-(1+eta).
 * Area condition (AC): a disk of area A holds at most C_d d A roots when
 * A >= 1/d, and at most C_d otherwise. AC quantifies over all disks, so it is
 * certified on two finite families instead: the equal-area partition of the
 * disk into (2k+1)^2 pieces (a central disk plus annuli cut into 8s sectors)
 * and axis-aligned square grids of side 2^j / sqrt d, each square being
 * charged against its circumscribed disk.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "complex_poly.hpp"
#include "errors.hpp"
#include "rng.hpp"

namespace newton_atlas {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// d points i.i.d. uniform on the unit disk: radius sqrt(u), uniform angle.
inline std::vector<ComplexPoint> sample_roots(int degree, std::uint64_t seed) {
  if (degree < 1) throw InvalidDegree(degree);
  SplitMix64 rng(seed);
  std::vector<ComplexPoint> roots;
  roots.reserve(static_cast<std::size_t>(degree));
  for (int i = 0; i < degree; ++i) {
    const double r = std::sqrt(rng.uniform());
    roots.push_back(std::polar(r, rng.angle()));
  }
  return roots;
}

// ---------------------------------------------------------------------------
// Distance condition
// ---------------------------------------------------------------------------

/// Exact minimum pairwise distance using grid buckets. A pass with cell size
/// h finds every pair closer than h; if the best pair found is longer than h
/// the pass is repeated with h set to that distance, which is then exact.
inline double min_pairwise_distance(std::span<const ComplexPoint> points) {
  const std::size_t n = points.size();
  if (n < 2) return std::numeric_limits<double>::infinity();
  double lo_x = points[0].real(), hi_x = lo_x, lo_y = points[0].imag(), hi_y = lo_y;
  for (const auto z : points) {
    lo_x = std::min(lo_x, z.real());
    hi_x = std::max(hi_x, z.real());
    lo_y = std::min(lo_y, z.imag());
    hi_y = std::max(hi_y, z.imag());
  }
  const double extent = std::max(hi_x - lo_x, hi_y - lo_y);
  if (extent == 0.0) return 0.0;

  struct Hash {
    std::size_t operator()(const std::pair<std::int64_t, std::int64_t>& c) const noexcept {
      return std::hash<std::int64_t>{}(c.first * 0x9e3779b97f4a7c15LL ^ c.second);
    }
  };

  double cell = extent / std::ceil(std::sqrt(static_cast<double>(n)));
  for (;;) {
    std::unordered_map<std::pair<std::int64_t, std::int64_t>, std::vector<std::size_t>, Hash> cells;
    cells.reserve(n);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const auto cx = static_cast<std::int64_t>(std::floor((points[i].real() - lo_x) / cell));
      const auto cy = static_cast<std::int64_t>(std::floor((points[i].imag() - lo_y) / cell));
      for (std::int64_t dx = -1; dx <= 1; ++dx)
        for (std::int64_t dy = -1; dy <= 1; ++dy) {
          const auto it = cells.find({cx + dx, cy + dy});
          if (it == cells.end()) continue;
          for (const std::size_t j : it->second) best = std::min(best, std::abs(points[i] - points[j]));
        }
      cells[{cx, cy}].push_back(i);
    }
    if (best <= cell) return best;
    cell = std::isfinite(best) ? best : 4.0 * cell;
  }
}

struct DcResult {
  bool holds = false;
  double min_pairwise = 0.0;
};

inline double dc_threshold(int degree, double eta) {
  return std::pow(static_cast<double>(degree), -(1.0 + eta));
}

inline DcResult check_dc(std::span<const ComplexPoint> roots, double eta) {
  if (roots.size() < 2) throw InvalidArgument("DC needs at least two roots");
  DcResult r;
  r.min_pairwise = min_pairwise_distance(roots);
  r.holds = r.min_pairwise >= dc_threshold(static_cast<int>(roots.size()), eta);
  return r;
}

/// exp(-d^2 r^2), a lower bound on P(min distance >= r); valid while d r^2 < 1/2.
inline double dc_probability_bound(int degree, double r) {
  const double d = degree;
  if (!(d * r * r < 0.5))
    throw OutOfValidityRange("dc_probability_bound needs d r^2 < 1/2");
  return std::max(std::exp(-d * d * r * r), 0.0);
}

// ---------------------------------------------------------------------------
// Area condition
// ---------------------------------------------------------------------------

/// The equal-area partition used to certify AC: (2k+1)^2 pieces, k minimal with
/// (2k+1)^2 >= d. Piece 0 is the disk of radius 1/(2k+1); annulus s (1..k)
/// spans radii (2s-1)/(2k+1)..(2s+1)/(2k+1) and is cut into 8s sectors.
class DiskPartition {
 public:
  explicit DiskPartition(int degree) {
    if (degree < 1) throw InvalidDegree(degree);
    while ((2 * rings_ + 1) * (2 * rings_ + 1) < degree) ++rings_;
    r0_ = 1.0 / (2.0 * rings_ + 1.0);
  }

  int rings() const noexcept { return rings_; }
  std::size_t pieces() const noexcept {
    return static_cast<std::size_t>((2 * rings_ + 1) * (2 * rings_ + 1));
  }
  double piece_area() const noexcept { return std::numbers::pi * r0_ * r0_; }

  std::size_t piece_of(ComplexPoint z) const noexcept {
    const double rho = std::abs(z);
    if (rho < r0_ || rings_ == 0) return 0;
    int s = static_cast<int>(std::floor((rho / r0_ + 1.0) / 2.0));
    s = std::clamp(s, 1, rings_);
    double theta = std::arg(z);
    if (theta < 0.0) theta += 2.0 * std::numbers::pi;
    const int sectors = 8 * s;
    int sector = static_cast<int>(std::floor(theta / (2.0 * std::numbers::pi) * sectors));
    sector = std::clamp(sector, 0, sectors - 1);
    return static_cast<std::size_t>(1 + 4 * s * (s - 1) + sector);
  }

  std::vector<std::int64_t> counts(std::span<const ComplexPoint> points) const {
    std::vector<std::int64_t> c(pieces(), 0);
    for (const auto z : points) ++c[piece_of(z)];
    return c;
  }

 private:
  int rings_ = 0;
  double r0_ = 1.0;
};

struct AcResult {
  bool holds = false;
  std::int64_t max_count_per_piece = 0;  // partition family
  double square_constant = 0.0;          // smallest C_d satisfying the square family
  double fitted_constant = 0.0;          // smallest C_d satisfying both families
};

/// Largest j in the square family: sides 2^j / sqrt d for j = 0..ceil(log2(2 sqrt d)).
inline int ac_square_levels(int degree) {
  return static_cast<int>(std::ceil(std::log2(2.0 * std::sqrt(static_cast<double>(degree)))));
}

inline AcResult check_ac(std::span<const ComplexPoint> roots, double c_d) {
  if (roots.empty()) throw InvalidArgument("AC needs at least one root");
  if (!(c_d > 0.0)) throw InvalidArgument("C_d must be positive");
  const int d = static_cast<int>(roots.size());
  AcResult r;

  const DiskPartition partition(d);
  const auto piece_counts = partition.counts(roots);
  r.max_count_per_piece = *std::max_element(piece_counts.begin(), piece_counts.end());

  const double root_d = std::sqrt(static_cast<double>(d));
  for (int j = 0; j <= ac_square_levels(d); ++j) {
    const double side = std::ldexp(1.0, j) / root_d;
    const auto per_axis = static_cast<std::int64_t>(std::ceil(2.0 / side));
    std::unordered_map<std::int64_t, std::int64_t> counts;
    for (const auto z : roots) {
      const auto cx = std::clamp<std::int64_t>(
          static_cast<std::int64_t>(std::floor((z.real() + 1.0) / side)), 0, per_axis - 1);
      const auto cy = std::clamp<std::int64_t>(
          static_cast<std::int64_t>(std::floor((z.imag() + 1.0) / side)), 0, per_axis - 1);
      ++counts[cx * per_axis + cy];
    }
    // circumscribed disk of a square of side x has area pi x^2 / 2
    const double area = std::numbers::pi * side * side / 2.0;
    const double allowance = area >= 1.0 / d ? d * area : 1.0;
    for (const auto& [cell, count] : counts)
      r.square_constant = std::max(r.square_constant, static_cast<double>(count) / allowance);
  }
  r.fitted_constant = std::max(static_cast<double>(r.max_count_per_piece), r.square_constant);
  r.holds = r.fitted_constant <= c_d;
  return r;
}

/// 3 ln d: the ceiling used for C_d (the asymptotic O(log d) has no explicit constant).
inline double default_ac_constant(int degree) {
  return 3.0 * std::log(static_cast<double>(std::max(degree, 2)));
}

struct ConditionReport {
  bool ac_holds = false;
  std::int64_t ac_max_count_per_cell = 0;
  double ac_constant = 0.0;  // fitted C_d
  bool dc_holds = false;
  double dc_min_pairwise = 0.0;
  double eta = 0.0;
};

inline ConditionReport check_conditions(std::span<const ComplexPoint> roots, double eta,
                                        double c_d) {
  const AcResult ac = check_ac(roots, c_d);
  const DcResult dc = check_dc(roots, eta);
  return {ac.holds, ac.max_count_per_piece, ac.fitted_constant, dc.holds, dc.min_pairwise, eta};
}

// ---------------------------------------------------------------------------
// Base-d digit strings
// ---------------------------------------------------------------------------

inline int max_digit_multiplicity(std::span<const int> digits, int base) {
  std::vector<int> counts(static_cast<std::size_t>(base), 0);
  int best = 0;
  for (const int digit : digits) {
    if (digit < 0 || digit >= base) throw InvalidArgument("digit out of range for base");
    best = std::max(best, ++counts[static_cast<std::size_t>(digit)]);
  }
  return best;
}

/// Max multiplicity of a uniformly random d-digit base-d string.
inline int digit_multiplicity_trial(int degree, std::uint64_t seed) {
  if (degree < 2) throw InvalidDegree(degree);
  SplitMix64 rng(seed);
  std::vector<int> digits(static_cast<std::size_t>(degree));
  for (auto& digit : digits) digit = static_cast<int>(rng.below(static_cast<std::uint64_t>(degree)));
  return max_digit_multiplicity(digits, degree);
}

/// The alpha with (alpha-1)! < d^2 <= alpha!.
inline int digit_alpha(int degree) {
  const BigInt target = BigInt(degree) * degree;
  BigInt factorial = 1;
  int alpha = 1;
  while (factorial < target) factorial *= ++alpha;
  return alpha;
}

/// d / alpha!: bound on P(some digit repeats at least alpha times).
inline double digit_tail_bound(int degree, int alpha) {
  BigInt factorial = 1;
  for (int i = 2; i <= alpha; ++i) factorial *= i;
  return static_cast<double>(BigRational(degree, factorial));
}

// ---------------------------------------------------------------------------
// Multisets
// ---------------------------------------------------------------------------

inline BigInt binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigInt result = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    result *= n - k + i;
    result /= i;
  }
  return result;
}

/// Number of (x_0..x_{r-1}) in Z>=0 summing to n: C(n + r - 1, r - 1).
inline BigInt multiset_count(std::int64_t n, std::int64_t r) {
  if (n < 0 || r < 1) throw InvalidArgument("multiset_count needs n >= 0 and r >= 1");
  return binomial(n + r - 1, r - 1);
}

/// d C(2d-alpha-1, d-1) / C(2d-1, d-1): bound on the probability that an
/// unordered d-digit base-d string has a digit repeated at least alpha times.
inline double multiset_tail_exact(int degree, int alpha) {
  if (degree < 1 || alpha < 1 || alpha > degree)
    throw InvalidArgument("multiset tail needs 1 <= alpha <= d");
  const BigRational ratio(BigInt(degree) * binomial(2 * degree - alpha - 1, degree - 1),
                          binomial(2 * degree - 1, degree - 1));
  return static_cast<double>(ratio);
}

/// d (1/2)^(alpha-1) d / (2d - 1).
inline double multiset_tail_simplified(int degree, int alpha) {
  const double d = degree;
  return d * std::ldexp(1.0, -(alpha - 1)) * d / (2.0 * d - 1.0);
}

// ---------------------------------------------------------------------------
// Monte Carlo trials
// ---------------------------------------------------------------------------

struct VerifyRow {
  std::uint64_t seed = 0;
  bool dc_holds = false;
  double dc_min = 0.0;
  bool ac_holds = false;
  double ac_fitted_cd = 0.0;
  int digit_max_mult = 0;
};

/// One row per trial. Trial i uses derive_seed(master, 0, i) for the roots and
/// derive_seed(master, 1, i) for the digit string.
inline std::vector<VerifyRow> condition_trials(int degree, int trials, double eta,
                                               std::uint64_t master_seed) {
  if (degree < 2) throw InvalidDegree(degree);
  if (trials < 1) throw InvalidArgument("trials must be >= 1");
  if (!(eta > 0.0)) throw InvalidArgument("eta must be positive");
  std::vector<VerifyRow> rows;
  rows.reserve(static_cast<std::size_t>(trials));
  const double c_d = default_ac_constant(degree);
  for (int i = 0; i < trials; ++i) {
    VerifyRow row;
    row.seed = derive_seed(master_seed, 0, static_cast<std::uint64_t>(i));
    const auto roots = sample_roots(degree, row.seed);
    const ConditionReport cond = check_conditions(roots, eta, c_d);
    row.dc_holds = cond.dc_holds;
    row.dc_min = cond.dc_min_pairwise;
    row.ac_holds = cond.ac_holds;
    row.ac_fitted_cd = cond.ac_constant;
    row.digit_max_mult =
        digit_multiplicity_trial(degree, derive_seed(master_seed, 1, static_cast<std::uint64_t>(i)));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace newton_atlas
