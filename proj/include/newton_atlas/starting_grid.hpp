#pragma once

/**
 * @file starting_grid.hpp
 * @brief The universal starting set S_d for Newton's method in degree d.
 *
 * s = ceil(0.4 log d) concentric circles of radii
 *
 *     r_k = (1 + sqrt 2) ((d-1)/d)^((2k-1)/(4s)),   k = 1..s
 *
 * each carrying m = ceil(8.33 d log d) equidistant points with an independent
 * phase per circle. The logarithm is natural unless a different base is
 * requested for sensitivity runs.
 */

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <numbers>
#include <vector>

#include "complex_poly.hpp"
#include "errors.hpp"
#include "rng.hpp"

namespace newton_atlas {

inline constexpr double kCirclesPerLog = 0.4;
inline constexpr double kPointsPerDLog = 8.33;
inline constexpr double kOuterRadius = 1.0 + std::numbers::sqrt2;

struct GridShape {
  int num_circles = 0;
  std::int64_t points_per_circle = 0;
};

/// log_base <= 0 or == e selects the natural logarithm.
inline double grid_log(double x, double log_base) {
  if (log_base <= 0.0 || log_base == std::numbers::e) return std::log(x);
  return std::log(x) / std::log(log_base);
}

/// Raw ceilings, no boundary nudging, so the shape is reproducible bit for bit.
inline GridShape grid_shape(int degree, double log_base = 0.0) {
  if (degree < 2) throw InvalidDegree(degree);
  const double l = grid_log(static_cast<double>(degree), log_base);
  GridShape shape;
  shape.num_circles = static_cast<int>(std::ceil(kCirclesPerLog * l));
  shape.points_per_circle = static_cast<std::int64_t>(std::ceil(kPointsPerDLog * degree * l));
  if (shape.num_circles < 1) shape.num_circles = 1;
  return shape;
}

/// r_k for k = 1..s.
inline std::vector<double> grid_radii(int degree, int num_circles) {
  std::vector<double> radii;
  radii.reserve(static_cast<std::size_t>(num_circles));
  const double shrink = (degree - 1.0) / degree;
  for (int k = 1; k <= num_circles; ++k)
    radii.push_back(kOuterRadius * std::pow(shrink, (2.0 * k - 1.0) / (4.0 * num_circles)));
  return radii;
}

/// Seed 0 gives golden-angle offsets k * 2pi * (sqrt5 - 1)/2 / m; any other
/// seed draws each circle's phase independently from SplitMix64.
inline std::vector<double> grid_phases(int num_circles, std::int64_t points_per_circle,
                                       std::uint64_t phase_seed) {
  std::vector<double> phases;
  phases.reserve(static_cast<std::size_t>(num_circles));
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (phase_seed == 0) {
    const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int k = 1; k <= num_circles; ++k)
      phases.push_back(std::fmod(k * two_pi * golden / static_cast<double>(points_per_circle),
                                 two_pi));
    return phases;
  }
  SplitMix64 rng(phase_seed);
  for (int k = 0; k < num_circles; ++k) phases.push_back(rng.angle());
  return phases;
}

class StartingGrid {
 public:
  StartingGrid(int degree, std::vector<double> radii, std::vector<double> phases,
               std::int64_t points_per_circle)
      : degree_(degree),
        radii_(std::move(radii)),
        phases_(std::move(phases)),
        points_per_circle_(points_per_circle) {
    if (degree_ < 2) throw InvalidDegree(degree_);
    if (radii_.empty() || radii_.size() != phases_.size() || points_per_circle_ < 1)
      throw InvalidArgument("grid needs matching non-empty radii/phases and m >= 1");
    points_.reserve(radii_.size() * static_cast<std::size_t>(points_per_circle_));
    const double step = 2.0 * std::numbers::pi / static_cast<double>(points_per_circle_);
    for (std::size_t k = 0; k < radii_.size(); ++k)
      for (std::int64_t j = 0; j < points_per_circle_; ++j)
        points_.push_back(std::polar(radii_[k], phases_[k] + step * static_cast<double>(j)));
  }

  int degree() const noexcept { return degree_; }
  int num_circles() const noexcept { return static_cast<int>(radii_.size()); }
  std::int64_t points_per_circle() const noexcept { return points_per_circle_; }
  const std::vector<double>& radii() const noexcept { return radii_; }
  const std::vector<double>& phases() const noexcept { return phases_; }
  const std::vector<ComplexPoint>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }

  /// Circle (0-based) that grid point i lies on.
  int circle_of(std::size_t i) const noexcept {
    return static_cast<int>(i / static_cast<std::size_t>(points_per_circle_));
  }

 private:
  int degree_;
  std::vector<double> radii_;
  std::vector<double> phases_;
  std::int64_t points_per_circle_;
  std::vector<ComplexPoint> points_;
};

inline StartingGrid build_grid(int degree, std::uint64_t phase_seed, double log_base = 0.0) {
  const GridShape shape = grid_shape(degree, log_base);
  return StartingGrid(degree, grid_radii(degree, shape.num_circles),
                      grid_phases(shape.num_circles, shape.points_per_circle, phase_seed),
                      shape.points_per_circle);
}

/// Upper bound on R for the R-central orbits of the good grid points:
/// 5 (d/(d-1))^ceil(5 pi (ln d + 1)).
inline double r_central_bound(int degree) {
  if (degree < 2) throw InvalidDegree(degree);
  const double d = degree;
  const double exponent = std::ceil(5.0 * std::numbers::pi * (std::log(d) + 1.0));
  return 5.0 * std::pow(d / (d - 1.0), exponent);
}

}  // namespace newton_atlas
