#pragma once

/**
 * @file pipeline.hpp
 * @brief End-to-end root finding: every grid point is iterated, terminal
 * points are clustered into roots, and for each root the cheapest start is
 * kept.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "complex_poly.hpp"
#include "errors.hpp"
#include "orbit.hpp"
#include "parallel.hpp"
#include "starting_grid.hpp"

namespace newton_atlas {

/// Clusters wider than this many radii are flagged as ambiguous.
inline constexpr double kAmbiguousWidthFactor = 10.0;

struct Cluster {
  ComplexPoint center;
  std::vector<std::size_t> members;  // indices into the input, ascending
  double width = 0.0;                // 2 * max |member - center|
  bool ambiguous = false;
};

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

struct CellHash {
  std::size_t operator()(const std::pair<std::int64_t, std::int64_t>& c) const noexcept {
    return std::hash<std::int64_t>{}(c.first * 0x9e3779b97f4a7c15LL ^ c.second);
  }
};

}  // namespace detail

/// Single-linkage clustering at the given radius. Clusters are returned in
/// order of their smallest member index; the center is the member mean.
inline std::vector<Cluster> cluster_roots(std::span<const ComplexPoint> terminals, double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("cluster radius must be positive");
  const std::size_t n = terminals.size();
  detail::DisjointSets sets(n);
  std::unordered_map<std::pair<std::int64_t, std::int64_t>, std::vector<std::size_t>,
                     detail::CellHash>
      cells;
  for (std::size_t i = 0; i < n; ++i) {
    const auto cx = static_cast<std::int64_t>(std::floor(terminals[i].real() / radius));
    const auto cy = static_cast<std::int64_t>(std::floor(terminals[i].imag() / radius));
    for (std::int64_t dx = -1; dx <= 1; ++dx)
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        const auto it = cells.find({cx + dx, cy + dy});
        if (it == cells.end()) continue;
        for (const std::size_t j : it->second)
          if (std::abs(terminals[i] - terminals[j]) <= radius) sets.unite(i, j);
      }
    cells[{cx, cy}].push_back(i);
  }

  std::vector<Cluster> clusters;
  std::unordered_map<std::size_t, std::size_t> slot_of_root;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = sets.find(i);
    auto [it, inserted] = slot_of_root.try_emplace(root, clusters.size());
    if (inserted) clusters.emplace_back();
    clusters[it->second].members.push_back(i);
  }
  for (Cluster& c : clusters) {
    ComplexPoint sum{0.0, 0.0};
    for (const std::size_t i : c.members) sum += terminals[i];
    c.center = sum / static_cast<double>(c.members.size());
    double reach = 0.0;
    for (const std::size_t i : c.members) reach = std::max(reach, std::abs(terminals[i] - c.center));
    c.width = 2.0 * reach;
    c.ambiguous = c.width > kAmbiguousWidthFactor * radius;
  }
  return clusters;
}

/// max(100 eps, 1e-12).
inline double default_cluster_radius(double epsilon) { return std::max(100.0 * epsilon, 1e-12); }

struct SolveOptions {
  std::string polynomial_id;
  double eta = kDefaultEta;
  std::int64_t max_iter = 0;
  std::optional<double> cluster_radius;
  unsigned workers = 1;
  /// Re-run the chosen orbits with full step recording.
  bool record_chosen_traces = false;
  /// Stop launching orbits once d distinct roots have been reached.
  bool early_exit = false;
  std::size_t early_exit_batch = 512;
};

struct FoundRoot {
  ComplexPoint position;
  std::size_t members = 0;
  double width = 0.0;
  bool ambiguous = false;
  std::optional<std::size_t> true_root_index;  // when roots are known and one lies within eps
};

struct ChosenStart {
  std::size_t grid_index = 0;
  std::int64_t iterations = 0;
  double start_modulus = 0.0;
  std::int64_t near_phase_length = 0;
  std::array<std::int64_t, kRegimeCount> regime_steps{};
};

struct RootFindingReport {
  std::string polynomial_id;
  int degree = 0;
  double epsilon = 0.0;
  double eta = kDefaultEta;
  double cluster_radius = 0.0;

  std::vector<FoundRoot> found_roots;
  std::vector<ChosenStart> chosen_starts;  // parallel to found_roots
  std::int64_t total_iterations_chosen = 0;
  std::array<std::int64_t, kRegimeCount> chosen_regime_steps{};
  std::int64_t unresolved_count = 0;

  std::size_t orbits_run = 0;
  std::array<std::size_t, 4> outcome_counts{};  // indexed by Outcome
  std::array<std::int64_t, kRegimeCount> all_regime_steps{};
  std::array<double, kRegimeCount> all_min_displacement{};
  std::int64_t all_outside_violations = 0;

  std::vector<OrbitTrace> chosen_traces;  // only with record_chosen_traces

  std::size_t count(Outcome o) const noexcept { return outcome_counts[static_cast<std::size_t>(o)]; }
};

inline std::uint64_t orbit_jitter_seed(std::size_t grid_index) noexcept {
  return derive_seed(0x6a09e667f3bcc908ULL, grid_index);
}

/// Runs every grid orbit, clusters converged terminals into roots, and keeps
/// the cheapest start per root. With known roots, each cluster is matched to
/// a true root within eps and unmatched distinct roots count as unresolved.
inline RootFindingReport solve(const Polynomial& p, const StartingGrid& grid, double epsilon,
                               const SolveOptions& options = {}) {
  if (grid.degree() != p.degree())
    throw InvalidArgument("grid degree " + std::to_string(grid.degree()) +
                          " does not match polynomial degree " + std::to_string(p.degree()));
  if (!(epsilon > 0.0 && epsilon <= kMaxEpsilon))
    throw InvalidArgument("epsilon must lie in (0, 1e-2]");

  RootFindingReport report;
  report.polynomial_id = options.polynomial_id;
  report.degree = p.degree();
  report.epsilon = epsilon;
  report.eta = options.eta;
  report.cluster_radius = options.cluster_radius.value_or(default_cluster_radius(epsilon));

  const auto& points = grid.points();
  const std::size_t n = points.size();

  // inner circles first: they carry the longest orbits
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return grid.circle_of(a) > grid.circle_of(b);
  });

  OrbitOptions orbit_options;
  orbit_options.eta = options.eta;
  orbit_options.max_iter = options.max_iter;
  orbit_options.record_steps = false;

  std::vector<std::optional<OrbitTrace>> results(n);
  auto run_one = [&](std::size_t i) {
    OrbitOptions o = orbit_options;
    o.jitter_seed = orbit_jitter_seed(i);
    results[i] = run_orbit(p, points[i], epsilon, o);
  };

  if (!options.early_exit) {
    parallel_for_each_index(std::span<const std::size_t>(order), options.workers, run_one);
  } else {
    const std::size_t batch = std::max<std::size_t>(options.early_exit_batch, 1);
    std::set<std::pair<double, double>> reached;
    for (std::size_t begin = 0; begin < n; begin += batch) {
      const std::size_t end = std::min(n, begin + batch);
      const std::span<const std::size_t> chunk(order.data() + begin, end - begin);
      parallel_for_each_index(chunk, options.workers, run_one);
      for (const std::size_t i : chunk) {
        const OrbitTrace& t = *results[i];
        if (t.outcome != Outcome::Converged) continue;
        if (t.root_index)
          reached.emplace(p.roots()[*t.root_index].real(), p.roots()[*t.root_index].imag());
      }
      if (p.has_roots()) {
        std::set<std::pair<double, double>> distinct;
        for (const auto a : p.roots()) distinct.emplace(a.real(), a.imag());
        if (reached.size() >= distinct.size()) break;
      } else {
        std::vector<ComplexPoint> terminals;
        for (std::size_t j = 0; j < end; ++j)
          if (results[order[j]] && results[order[j]]->outcome == Outcome::Converged)
            terminals.push_back(results[order[j]]->final_z);
        if (cluster_roots(terminals, report.cluster_radius).size() >=
            static_cast<std::size_t>(p.degree()))
          break;
      }
    }
  }

  report.all_min_displacement.fill(std::numeric_limits<double>::infinity());
  std::vector<ComplexPoint> terminals;
  std::vector<std::size_t> terminal_source;
  for (std::size_t i = 0; i < n; ++i) {
    if (!results[i]) continue;
    const OrbitTrace& t = *results[i];
    ++report.orbits_run;
    ++report.outcome_counts[static_cast<std::size_t>(t.outcome)];
    for (std::size_t r = 0; r < kRegimeCount; ++r) {
      report.all_regime_steps[r] += t.regime_steps[r];
      report.all_min_displacement[r] = std::min(report.all_min_displacement[r], t.min_displacement[r]);
    }
    report.all_outside_violations += t.outside_violations;
    if (t.outcome == Outcome::Converged) {
      terminals.push_back(t.final_z);
      terminal_source.push_back(i);
    }
  }

  auto clusters = cluster_roots(terminals, report.cluster_radius);
  std::sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
    if (a.center.real() != b.center.real()) return a.center.real() < b.center.real();
    return a.center.imag() < b.center.imag();
  });

  for (const Cluster& c : clusters) {
    FoundRoot root;
    root.position = c.center;
    root.members = c.members.size();
    root.width = c.width;
    root.ambiguous = c.ambiguous;

    std::size_t best = terminal_source[c.members.front()];
    for (const std::size_t m : c.members) {
      const std::size_t g = terminal_source[m];
      const auto it_g = results[g]->iterations;
      const auto it_b = results[best]->iterations;
      if (it_g < it_b || (it_g == it_b && g < best)) best = g;
    }
    const OrbitTrace& t = *results[best];
    ChosenStart start;
    start.grid_index = best;
    start.iterations = t.iterations;
    start.start_modulus = std::abs(points[best]);
    start.near_phase_length = t.near_phase_length();
    start.regime_steps = t.regime_steps;

    report.total_iterations_chosen += t.iterations;
    for (std::size_t r = 0; r < kRegimeCount; ++r) report.chosen_regime_steps[r] += t.regime_steps[r];
    report.found_roots.push_back(root);
    report.chosen_starts.push_back(start);
  }

  if (p.has_roots()) {
    const auto roots = p.roots();
    std::set<std::pair<double, double>> distinct, matched;
    for (const auto a : roots) distinct.emplace(a.real(), a.imag());
    for (FoundRoot& f : report.found_roots) {
      std::size_t nearest = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < roots.size(); ++j) {
        const double dist = std::abs(f.position - roots[j]);
        if (dist < best) {
          best = dist;
          nearest = j;
        }
      }
      if (best <= epsilon) {
        f.true_root_index = nearest;
        matched.emplace(roots[nearest].real(), roots[nearest].imag());
      }
    }
    report.unresolved_count = static_cast<std::int64_t>(distinct.size() - matched.size());
  } else {
    report.unresolved_count =
        std::max<std::int64_t>(0, p.degree() - static_cast<std::int64_t>(report.found_roots.size()));
  }

  if (options.record_chosen_traces) {
    OrbitOptions o = orbit_options;
    o.record_steps = true;
    for (const ChosenStart& s : report.chosen_starts) {
      o.jitter_seed = orbit_jitter_seed(s.grid_index);
      report.chosen_traces.push_back(run_orbit(p, points[s.grid_index], epsilon, o));
    }
  }
  return report;
}

}  // namespace newton_atlas
