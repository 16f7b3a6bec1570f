#include <algorithm>
#include <complex>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "newton_atlas/ensemble.hpp"
#include "newton_atlas/pipeline.hpp"

namespace na = newton_atlas;
using C = na::ComplexPoint;

namespace {

// O(n^2) single linkage by repeated merging.
std::vector<std::vector<std::size_t>> brute_clusters(const std::vector<C>& pts, double radius) {
  std::vector<std::size_t> label(pts.size());
  std::iota(label.begin(), label.end(), 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = 0; j < pts.size(); ++j)
        if (std::abs(pts[i] - pts[j]) <= radius && label[j] > label[i]) {
          label[j] = label[i];
          changed = true;
        }
  }
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (label[i] != i) continue;
    out.emplace_back();
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (label[j] == i) out.back().push_back(j);
  }
  return out;
}

}  // namespace

TEST(Cluster, Examples) {
  const std::vector<C> pts{{0, 0}, {1e-9, 0}, {1, 1}, {1, 1 + 5e-9}, {3, 0}};
  const auto c = na::cluster_roots(pts, 1e-8);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0].members, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(c[1].members, (std::vector<std::size_t>{2, 3}));
  EXPECT_EQ(c[2].members, (std::vector<std::size_t>{4}));
  EXPECT_NEAR(c[0].center.real(), 5e-10, 1e-18);
  EXPECT_NEAR(c[1].width, 5e-9, 1e-16);
  EXPECT_FALSE(c[0].ambiguous);
  EXPECT_TRUE(na::cluster_roots(std::vector<C>{}, 1.0).empty());
  EXPECT_THROW(na::cluster_roots(pts, 0.0), na::InvalidArgument);
}

TEST(Cluster, ChainsAreLinkedAndFlaggedAmbiguous) {
  std::vector<C> chain;
  for (int i = 0; i < 30; ++i) chain.emplace_back(i * 0.9e-8, 0);
  const auto c = na::cluster_roots(chain, 1e-8);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_TRUE(c[0].ambiguous);
}

TEST(Cluster, MatchesBruteForce) {
  na::SplitMix64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<C> pts;
    const int n = 1 + static_cast<int>(rng.below(120));
    for (int i = 0; i < n; ++i) pts.emplace_back(rng.uniform() * 0.1, rng.uniform() * 0.1);
    const double radius = 0.002 + 0.01 * rng.uniform();
    const auto fast = na::cluster_roots(pts, radius);
    const auto slow = brute_clusters(pts, radius);
    ASSERT_EQ(fast.size(), slow.size());
    for (std::size_t i = 0; i < fast.size(); ++i) EXPECT_EQ(fast[i].members, slow[i]);
  }
}

TEST(Solve, QuarterQuadratic) {
  const auto p = na::Polynomial::from_roots({{0.5, 0}, {-0.5, 0}});
  const auto r = na::solve(p, na::build_grid(2, 0), 1e-10);
  ASSERT_EQ(r.found_roots.size(), 2u);
  EXPECT_NEAR(r.found_roots[0].position.real(), -0.5, 1e-10);
  EXPECT_NEAR(r.found_roots[1].position.real(), 0.5, 1e-10);
  EXPECT_EQ(r.unresolved_count, 0);
  EXPECT_EQ(r.found_roots[0].true_root_index, 1u);
  EXPECT_EQ(r.found_roots[1].true_root_index, 0u);
}

TEST(Solve, RandomDegreeTen) {
  const auto roots = na::sample_roots(10, 2024);
  const auto p = na::Polynomial::from_roots(roots);
  const auto r = na::solve(p, na::build_grid(10, 1), 1e-10);
  EXPECT_EQ(r.unresolved_count, 0);
  ASSERT_EQ(r.found_roots.size(), 10u);
  std::vector<std::size_t> matched;
  for (const auto& f : r.found_roots) {
    ASSERT_TRUE(f.true_root_index.has_value());
    EXPECT_LE(std::abs(f.position - roots[*f.true_root_index]), 1e-10);
    matched.push_back(*f.true_root_index);
  }
  std::sort(matched.begin(), matched.end());
  EXPECT_EQ(std::unique(matched.begin(), matched.end()), matched.end());
}

TEST(Solve, BudgetIdentityAndChosenStartIsCheapest) {
  const auto p = na::Polynomial::from_roots(na::sample_roots(16, 5));
  const auto grid = na::build_grid(16, 3);
  const auto r = na::solve(p, grid, 1e-10);
  std::int64_t total = 0;
  for (const auto& s : r.chosen_starts) total += s.iterations;
  EXPECT_EQ(total, r.total_iterations_chosen);
  EXPECT_EQ(r.orbits_run, grid.size());
  for (std::size_t i = 0; i < r.found_roots.size(); ++i) {
    const auto& s = r.chosen_starts[i];
    const auto t = na::run_orbit(p, grid.points()[s.grid_index], 1e-10);
    EXPECT_EQ(t.iterations, s.iterations);
    // no grid point reaching the same root is cheaper
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const auto u = na::run_orbit(p, grid.points()[g], 1e-10);
      if (u.outcome == na::Outcome::Converged && u.root_index == r.found_roots[i].true_root_index)
        EXPECT_GE(u.iterations, s.iterations);
    }
  }
}

TEST(Solve, DeterministicAcrossWorkerCounts) {
  const auto p = na::Polynomial::from_roots(na::sample_roots(30, 17));
  const auto grid = na::build_grid(30, 1);
  na::SolveOptions serial, parallel;
  parallel.workers = 4;
  const auto a = na::solve(p, grid, 1e-10, serial), b = na::solve(p, grid, 1e-10, parallel);
  ASSERT_EQ(a.found_roots.size(), b.found_roots.size());
  for (std::size_t i = 0; i < a.found_roots.size(); ++i) {
    EXPECT_EQ(a.found_roots[i].position, b.found_roots[i].position);
    EXPECT_EQ(a.chosen_starts[i].grid_index, b.chosen_starts[i].grid_index);
  }
  EXPECT_EQ(a.total_iterations_chosen, b.total_iterations_chosen);
  EXPECT_EQ(a.all_regime_steps, b.all_regime_steps);
}

TEST(Solve, FoundRootsAreSeparated) {
  const auto p = na::Polynomial::from_roots(na::sample_roots(40, 99));
  const double eps = 1e-10;
  const auto r = na::solve(p, na::build_grid(40, 1), eps);
  const double radius = na::default_cluster_radius(eps);
  for (std::size_t i = 0; i < r.found_roots.size(); ++i)
    for (std::size_t j = i + 1; j < r.found_roots.size(); ++j)
      EXPECT_GT(std::abs(r.found_roots[i].position - r.found_roots[j].position), radius);
}

TEST(Solve, EarlyExitFindsTheSameRoots) {
  const auto p = na::Polynomial::from_roots(na::sample_roots(20, 6));
  const auto grid = na::build_grid(20, 1);
  na::SolveOptions early;
  early.early_exit = true;
  early.early_exit_batch = 64;
  const auto full = na::solve(p, grid, 1e-10), fast = na::solve(p, grid, 1e-10, early);
  EXPECT_EQ(fast.unresolved_count, 0);
  EXPECT_LE(fast.orbits_run, full.orbits_run);
  EXPECT_EQ(fast.found_roots.size(), full.found_roots.size());
}

TEST(Solve, CoefficientOnlyInput) {
  const auto p = na::Polynomial::from_coeffs({{-0.25, 0}, {0, 0}, {1, 0}});
  const auto r = na::solve(p, na::build_grid(2, 0), 1e-10);
  ASSERT_EQ(r.found_roots.size(), 2u);
  EXPECT_NEAR(std::abs(r.found_roots[0].position - C(-0.5, 0)), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(r.found_roots[1].position - C(0.5, 0)), 0.0, 1e-9);
  EXPECT_EQ(r.unresolved_count, 0);
}

TEST(Solve, ChosenTracesMatchChosenStarts) {
  const auto p = na::Polynomial::from_roots(na::sample_roots(12, 44));
  na::SolveOptions o;
  o.record_chosen_traces = true;
  const auto r = na::solve(p, na::build_grid(12, 1), 1e-10, o);
  ASSERT_EQ(r.chosen_traces.size(), r.chosen_starts.size());
  for (std::size_t i = 0; i < r.chosen_traces.size(); ++i) {
    EXPECT_EQ(r.chosen_traces[i].iterations, r.chosen_starts[i].iterations);
    EXPECT_EQ(r.chosen_traces[i].steps.size(), static_cast<std::size_t>(r.chosen_starts[i].iterations) + 1);
  }
}

TEST(Solve, Validation) {
  const auto p = na::Polynomial::from_roots({{0.5, 0}, {-0.5, 0}});
  EXPECT_THROW(na::solve(p, na::build_grid(3, 0), 1e-10), na::InvalidArgument);
  EXPECT_THROW(na::solve(p, na::build_grid(2, 0), 0.1), na::InvalidArgument);
}
