// Finds both roots of z^2 - 1/4 from the universal grid and prints the
// regime profile of the orbit that reached each root first.

#include <iostream>

#include <fmt/format.h>

#include "newton_atlas/newton_atlas.hpp"

int main() {
  namespace na = newton_atlas;
  const auto p = na::Polynomial::from_roots({{0.5, 0.0}, {-0.5, 0.0}});
  const auto grid = na::build_grid(p.degree(), /*phase_seed=*/0);

  na::SolveOptions options;
  options.polynomial_id = "z^2 - 1/4";
  const auto report = na::solve(p, grid, 1e-12, options);

  fmt::print("{} grid points on {} circle(s)\n", grid.size(), grid.num_circles());
  for (std::size_t i = 0; i < report.found_roots.size(); ++i) {
    const auto& root = report.found_roots[i];
    const auto& start = report.chosen_starts[i];
    fmt::print("root {:+.12f}{:+.12f}i  reached by {} starts; best start #{} took {} steps "
               "(far {}, intermediate {}, near {}, outside {})\n",
               root.position.real(), root.position.imag(), root.members, start.grid_index,
               start.iterations, start.regime_steps[0], start.regime_steps[1], start.regime_steps[2],
               start.regime_steps[3]);
  }
  fmt::print("unresolved roots: {}\n", report.unresolved_count);
  return report.unresolved_count == 0 ? 0 : 1;
}
