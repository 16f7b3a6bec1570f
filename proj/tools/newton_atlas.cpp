// newton-atlas: universal starting grids for Newton's method, root finding
// with regime tracing, and Monte Carlo checks on random root ensembles.
//
//   newton-atlas grid --degree 100 --out grid.json [--csv grid.csv]
//   newton-atlas solve --poly poly.json --epsilon 1e-10 --out report.json [--trace dir/]
//   newton-atlas verify --degree 100 --trials 1000 --eta 0.25 --seed 7 --out conditions.csv
//   newton-atlas experiment --degrees 10,20,40,80 --trials 20 --out dir/
//
// Exit status: 0 success, 1 invalid input, 2 unresolved roots (solve), 3 internal failure.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "newton_atlas/newton_atlas.hpp"

namespace na = newton_atlas;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitUnresolved = 2;
constexpr int kExitInternal = 3;

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string subcommand;
  int degree = 0;
  std::vector<int> degrees{10, 20, 40, 80};
  int trials = 0;
  double epsilon = 1e-10;
  double eta = na::kDefaultEta;
  std::uint64_t seed = 1;
  std::uint64_t phase_seed = 1;
  double log_base = 0.0;
  unsigned workers = 1;
  std::int64_t max_iter = 0;
  bool early_exit = false;
  std::string poly_path;
  std::string grid_path;
  std::string out;
  std::string csv_out;
  std::string trace_dir;
  std::string id;
  int sweep_degree = 20;
  std::vector<double> sweep_epsilons{1e-4, 1e-8, 1e-16};
  int sweep_trials = 0;

  na::Json to_json() const {
    na::Json j;
    j["subcommand"] = subcommand;
    if (subcommand == "grid") {
      j["degree"] = degree;
      j["phase_seed"] = phase_seed;
      j["log_base"] = log_base;
    } else if (subcommand == "solve") {
      j["poly"] = poly_path;
      j["grid"] = grid_path;
      j["phase_seed"] = phase_seed;
      j["log_base"] = log_base;
      j["epsilon"] = epsilon;
      j["eta"] = eta;
      j["max_iter"] = max_iter;
      j["early_exit"] = early_exit;
      j["id"] = id;
    } else if (subcommand == "verify") {
      j["degree"] = degree;
      j["trials"] = trials;
      j["eta"] = eta;
      j["seed"] = seed;
    } else if (subcommand == "experiment") {
      j["degrees"] = degrees;
      j["trials"] = trials;
      j["epsilon"] = epsilon;
      j["eta"] = eta;
      j["seed"] = seed;
      j["phase_seed"] = phase_seed;
      j["log_base"] = log_base;
      j["sweep_degree"] = sweep_degree;
      j["sweep_epsilons"] = sweep_epsilons;
      j["sweep_trials"] = sweep_trials;
    }
    j["workers"] = workers;
    return j;
  }
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

void validate_degree(int d) { require(d >= 2, fmt::format("--degree must be >= 2, got {}", d)); }
void validate_epsilon(double e) {
  require(e > 0.0 && e <= na::kMaxEpsilon, fmt::format("--epsilon must lie in (0, 1e-2], got {}", e));
}
void validate_eta(double eta) { require(eta > 0.0, fmt::format("--eta must be > 0, got {}", eta)); }

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError(path + ": cannot open for writing");
  return out;
}

void write_json(const std::string& path, const na::Json& j) {
  if (path.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

int run_grid(const RunConfig& cfg) {
  validate_degree(cfg.degree);
  const na::Provenance prov{cfg.to_json()};
  const auto grid = na::build_grid(cfg.degree, cfg.phase_seed, cfg.log_base);
  write_json(cfg.out, na::grid_to_json(grid, prov));
  if (!cfg.csv_out.empty()) {
    auto out = open_out(cfg.csv_out);
    na::write_grid_csv(out, grid, prov);
  }
  std::cerr << fmt::format("grid: degree {} -> {} circles x {} points = {} points\n", grid.degree(),
                           grid.num_circles(), grid.points_per_circle(), grid.size());
  return kExitOk;
}

int run_solve(const RunConfig& cfg) {
  validate_epsilon(cfg.epsilon);
  validate_eta(cfg.eta);
  require(!cfg.poly_path.empty(), "--poly is required");
  const na::Polynomial p = na::load_polynomial(cfg.poly_path);
  require(p.degree() >= 2, "polynomial degree must be >= 2");
  const na::StartingGrid grid = cfg.grid_path.empty()
                                    ? na::build_grid(p.degree(), cfg.phase_seed, cfg.log_base)
                                    : na::load_grid(cfg.grid_path);
  require(grid.degree() == p.degree(),
          fmt::format("grid degree {} does not match polynomial degree {}", grid.degree(), p.degree()));

  na::SolveOptions so;
  so.polynomial_id = cfg.id.empty() ? fs::path(cfg.poly_path).stem().string() : cfg.id;
  so.eta = cfg.eta;
  so.max_iter = cfg.max_iter;
  so.workers = cfg.workers;
  so.early_exit = cfg.early_exit;
  so.record_chosen_traces = !cfg.trace_dir.empty();
  const auto report = na::solve(p, grid, cfg.epsilon, so);

  const na::Provenance prov{cfg.to_json()};
  write_json(cfg.out, na::report_to_json(report, prov));
  if (!cfg.trace_dir.empty()) {
    fs::create_directories(cfg.trace_dir);
    for (std::size_t i = 0; i < report.chosen_traces.size(); ++i) {
      auto out = open_out((fs::path(cfg.trace_dir) / fmt::format("root_{:04d}.jsonl", i)).string());
      na::write_trace_jsonl(out, report.chosen_traces[i], prov);
    }
  }
  std::cerr << fmt::format("solve: {} roots found, {} unresolved, {} chosen iterations\n",
                           report.found_roots.size(), report.unresolved_count,
                           report.total_iterations_chosen);
  return report.unresolved_count > 0 ? kExitUnresolved : kExitOk;
}

int run_verify(const RunConfig& cfg) {
  validate_degree(cfg.degree);
  validate_eta(cfg.eta);
  require(cfg.trials >= 1, "--trials must be >= 1");
  const auto rows = na::condition_trials(cfg.degree, cfg.trials, cfg.eta, cfg.seed);
  const na::Provenance prov{cfg.to_json()};
  if (cfg.out.empty()) {
    na::write_conditions_csv(std::cout, rows, prov);
  } else {
    auto out = open_out(cfg.out);
    na::write_conditions_csv(out, rows, prov);
  }
  int dc = 0, ac = 0, digit_tail = 0;
  const int alpha = na::digit_alpha(cfg.degree);
  for (const auto& r : rows) {
    dc += r.dc_holds;
    ac += r.ac_holds;
    digit_tail += r.digit_max_mult >= alpha;
  }
  const double n = static_cast<double>(rows.size());
  std::cerr << fmt::format(
      "verify: P(DC) = {:.4f} (bound {:.4f}), P(AC at 3 ln d) = {:.4f}, "
      "P(max digit mult >= {}) = {:.5f} (bound {:.5f})\n",
      dc / n, 1.0 - std::pow(cfg.degree, -2.0 * cfg.eta), ac / n, alpha, digit_tail / n,
      na::digit_tail_bound(cfg.degree, alpha));
  return kExitOk;
}

int run_experiment(const RunConfig& cfg) {
  validate_epsilon(cfg.epsilon);
  validate_eta(cfg.eta);
  require(!cfg.degrees.empty(), "--degrees must not be empty");
  for (const int d : cfg.degrees) validate_degree(d);
  require(std::is_sorted(cfg.degrees.begin(), cfg.degrees.end()), "--degrees must be ascending");
  require(cfg.trials >= 1, "--trials must be >= 1");
  for (const double e : cfg.sweep_epsilons)
    require(e > 0.0 && e < 1.0, "--sweep-epsilons entries must lie in (0, 1)");

  na::ExperimentConfig ec;
  ec.degrees = cfg.degrees;
  ec.trials = cfg.trials;
  ec.epsilon = cfg.epsilon;
  ec.seed = cfg.seed;
  ec.phase_seed = cfg.phase_seed;
  ec.log_base = cfg.log_base;
  ec.eta = cfg.eta;
  ec.workers = cfg.workers;
  ec.sweep_degree = cfg.sweep_degree;
  ec.sweep_epsilons = cfg.sweep_epsilons;
  ec.sweep_trials = cfg.sweep_trials;
  const auto report = na::scaling_experiment(ec);

  const na::Provenance prov{cfg.to_json()};
  const fs::path dir = cfg.out.empty() ? fs::path("experiment_out") : fs::path(cfg.out);
  fs::create_directories(dir);
  {
    auto out = open_out((dir / "rows.csv").string());
    na::write_rows_csv(out, report.rows, prov);
  }
  write_json((dir / "summary.json").string(), na::experiment_summary_json(report, prov));
  open_out((dir / "scaling.svg").string()) << na::svg::scaling_plot(report, prov);
  open_out((dir / "regimes.svg").string()) << na::svg::regime_bars(report, prov);
  open_out((dir / "displacement.svg").string()) << na::svg::displacement_histograms(report, prov);
  std::cerr << fmt::format("experiment: beta = {:.4f} (raw slope {:.4f}); outputs in {}\n",
                           report.fit.beta, report.fit.raw_beta, dir.string());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"newton-atlas: Newton's method from a universal starting grid"};
  app.require_subcommand(1);
  RunConfig cfg;

  if (const char* env = std::getenv("NEWTON_ATLAS_SEED")) {
    try {
      cfg.seed = std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "error: NEWTON_ATLAS_SEED is not an unsigned integer\n";
      return kExitInvalid;
    }
  }

  auto* grid = app.add_subcommand("grid", "build the universal starting grid");
  grid->add_option("--degree,-d", cfg.degree, "polynomial degree (>= 2)")->required();
  grid->add_option("--phase-seed", cfg.phase_seed, "0 = golden-angle phases, otherwise seeded");
  grid->add_option("--log-base", cfg.log_base, "logarithm base for grid sizes (default: natural)");
  grid->add_option("--out,-o", cfg.out, "grid JSON output (default: stdout)");
  grid->add_option("--csv", cfg.csv_out, "also write circle,index,re,im CSV");

  auto* solve = app.add_subcommand("solve", "find all roots from the grid");
  solve->add_option("--poly,-p", cfg.poly_path, "polynomial JSON")->required();
  solve->add_option("--epsilon,-e", cfg.epsilon, "target precision in (0, 1e-2]");
  auto* grid_opt = solve->add_option("--grid", cfg.grid_path, "grid JSON from `grid`");
  solve->add_option("--phase-seed", cfg.phase_seed, "phase seed when no --grid is given")->excludes(grid_opt);
  solve->add_option("--log-base", cfg.log_base, "logarithm base for grid sizes")->excludes(grid_opt);
  solve->add_option("--eta", cfg.eta, "near-case exponent (> 0)");
  solve->add_option("--max-iter", cfg.max_iter, "per-orbit iteration cap (0 = default)");
  solve->add_flag("--early-exit", cfg.early_exit, "stop once every root has been reached");
  solve->add_option("--out,-o", cfg.out, "report JSON output (default: stdout)");
  solve->add_option("--trace", cfg.trace_dir, "directory for chosen-orbit JSON-lines traces");
  solve->add_option("--id", cfg.id, "polynomial id (default: file stem)");
  solve->add_option("--workers,-j", cfg.workers, "worker threads (0 = hardware)");

  auto* verify = app.add_subcommand("verify", "Monte Carlo check of the AC/DC conditions and digit multiplicity bound");
  cfg.trials = 100;
  verify->add_option("--degree,-d", cfg.degree, "degree (>= 2)")->required();
  verify->add_option("--trials,-n", cfg.trials, "number of trials");
  verify->add_option("--eta", cfg.eta, "distance-condition exponent (> 0)");
  verify->add_option("--seed,-s", cfg.seed, "master seed (env NEWTON_ATLAS_SEED)");
  verify->add_option("--out,-o", cfg.out, "conditions CSV output (default: stdout)");

  auto* experiment = app.add_subcommand("experiment", "iteration-count scaling experiment");
  experiment->add_option("--degrees", cfg.degrees, "ascending degree list")->delimiter(',');
  experiment->add_option("--trials,-n", cfg.trials, "trials per degree");
  experiment->add_option("--epsilon,-e", cfg.epsilon, "target precision in (0, 1e-2]");
  experiment->add_option("--eta", cfg.eta, "near-case exponent (> 0)");
  experiment->add_option("--seed,-s", cfg.seed, "master seed (env NEWTON_ATLAS_SEED)");
  experiment->add_option("--phase-seed", cfg.phase_seed, "grid phase seed");
  experiment->add_option("--log-base", cfg.log_base, "logarithm base for grid sizes");
  experiment->add_option("--sweep-degree", cfg.sweep_degree, "degree of the epsilon sweep");
  experiment->add_option("--sweep-epsilons", cfg.sweep_epsilons, "epsilons of the sweep")->delimiter(',');
  experiment->add_option("--sweep-trials", cfg.sweep_trials, "trials of the sweep (0 = --trials, <0 = off)");
  experiment->add_option("--out,-o", cfg.out, "output directory (default: experiment_out)");
  experiment->add_option("--workers,-j", cfg.workers, "worker threads (0 = hardware)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*grid) {
      cfg.subcommand = "grid";
      return run_grid(cfg);
    }
    if (*solve) {
      cfg.subcommand = "solve";
      return run_solve(cfg);
    }
    if (*verify) {
      cfg.subcommand = "verify";
      return run_verify(cfg);
    }
    if (*experiment) {
      cfg.subcommand = "experiment";
      if (cfg.trials == 100 && experiment->count("--trials") == 0) cfg.trials = 20;
      return run_experiment(cfg);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const na::FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const na::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
