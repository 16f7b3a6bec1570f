#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "newton_atlas/io.hpp"
#include "newton_atlas/svg.hpp"

namespace na = newton_atlas;
using C = na::ComplexPoint;

namespace {

na::Provenance test_provenance() {
  na::Json cfg;
  cfg["subcommand"] = "test";
  cfg["seed"] = 3;
  return {cfg};
}

std::string error_of(const std::string& text, bool grid) {
  try {
    const auto j = na::parse_json_text(text, "in.json");
    if (grid)
      na::grid_from_json(j, "in.json");
    else
      na::polynomial_from_json(j, "in.json");
  } catch (const na::FormatError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Json, PolynomialRoundTrip) {
  const auto p = na::Polynomial::from_roots(na::sample_roots(9, 4));
  const auto q = na::polynomial_from_json(na::polynomial_to_json(p));
  ASSERT_TRUE(q.has_roots());
  EXPECT_TRUE(std::equal(p.roots().begin(), p.roots().end(), q.roots().begin()));
  EXPECT_TRUE(std::equal(p.coeffs().begin(), p.coeffs().end(), q.coeffs().begin()));
}

TEST(Json, GridRoundTrip) {
  const auto g = na::build_grid(30, 5);
  const auto text = na::grid_to_json(g, test_provenance()).dump();
  const auto h = na::grid_from_json(na::parse_json_text(text, "g"));
  EXPECT_EQ(g.points(), h.points());
  EXPECT_EQ(g.radii(), h.radii());
}

TEST(Json, MalformedInputNamesTheProblem) {
  EXPECT_NE(error_of("{\"degree\": 2,\n\"roots\": [[0.5, 0]\n", false).find("line"), std::string::npos);
  EXPECT_NE(error_of(R"({"degree": "2", "roots": []})", false).find("'degree'"), std::string::npos);
  EXPECT_NE(error_of(R"({"degree": 2, "roots": [[0.5, 0], [2, 0]]})", false).find("unit disk"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"degree": 2, "coeffs": [[1, 0], [0, 0]]})", false).find("'coeffs'"),
            std::string::npos);
  EXPECT_NE(error_of("[1, 2]", false).find("object"), std::string::npos);

  auto grid = na::grid_to_json(na::build_grid(5, 1), test_provenance());
  grid["points"][3][0] = 99.0;
  EXPECT_NE(error_of(grid.dump(), true).find("points[3]"), std::string::npos);
  grid.erase("phases");
  EXPECT_NE(error_of(grid.dump(), true).find("'phases'"), std::string::npos);
  EXPECT_THROW(na::load_polynomial("/nonexistent/poly.json"), na::FormatError);
}

TEST(Json, ReportMirrorsFields) {
  const auto p = na::Polynomial::from_roots({{0.5, 0}, {-0.5, 0}});
  const auto r = na::solve(p, na::build_grid(2, 0), 1e-10);
  const auto j = na::report_to_json(r, test_provenance());
  EXPECT_EQ(j["provenance"]["config"]["seed"], 3);
  EXPECT_EQ(j["provenance"]["tool"], "newton-atlas");
  EXPECT_EQ(j["found_roots"].size(), 2u);
  EXPECT_EQ(j["chosen_starts"].size(), 2u);
  EXPECT_EQ(j["total_iterations_chosen"], r.total_iterations_chosen);
  EXPECT_EQ(j["unresolved_count"], 0);
  EXPECT_TRUE(j.contains("regime_iterations_chosen"));
}

TEST(Json, TraceLines) {
  const auto p = na::Polynomial::from_roots({{0.5, 0}, {-0.5, 0}});
  const auto t = na::run_orbit(p, {1, 0}, 1e-10);
  std::ostringstream out;
  na::write_trace_jsonl(out, t, test_provenance());
  std::istringstream in(out.str());
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    const auto j = na::parse_json_text(line, "trace");
    if (lines == 0) EXPECT_TRUE(j.contains("provenance"));
    else EXPECT_EQ(j["n"], lines - 1);
    ++lines;
  }
  EXPECT_EQ(lines, t.steps.size() + 1);
}

TEST(Csv, ProvenanceHeaderFirst) {
  std::ostringstream out;
  na::write_grid_csv(out, na::build_grid(3, 1), test_provenance());
  const std::string s = out.str();
  EXPECT_EQ(s.rfind("# newton-atlas", 0), 0u);
  EXPECT_NE(s.find("# config: {\"subcommand\":\"test\",\"seed\":3}"), std::string::npos);
  EXPECT_NE(s.find("circle,index,re,im\n"), std::string::npos);
}

TEST(Svg, FiguresCarryProvenance) {
  na::ExperimentConfig cfg;
  cfg.degrees = {6, 12};
  cfg.trials = 2;
  cfg.sweep_trials = -1;
  const auto r = na::scaling_experiment(cfg);
  for (const auto& svg : {na::svg::scaling_plot(r, test_provenance()), na::svg::regime_bars(r, test_provenance()),
                          na::svg::displacement_histograms(r, test_provenance())}) {
    EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
    EXPECT_NE(svg.find("<!-- newton-atlas"), std::string::npos);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
  }
}
