#pragma once

/**
 * @file io.hpp
 * @brief JSON / CSV / JSON-lines serialization.
 *
 * Every file written here starts with a provenance record (tool, version and
 * the full run configuration). No timestamps are written, so identical
 * command lines produce byte-identical files.
 *
 * Points are serialized as [re, im] pairs. Polynomial files:
 *
 *     {"degree": d, "roots": [[re, im], ...], "coeffs": [[re, im], ...]}
 *
 * with at least one of roots/coeffs; coeffs are constant term first.
 */

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "complex_poly.hpp"
#include "ensemble.hpp"
#include "errors.hpp"
#include "experiment.hpp"
#include "orbit.hpp"
#include "pipeline.hpp"
#include "starting_grid.hpp"

namespace newton_atlas {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolName = "newton-atlas";
inline constexpr const char* kToolVersion = "0.1.0";

struct Provenance {
  Json config = Json::object();

  Json to_json() const {
    Json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["config"] = config;
    return j;
  }

  /// "# " prefixed header lines for CSV files.
  std::string csv_header() const {
    return fmt::format("# {} {}\n# config: {}\n", kToolName, kToolVersion, config.dump());
  }
};

inline Json point_json(ComplexPoint z) { return Json::array({z.real(), z.imag()}); }

inline Json points_json(std::span<const ComplexPoint> zs) {
  Json a = Json::array();
  for (const auto z : zs) a.push_back(point_json(z));
  return a;
}

/// JSON numbers cannot hold inf/nan; those become null.
inline Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

// ---------------------------------------------------------------------------
// Reading
// ---------------------------------------------------------------------------

inline Json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw FormatError(source + ": " + e.what());
  }
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path + ": cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_json_text(buffer.str(), path);
}

namespace detail {

inline const Json& require(const Json& obj, const char* key, const std::string& source) {
  if (!obj.is_object()) throw FormatError(source + ": top level must be a JSON object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(source + ": missing field '" + key + "'");
  return *it;
}

inline double number_at(const Json& v, const std::string& where) {
  if (!v.is_number()) throw FormatError(where + ": expected a number");
  return v.get<double>();
}

inline std::vector<ComplexPoint> points_at(const Json& v, const std::string& where) {
  if (!v.is_array()) throw FormatError(where + ": expected an array of [re, im] pairs");
  std::vector<ComplexPoint> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string at = where + "[" + std::to_string(i) + "]";
    const Json& e = v[i];
    if (!e.is_array() || e.size() != 2) throw FormatError(at + ": expected [re, im]");
    out.emplace_back(number_at(e[0], at + "[0]"), number_at(e[1], at + "[1]"));
  }
  return out;
}

inline int degree_at(const Json& obj, const std::string& source) {
  const Json& d = require(obj, "degree", source);
  if (!d.is_number_integer()) throw FormatError(source + ": field 'degree': expected an integer");
  return d.get<int>();
}

}  // namespace detail

inline Polynomial polynomial_from_json(const Json& j, const std::string& source = "polynomial") {
  const int degree = detail::degree_at(j, source);
  if (degree < 1) throw FormatError(source + ": field 'degree': must be >= 1");
  const bool has_roots = j.contains("roots") && !j["roots"].is_null();
  const bool has_coeffs = j.contains("coeffs") && !j["coeffs"].is_null();
  if (!has_roots && !has_coeffs)
    throw FormatError(source + ": at least one of 'roots' or 'coeffs' is required");
  std::vector<ComplexPoint> roots, coeffs;
  if (has_roots) {
    roots = detail::points_at(j["roots"], source + ": field 'roots'");
    if (roots.size() != static_cast<std::size_t>(degree))
      throw FormatError(source + ": field 'roots': expected " + std::to_string(degree) +
                        " entries, got " + std::to_string(roots.size()));
  }
  if (has_coeffs) {
    coeffs = detail::points_at(j["coeffs"], source + ": field 'coeffs'");
    if (coeffs.size() != static_cast<std::size_t>(degree) + 1)
      throw FormatError(source + ": field 'coeffs': expected " + std::to_string(degree + 1) +
                        " entries, got " + std::to_string(coeffs.size()));
  }
  try {
    if (has_roots && has_coeffs) return Polynomial::from_both(std::move(coeffs), std::move(roots));
    if (has_roots) return Polynomial::from_roots(std::move(roots));
    return Polynomial::from_coeffs(std::move(coeffs));
  } catch (const InvalidPolynomial& e) {
    throw FormatError(source + ": " + e.what());
  }
}

inline Polynomial load_polynomial(const std::string& path) {
  return polynomial_from_json(read_json_file(path), path);
}

inline Json polynomial_to_json(const Polynomial& p) {
  Json j;
  j["degree"] = p.degree();
  if (p.has_roots()) j["roots"] = points_json(p.roots());
  if (p.has_coeffs()) j["coeffs"] = points_json(p.coeffs());
  return j;
}

// ---------------------------------------------------------------------------
// Grid
// ---------------------------------------------------------------------------

inline Json grid_to_json(const StartingGrid& g, const Provenance& prov) {
  Json j;
  j["provenance"] = prov.to_json();
  j["degree"] = g.degree();
  j["radii"] = g.radii();
  j["phases"] = g.phases();
  j["points"] = points_json(g.points());
  return j;
}

/// Rebuilds a grid from its radii and phases; the stored points must agree.
inline StartingGrid grid_from_json(const Json& j, const std::string& source = "grid") {
  const int degree = detail::degree_at(j, source);
  std::vector<double> radii, phases;
  const Json& r = detail::require(j, "radii", source);
  const Json& ph = detail::require(j, "phases", source);
  if (!r.is_array() || !ph.is_array() || r.size() != ph.size() || r.empty())
    throw FormatError(source + ": 'radii' and 'phases' must be non-empty arrays of equal length");
  for (std::size_t i = 0; i < r.size(); ++i) {
    radii.push_back(detail::number_at(r[i], source + ": field 'radii[" + std::to_string(i) + "]'"));
    phases.push_back(detail::number_at(ph[i], source + ": field 'phases[" + std::to_string(i) + "]'"));
  }
  const auto points = detail::points_at(detail::require(j, "points", source), source + ": field 'points'");
  if (points.size() % radii.size() != 0 || points.empty())
    throw FormatError(source + ": field 'points': count is not a multiple of the circle count");
  const auto m = static_cast<std::int64_t>(points.size() / radii.size());
  try {
    StartingGrid g(degree, std::move(radii), std::move(phases), m);
    for (std::size_t i = 0; i < points.size(); ++i)
      if (std::abs(points[i] - g.points()[i]) > 1e-9 * (1.0 + std::abs(points[i])))
        throw FormatError(source + ": field 'points[" + std::to_string(i) +
                          "]': inconsistent with radii/phases");
    return g;
  } catch (const InvalidArgument& e) {
    throw FormatError(source + ": " + e.what());
  }
}

inline StartingGrid load_grid(const std::string& path) {
  return grid_from_json(read_json_file(path), path);
}

inline void write_grid_csv(std::ostream& out, const StartingGrid& g, const Provenance& prov) {
  out << prov.csv_header() << "circle,index,re,im\n";
  const auto m = static_cast<std::size_t>(g.points_per_circle());
  for (std::size_t i = 0; i < g.size(); ++i)
    out << fmt::format("{},{},{},{}\n", i / m, i % m, g.points()[i].real(), g.points()[i].imag());
}

// ---------------------------------------------------------------------------
// Solve report and traces
// ---------------------------------------------------------------------------

inline Json regime_counts_json(const std::array<std::int64_t, kRegimeCount>& counts) {
  Json j;
  for (std::size_t r = 0; r < kRegimeCount; ++r)
    j[std::string(to_string(static_cast<Regime>(r)))] = counts[r];
  return j;
}

inline Json report_to_json(const RootFindingReport& r, const Provenance& prov) {
  Json j;
  j["provenance"] = prov.to_json();
  j["polynomial_id"] = r.polynomial_id;
  j["degree"] = r.degree;
  j["epsilon"] = r.epsilon;
  j["eta"] = r.eta;
  j["cluster_radius"] = r.cluster_radius;
  Json roots = Json::array();
  for (const FoundRoot& f : r.found_roots) {
    Json e;
    e["position"] = point_json(f.position);
    e["cluster_radius"] = r.cluster_radius;
    e["members"] = f.members;
    e["width"] = f.width;
    e["ambiguous"] = f.ambiguous;
    e["true_root_index"] = f.true_root_index ? Json(*f.true_root_index) : Json(nullptr);
    roots.push_back(e);
  }
  j["found_roots"] = roots;
  Json starts = Json::array();
  for (const ChosenStart& s : r.chosen_starts) {
    Json e;
    e["grid_index"] = s.grid_index;
    e["iterations"] = s.iterations;
    e["start_modulus"] = s.start_modulus;
    e["near_phase_length"] = s.near_phase_length;
    e["regime_steps"] = regime_counts_json(s.regime_steps);
    starts.push_back(e);
  }
  j["chosen_starts"] = starts;
  j["total_iterations_chosen"] = r.total_iterations_chosen;
  j["regime_iterations_chosen"] = regime_counts_json(r.chosen_regime_steps);
  j["unresolved_count"] = r.unresolved_count;
  Json orbits;
  orbits["run"] = r.orbits_run;
  for (std::size_t o = 0; o < r.outcome_counts.size(); ++o)
    orbits[std::string(to_string(static_cast<Outcome>(o)))] = r.outcome_counts[o];
  orbits["regime_steps"] = regime_counts_json(r.all_regime_steps);
  orbits["outside_violations"] = r.all_outside_violations;
  j["all_orbits"] = orbits;
  return j;
}

inline Json step_json(std::size_t n, const OrbitStep& s) {
  Json j;
  j["n"] = n;
  j["re"] = s.z.real();
  j["im"] = s.z.imag();
  j["k"] = s.k_index ? Json(*s.k_index) : Json(nullptr);
  j["regime"] = std::string(to_string(s.regime));
  j["disp"] = s.displacement ? Json(*s.displacement) : Json(nullptr);
  return j;
}

/// First line: provenance plus orbit summary; then one step per line.
inline void write_trace_jsonl(std::ostream& out, const OrbitTrace& t, const Provenance& prov) {
  Json head;
  head["provenance"] = prov.to_json();
  head["start"] = point_json(t.start);
  head["outcome"] = std::string(to_string(t.outcome));
  head["iterations"] = t.iterations;
  head["truncated"] = t.truncated;
  out << head.dump() << '\n';
  for (std::size_t n = 0; n < t.steps.size(); ++n) out << step_json(n, t.steps[n]).dump() << '\n';
}

// ---------------------------------------------------------------------------
// Verification and experiment outputs
// ---------------------------------------------------------------------------

inline void write_conditions_csv(std::ostream& out, std::span<const VerifyRow> rows,
                                 const Provenance& prov) {
  out << prov.csv_header() << "seed,dc_holds,dc_min,ac_fitted_Cd,digit_max_mult\n";
  for (const VerifyRow& r : rows)
    out << fmt::format("{},{},{},{},{}\n", r.seed, r.dc_holds ? 1 : 0, r.dc_min, r.ac_fitted_cd,
                       r.digit_max_mult);
}

inline void write_rows_csv(std::ostream& out, std::span<const ExperimentRow> rows,
                           const Provenance& prov) {
  out << prov.csv_header()
      << "degree,trial,seed,total_iterations_chosen,far_steps,intermediate_steps,near_steps,"
         "outside_steps,dc_holds,dc_min,ac_holds,ac_fitted_Cd,unresolved,max_near_phase,"
         "floor_violations,min_floor_ratio,outside_violations,orbits_run\n";
  for (const ExperimentRow& r : rows)
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.degree, r.trial,
                       r.seed, r.total_iterations_chosen, r.far_steps, r.intermediate_steps,
                       r.near_steps, r.outside_steps, r.dc_holds ? 1 : 0, r.dc_min,
                       r.ac_holds ? 1 : 0, r.ac_fitted_cd, r.unresolved, r.max_near_phase,
                       r.floor_violations, r.min_floor_ratio, r.outside_violations, r.orbits_run);
}

inline Json experiment_summary_json(const ExperimentReport& r, const Provenance& prov) {
  Json j;
  j["provenance"] = prov.to_json();
  Json fit;
  fit["beta"] = number_or_null(r.fit.beta);
  fit["intercept"] = number_or_null(r.fit.intercept);
  fit["raw_beta"] = number_or_null(r.fit.raw_beta);
  fit["model"] = "median total ~ c * d^beta * ln(d)^4 over DC-satisfying trials";
  fit["beta_bracket"] = Json::array({slack::kBetaMin, slack::kBetaMax});
  j["fit"] = fit;
  Json degrees = Json::array();
  for (const DegreeSummary& s : r.summaries) {
    Json e;
    e["degree"] = s.degree;
    e["trials"] = s.trials;
    e["dc_trials"] = s.dc_trials;
    e["median_total"] = number_or_null(s.median_total);
    e["median_far"] = number_or_null(s.median_far);
    e["median_intermediate"] = number_or_null(s.median_intermediate);
    e["median_near"] = number_or_null(s.median_near);
    e["median_outside"] = number_or_null(s.median_outside);
    degrees.push_back(e);
  }
  j["degrees"] = degrees;
  Json audit;
  audit["common_c"] = number_or_null(r.audit.common_c);
  audit["truncated_input"] = r.audit.truncated_input;
  Json rows = Json::array();
  for (const AuditRow& a : r.audit.rows) {
    Json e;
    e["regime"] = std::string(to_string(a.regime));
    e["steps"] = a.steps;
    e["min_displacement"] = number_or_null(a.min_displacement);
    e["fitted_c"] = number_or_null(a.fitted_c);
    e["violations"] = a.violations;
    e["area_bound_violations"] = a.area_bound_violations;
    rows.push_back(e);
  }
  audit["rows"] = rows;
  j["displacement_audit"] = audit;
  Json sweep = Json::array();
  for (const SweepRow& s : r.sweep) {
    Json e;
    e["epsilon"] = s.epsilon;
    e["budget"] = s.budget;
    e["budget_slack"] = slack::kNearBudget;
    e["dc_trials"] = s.dc_trials;
    e["max_near_phase"] = s.max_near_phase;
    e["mean_near_phase"] = s.mean_near_phase;
    e["violations"] = s.violations;
    sweep.push_back(e);
  }
  j["epsilon_sweep"] = sweep;
  Json slacks;
  slacks["floor_fraction"] = slack::kFloorFraction;
  slacks["near_budget"] = slack::kNearBudget;
  slacks["beta_min"] = slack::kBetaMin;
  slacks["beta_max"] = slack::kBetaMax;
  j["slack"] = slacks;
  return j;
}

}  // namespace newton_atlas
