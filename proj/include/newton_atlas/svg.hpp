#pragma once

// Static SVG figures for experiment reports: log-log scaling scatter with the
// fitted line, per-regime stacked bars, and per-regime displacement histograms.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "experiment.hpp"
#include "io.hpp"

namespace newton_atlas::svg {

inline constexpr int kWidth = 640;
inline constexpr int kHeight = 420;
inline constexpr int kMargin = 60;

inline constexpr std::array<const char*, 4> kRegimeColors{"#4e79a7", "#f28e2b", "#59a14f", "#e15759"};

struct Canvas {
  std::string body;

  void text(double x, double y, const std::string& s, const char* anchor = "middle", int size = 12) {
    body += fmt::format(R"(<text x="{:.2f}" y="{:.2f}" font-size="{}" text-anchor="{}">{}</text>)", x, y,
                        size, anchor, s);
    body += '\n';
  }
  void line(double x1, double y1, double x2, double y2, const char* stroke, double width = 1.0) {
    body += fmt::format(
        R"(<line x1="{:.2f}" y1="{:.2f}" x2="{:.2f}" y2="{:.2f}" stroke="{}" stroke-width="{}"/>)", x1,
        y1, x2, y2, stroke, width);
    body += '\n';
  }
  void rect(double x, double y, double w, double h, const char* fill) {
    body += fmt::format(R"(<rect x="{:.2f}" y="{:.2f}" width="{:.2f}" height="{:.2f}" fill="{}"/>)", x,
                        y, w, h, fill);
    body += '\n';
  }
  void circle(double x, double y, double r, const char* fill) {
    body += fmt::format(R"(<circle cx="{:.2f}" cy="{:.2f}" r="{:.2f}" fill="{}"/>)", x, y, r, fill);
    body += '\n';
  }

  std::string finish(const Provenance& prov, const std::string& title) const {
    std::string out = R"(<?xml version="1.0" encoding="UTF-8"?>)";
    out += "\n<!-- " + std::string(kToolName) + " " + kToolVersion + " config: " + prov.config.dump() +
           " -->\n";
    out += fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">)",
                       kWidth, kHeight, kWidth, kHeight);
    out += "\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += fmt::format(R"(<text x="{}" y="24" font-size="15" text-anchor="middle">{}</text>)", kWidth / 2,
                       title);
    out += '\n' + body + "</svg>\n";
    return out;
  }

  void axes(const std::string& xlabel, const std::string& ylabel) {
    line(kMargin, kHeight - kMargin, kWidth - kMargin / 2.0, kHeight - kMargin, "black");
    line(kMargin, 40, kMargin, kHeight - kMargin, "black");
    text((kWidth + kMargin / 2.0) / 2.0, kHeight - 18, xlabel);
    body += fmt::format(
        R"svg(<text x="16" y="{}" font-size="12" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>)svg",
        kHeight / 2, kHeight / 2, ylabel);
    body += '\n';
  }
};

/// ln(median total) against ln d, with the fitted c d^beta ln^4 d curve.
inline std::string scaling_plot(const ExperimentReport& r, const Provenance& prov) {
  Canvas c;
  c.axes("ln d", "ln(median total chosen iterations)");
  std::vector<std::pair<double, double>> pts;
  for (const auto& s : r.summaries)
    if (s.median_total > 0.0) pts.emplace_back(std::log(s.degree), std::log(s.median_total));
  if (!pts.empty()) {
    double x0 = pts.front().first, x1 = pts.back().first;
    double y0 = pts.front().second, y1 = y0;
    for (const auto& [x, y] : pts) {
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
    if (x1 == x0) x1 = x0 + 1.0;
    if (y1 == y0) y1 = y0 + 1.0;
    const double pad_y = 0.1 * (y1 - y0);
    y0 -= pad_y;
    y1 += pad_y;
    auto sx = [&](double x) { return kMargin + (x - x0) / (x1 - x0) * (kWidth - 1.5 * kMargin); };
    auto sy = [&](double y) { return kHeight - kMargin - (y - y0) / (y1 - y0) * (kHeight - kMargin - 40); };
    if (std::isfinite(r.fit.beta)) {
      constexpr int kSegments = 40;
      for (int i = 0; i < kSegments; ++i) {
        const double xa = x0 + (x1 - x0) * i / kSegments, xb = x0 + (x1 - x0) * (i + 1) / kSegments;
        auto model = [&](double x) { return r.fit.intercept + r.fit.beta * x + 4.0 * std::log(x); };
        c.line(sx(xa), sy(model(xa)), sx(xb), sy(model(xb)), "#e15759", 1.5);
      }
    }
    for (const auto& [x, y] : pts) {
      c.circle(sx(x), sy(y), 4.0, "#4e79a7");
      c.text(sx(x), kHeight - kMargin + 16, fmt::format("{:.2f}", x), "middle", 10);
      c.text(kMargin - 4, sy(y) + 4, fmt::format("{:.2f}", y), "end", 10);
    }
  }
  c.text(kWidth - kMargin, 56,
         fmt::format("beta = {:.3f} (ln^4 d removed), raw slope = {:.3f}", r.fit.beta, r.fit.raw_beta), "end");
  return c.finish(prov, "Chosen-orbit iterations vs degree");
}

/// Median steps per regime for each degree, stacked.
inline std::string regime_bars(const ExperimentReport& r, const Provenance& prov) {
  Canvas c;
  c.axes("degree", "median chosen steps");
  double top = 1.0;
  for (const auto& s : r.summaries)
    top = std::max(top, s.median_far + s.median_intermediate + s.median_near + s.median_outside);
  const double n = static_cast<double>(std::max<std::size_t>(r.summaries.size(), 1));
  const double slot = (kWidth - 1.5 * kMargin) / n;
  const double plot_h = kHeight - kMargin - 40;
  for (std::size_t i = 0; i < r.summaries.size(); ++i) {
    const auto& s = r.summaries[i];
    const std::array<double, 4> parts{s.median_far, s.median_intermediate, s.median_near, s.median_outside};
    double base = kHeight - kMargin;
    const double x = kMargin + slot * static_cast<double>(i) + 0.15 * slot;
    for (std::size_t k = 0; k < parts.size(); ++k) {
      const double v = std::isfinite(parts[k]) ? parts[k] : 0.0;
      const double h = v / top * plot_h;
      c.rect(x, base - h, 0.7 * slot, h, kRegimeColors[k]);
      base -= h;
    }
    c.text(x + 0.35 * slot, kHeight - kMargin + 16, std::to_string(s.degree));
  }
  for (std::size_t k = 0; k < 4; ++k) {
    c.rect(kWidth - 150, 44 + 18.0 * k, 12, 12, kRegimeColors[k]);
    c.text(kWidth - 132, 54 + 18.0 * k, std::string(to_string(static_cast<Regime>(k))), "start");
  }
  c.text(kMargin - 4, 48, fmt::format("{:.0f}", top), "end", 10);
  return c.finish(prov, "Chosen-orbit steps per regime (median over DC trials)");
}

/// log10 displacement histograms, one polyline per regime.
inline std::string displacement_histograms(const ExperimentReport& r, const Provenance& prov) {
  using H = DisplacementHistogram;
  Canvas c;
  c.axes("log10 |z_n - z_(n+1)|", "steps (normalized per regime)");
  const double plot_w = kWidth - 1.5 * kMargin;
  const double plot_h = kHeight - kMargin - 40;
  for (std::size_t k = 0; k < 4; ++k) {
    const auto& bins = r.histogram.counts[k];
    const auto peak = *std::max_element(bins.begin(), bins.end());
    if (peak == 0) continue;
    for (std::size_t b = 0; b + 1 < H::kBins; ++b) {
      const double xa = kMargin + plot_w * (b + 0.5) / H::kBins;
      const double xb = kMargin + plot_w * (b + 1.5) / H::kBins;
      const double ya = kHeight - kMargin - plot_h * static_cast<double>(bins[b]) / static_cast<double>(peak);
      const double yb = kHeight - kMargin - plot_h * static_cast<double>(bins[b + 1]) / static_cast<double>(peak);
      c.line(xa, ya, xb, yb, kRegimeColors[k], 1.5);
    }
    c.rect(kWidth - 150, 44 + 18.0 * k, 12, 12, kRegimeColors[k]);
    c.text(kWidth - 132, 54 + 18.0 * k, std::string(to_string(static_cast<Regime>(k))), "start");
  }
  for (int e = -20; e <= 2; e += 4) {
    const double x = kMargin + plot_w * ((e - H::kLow) / H::kWidth) / H::kBins;
    c.text(x, kHeight - kMargin + 16, std::to_string(e), "middle", 10);
  }
  return c.finish(prov, "Displacement distribution per regime (chosen orbits)");
}

}  // namespace newton_atlas::svg
