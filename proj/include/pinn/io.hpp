#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "pinn/grid.hpp"
#include "pinn/metrics.hpp"
#include "pinn/training.hpp"

namespace pinn {

inline void save_history_csv(const TrainingHistory& h, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot open " + path + " for writing");
  out << "iter,data_loss,physics_loss,total_loss\n";
  char buf[3][64];
  for (const HistoryRecord& r : h.records) {
    std::snprintf(buf[0], sizeof buf[0], "%.17g", r.data_loss);
    std::snprintf(buf[1], sizeof buf[1], "%.17g", r.physics_loss);
    std::snprintf(buf[2], sizeof buf[2], "%.17g", r.total);
    out << r.iter << ',' << buf[0] << ',' << buf[1] << ',' << buf[2] << '\n';
  }
  if (!out) throw ArgumentError("write failed for " + path);
}

inline void save_report_csv(const ErrorReport& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot open " + path + " for writing");
  out << "energy,mse,rel_l2,error_gradient_corr\n";
  char buf[4][64];
  std::snprintf(buf[0], sizeof buf[0], "%.17g", r.energy);
  std::snprintf(buf[1], sizeof buf[1], "%.17g", r.mse);
  std::snprintf(buf[2], sizeof buf[2], "%.17g", r.rel_l2);
  std::snprintf(buf[3], sizeof buf[3], "%.17g", r.error_gradient_corr);
  out << buf[0] << ',' << buf[1] << ',' << buf[2] << ',' << buf[3] << '\n';
  if (!out) throw ArgumentError("write failed for " + path);
}

/// Renders the field as an SVG heatmap: one rect per cell, linear grayscale
/// (minimum black, maximum white; a constant field maps to mid-gray).
inline void save_svg_heatmap(const GridField& g, const std::string& path,
                             const std::string& label0 = "axis0",
                             const std::string& label1 = "axis1") {
  if (g.values.empty()) throw ArgumentError("cannot render an empty field");
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot open " + path + " for writing");

  double lo = g.values.front(), hi = g.values.front();
  for (double v : g.values) {
    if (std::isnan(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = hi - lo;

  const int cell = std::max<int>(1, static_cast<int>(800 / std::max(g.n0, g.n1)));
  const int margin = 40;
  const std::size_t w = g.n0 * static_cast<std::size_t>(cell) + 2 * margin;
  const std::size_t hgt = g.n1 * static_cast<std::size_t>(cell) + 2 * margin;

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << hgt
      << "\">\n";
  out << "<rect width=\"" << w << "\" height=\"" << hgt << "\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < g.n0; ++i) {
    for (std::size_t j = 0; j < g.n1; ++j) {
      const double v = g.at(i, j);
      int shade = 128;
      if (!std::isnan(v) && span > 0.0)
        shade = static_cast<int>(std::lround(255.0 * (v - lo) / span));
      shade = std::clamp(shade, 0, 255);
      // axis1 increases upward
      const std::size_t x = margin + i * cell;
      const std::size_t y = margin + (g.n1 - 1 - j) * cell;
      out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\""
          << cell << "\" fill=\"rgb(" << shade << ',' << shade << ',' << shade << ")\"/>\n";
    }
  }
  char lo0[32], hi0[32], lo1[32], hi1[32];
  std::snprintf(lo0, sizeof lo0, "%g", g.range0.lo);
  std::snprintf(hi0, sizeof hi0, "%g", g.range0.hi);
  std::snprintf(lo1, sizeof lo1, "%g", g.range1.lo);
  std::snprintf(hi1, sizeof hi1, "%g", g.range1.hi);
  out << "<text x=\"" << w / 2 << "\" y=\"" << hgt - 8 << "\" text-anchor=\"middle\">" << label0
      << " in [" << lo0 << ", " << hi0 << "]</text>\n";
  out << "<text x=\"12\" y=\"" << hgt / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 12 "
      << hgt / 2 << ")\">" << label1 << " in [" << lo1 << ", " << hi1 << "]</text>\n";
  out << "</svg>\n";
  if (!out) throw ArgumentError("write failed for " + path);
}

}  // namespace pinn
