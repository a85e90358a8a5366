#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "pinn/common.hpp"

namespace pinn {

/// Rectangular field sampled on an equidistant 2-D grid, values row-major
/// with axis0 as the slow index: values[i0 * n1 + i1].
struct GridField {
  std::size_t n0 = 0, n1 = 0;
  Interval range0, range1;
  std::vector<double> values;

  GridField() = default;
  GridField(std::size_t rows, std::size_t cols, Interval r0, Interval r1)
      : n0(rows), n1(cols), range0(r0), range1(r1), values(rows * cols, 0.0) {}

  double coord0(std::size_t i) const {
    return n0 > 1 ? range0.lo + range0.length() * static_cast<double>(i) / (n0 - 1) : range0.lo;
  }
  double coord1(std::size_t j) const {
    return n1 > 1 ? range1.lo + range1.length() * static_cast<double>(j) / (n1 - 1) : range1.lo;
  }
  double& at(std::size_t i, std::size_t j) { return values[i * n1 + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * n1 + j]; }

  bool congruent(const GridField& o) const { return n0 == o.n0 && n1 == o.n1; }
};

inline void save_grid_csv(const GridField& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot open " + path + " for writing");
  out << "axis0,axis1,value\n";
  char buf[3][64];
  for (std::size_t i = 0; i < g.n0; ++i) {
    for (std::size_t j = 0; j < g.n1; ++j) {
      std::snprintf(buf[0], sizeof buf[0], "%.17g", g.coord0(i));
      std::snprintf(buf[1], sizeof buf[1], "%.17g", g.coord1(j));
      std::snprintf(buf[2], sizeof buf[2], "%.17g", g.at(i, j));
      out << buf[0] << ',' << buf[1] << ',' << buf[2] << '\n';
    }
  }
  if (!out) throw ArgumentError("write failed for " + path);
}

inline GridField load_grid_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("axis0,axis1,value", 0) != 0)
    throw ArgumentError(path + ": missing GridField header");
  std::vector<double> a0, a1, v;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double x, y, z;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &y, &z) != 3)
      throw ArgumentError(path + ": malformed row '" + line + "'");
    a0.push_back(x);
    a1.push_back(y);
    v.push_back(z);
  }
  if (v.empty()) throw ArgumentError(path + ": no data rows");
  // axis1 cycles fastest (row-major); its period gives n1
  std::size_t n1 = 1;
  while (n1 < a0.size() && a0[n1] == a0[0]) ++n1;
  if (a0.size() % n1 != 0) throw ArgumentError(path + ": ragged grid");
  GridField g;
  g.n1 = n1;
  g.n0 = a0.size() / n1;
  g.range0 = {a0.front(), a0.back()};
  g.range1 = {a1.front(), a1[n1 - 1]};
  g.values = std::move(v);
  return g;
}

}  // namespace pinn
