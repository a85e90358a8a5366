#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "pinn/common.hpp"
#include "pinn/dual.hpp"
#include "pinn/grid.hpp"

namespace pinn {

/// Evaluates a (space, time) -> value callable on an equidistant grid.
template <class E>
GridField evaluate_on_grid(E&& f, Interval range0, Interval range1, std::size_t n0,
                           std::size_t n1) {
  GridField g(n0, n1, range0, range1);
  for (std::size_t i = 0; i < n0; ++i)
    for (std::size_t j = 0; j < n1; ++j) {
      const double in[2] = {g.coord0(i), g.coord1(j)};
      g.at(i, j) = f(std::span<const double>(in, 2));
    }
  return g;
}

/// Mean squared error over congruent grids.
inline double mse_error(const GridField& u, const GridField& approx) {
  if (!u.congruent(approx)) throw StructuralError("mse_error: incongruent grids");
  double s = 0.0;
  for (std::size_t k = 0; k < u.values.size(); ++k) {
    const double d = u.values[k] - approx.values[k];
    s += d * d;
  }
  return s / static_cast<double>(u.values.size());
}

/// ||x - b||_2 / ||x||_2.
inline double rel_l2_error(std::span<const double> u, std::span<const double> approx) {
  if (u.size() != approx.size()) throw StructuralError("rel_l2_error: size mismatch");
  double err2 = 0.0, ref2 = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double d = u[k] - approx[k];
    err2 += d * d;
    ref2 += u[k] * u[k];
  }
  return std::sqrt(err2) / std::sqrt(ref2);
}

inline double rel_l2_error(const GridField& u, const GridField& approx) {
  if (!u.congruent(approx)) throw StructuralError("rel_l2_error: incongruent grids");
  return rel_l2_error(std::span<const double>(u.values), std::span<const double>(approx.values));
}

/// |u - approx| per cell.
inline GridField abs_error_field(const GridField& u, const GridField& approx) {
  if (!u.congruent(approx)) throw StructuralError("abs_error_field: incongruent grids");
  GridField g = u;
  for (std::size_t k = 0; k < g.values.size(); ++k)
    g.values[k] = std::abs(approx.values[k] - u.values[k]);
  return g;
}

/// approx/u - 1, with a NaN sentinel where |u| < 1e-12 (the relative error
/// blows up where the solution crosses zero); aggregates must skip NaNs.
inline GridField relative_error_field(const GridField& u, const GridField& approx) {
  if (!u.congruent(approx)) throw StructuralError("relative_error_field: incongruent grids");
  GridField g = u;
  for (std::size_t k = 0; k < g.values.size(); ++k)
    g.values[k] = std::abs(u.values[k]) < 1e-12
                      ? std::numeric_limits<double>::quiet_NaN()
                      : approx.values[k] / u.values[k] - 1.0;
  return g;
}

/// |grad f|_2 at every grid node, via one forward-dual pass per axis.
template <class E>
GridField gradient_norm_field(E&& f, Interval range0, Interval range1, std::size_t n0,
                              std::size_t n1) {
  GridField g(n0, n1, range0, range1);
  for (std::size_t i = 0; i < n0; ++i)
    for (std::size_t j = 0; j < n1; ++j) {
      double s = 0.0;
      for (int axis = 0; axis < 2; ++axis) {
        const Dual1 in[2] = {Dual1(g.coord0(i), axis == 0 ? 1.0 : 0.0),
                             Dual1(g.coord1(j), axis == 1 ? 1.0 : 0.0)};
        const double d = f(std::span<const Dual1>(in, 2)).d;
        s += d * d;
      }
      g.at(i, j) = std::sqrt(s);
    }
  return g;
}

/// Trapezoidal quadrature of (grad u - grad approx).(grad u - grad approx)
/// over the 2-D domain; gradients come from forward duals of both
/// evaluators.
template <class U, class A>
double energy_error(U&& u, A&& approx, Interval range0, Interval range1, std::size_t n0 = 200,
                    std::size_t n1 = 400) {
  if (n0 < 2 || n1 < 2) throw ArgumentError("energy_error: need at least a 2x2 grid");
  const double h0 = range0.length() / static_cast<double>(n0 - 1);
  const double h1 = range1.length() / static_cast<double>(n1 - 1);
  double total = 0.0;
  for (std::size_t i = 0; i < n0; ++i) {
    const double x = range0.lo + h0 * static_cast<double>(i);
    const double wi = (i == 0 || i == n0 - 1) ? 0.5 : 1.0;
    for (std::size_t j = 0; j < n1; ++j) {
      const double t = range1.lo + h1 * static_cast<double>(j);
      const double wj = (j == 0 || j == n1 - 1) ? 0.5 : 1.0;
      double sq = 0.0;
      for (int axis = 0; axis < 2; ++axis) {
        const Dual1 in[2] = {Dual1(x, axis == 0 ? 1.0 : 0.0), Dual1(t, axis == 1 ? 1.0 : 0.0)};
        const std::span<const Dual1> span_in(in, 2);
        const double d = u(span_in).d - approx(span_in).d;
        sq += d * d;
      }
      total += wi * wj * sq;
    }
  }
  return total * h0 * h1;
}

/// Least-squares fit of log e = log gamma + exponent * log N.
/// Returns (gamma, exponent).
inline std::pair<double, double> fit_convergence_rate(
    std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw ArgumentError("fit_convergence_rate: need at least 3 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [n, e] : points) {
    if (!(n > 0.0) || !(e > 0.0))
      throw ArgumentError("fit_convergence_rate: inputs must be positive");
    const double lx = std::log(n), ly = std::log(e);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double m = static_cast<double>(points.size());
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) throw ArgumentError("fit_convergence_rate: degenerate abscissae");
  const double slope = (m * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / m;
  return {std::exp(intercept), slope};
}

namespace detail {
/// Average ranks (ties share the mean rank); NaN entries must be filtered
/// before calling.
inline std::vector<double> ranks(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size(), 0.0);
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}
}  // namespace detail

/// Spearman rank correlation across grid cells; NaN cells (in either field)
/// are excluded. A constant field has no defined ranking: returns NaN.
inline double error_gradient_correlation(const GridField& abs_error,
                                         const GridField& gradient_norm) {
  if (!abs_error.congruent(gradient_norm))
    throw StructuralError("error_gradient_correlation: incongruent grids");
  std::vector<double> a, b;
  a.reserve(abs_error.values.size());
  b.reserve(abs_error.values.size());
  for (std::size_t k = 0; k < abs_error.values.size(); ++k) {
    if (std::isnan(abs_error.values[k]) || std::isnan(gradient_norm.values[k])) continue;
    a.push_back(abs_error.values[k]);
    b.push_back(gradient_norm.values[k]);
  }
  if (a.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const std::vector<double> ra = detail::ranks(a);
  const std::vector<double> rb = detail::ranks(b);
  const double mean = 0.5 * (static_cast<double>(ra.size()) + 1.0);
  double num = 0.0, da = 0.0, db = 0.0;
  for (std::size_t k = 0; k < ra.size(); ++k) {
    num += (ra[k] - mean) * (rb[k] - mean);
    da += (ra[k] - mean) * (ra[k] - mean);
    db += (rb[k] - mean) * (rb[k] - mean);
  }
  if (da == 0.0 || db == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return num / std::sqrt(da * db);
}

/// Error summary of an approximation against a reference.
struct ErrorReport {
  double energy = std::numeric_limits<double>::quiet_NaN();  ///< NaN without a smooth reference
  double mse = 0.0;
  double rel_l2 = 0.0;
  GridField abs_error;
  GridField rel_error;
  GridField gradient_norm;
  double error_gradient_corr = std::numeric_limits<double>::quiet_NaN();
};

/// Report from two differentiable evaluators (analytical reference case).
template <class U, class A>
ErrorReport error_report(U&& u, A&& approx, Interval range0, Interval range1,
                         std::size_t n0 = 200, std::size_t n1 = 400) {
  ErrorReport r;
  GridField ug = evaluate_on_grid(u, range0, range1, n0, n1);
  GridField ag = evaluate_on_grid(approx, range0, range1, n0, n1);
  r.energy = energy_error(u, approx, range0, range1, n0, n1);
  r.mse = mse_error(ug, ag);
  r.rel_l2 = rel_l2_error(ug, ag);
  r.abs_error = abs_error_field(ug, ag);
  r.rel_error = relative_error_field(ug, ag);
  r.gradient_norm = gradient_norm_field(approx, range0, range1, n0, n1);
  r.error_gradient_corr = error_gradient_correlation(r.abs_error, r.gradient_norm);
  return r;
}

/// Report against a gridded reference (FD case): the approximation is
/// evaluated at the reference's nodes; no energy norm without a smooth
/// reference.
template <class A>
ErrorReport error_report_grid(const GridField& u, A&& approx) {
  ErrorReport r;
  GridField ag = u;
  for (std::size_t i = 0; i < u.n0; ++i)
    for (std::size_t j = 0; j < u.n1; ++j) {
      const double in[2] = {u.coord0(i), u.coord1(j)};
      ag.at(i, j) = approx(std::span<const double>(in, 2));
    }
  r.mse = mse_error(u, ag);
  r.rel_l2 = rel_l2_error(u, ag);
  r.abs_error = abs_error_field(u, ag);
  r.rel_error = relative_error_field(u, ag);
  r.gradient_norm = gradient_norm_field(approx, u.range0, u.range1, u.n0, u.n1);
  r.error_gradient_corr = error_gradient_correlation(r.abs_error, r.gradient_norm);
  return r;
}

}  // namespace pinn
