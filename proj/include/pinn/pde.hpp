#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "pinn/common.hpp"
#include "pinn/dual.hpp"
#include "pinn/grid.hpp"

namespace pinn {

enum class PdeKind { kWave1d, kBurgers, kHeat2d, kMembrane2d };

inline const char* pde_name(PdeKind k) {
  switch (k) {
    case PdeKind::kWave1d: return "wave1d";
    case PdeKind::kBurgers: return "burgers";
    case PdeKind::kHeat2d: return "heat2d";
    case PdeKind::kMembrane2d: return "membrane2d";
  }
  return "?";
}

/// Problem definition: domain axes (spatial axes first, time last), the
/// residual operator's coefficient, IC/BC data and, where known, the
/// analytical series solution.
struct PdeProblem {
  PdeKind kind = PdeKind::kWave1d;
  double c = 1.0;           ///< wave speed (wave1d; membrane fixes c = 6)
  double nu = 0.01 / std::numbers::pi;  ///< viscosity (burgers)
  double alpha = 1.28e-4;   ///< thermal diffusivity (heat2d)
  std::vector<Interval> axes;
  std::array<double, 4> heat_bc{100.0, 25.0, 200.0, 0.0};  ///< x=0, x=1, y=0, y=1
  double heat_ic = 50.0;
  int series_terms = 1000;  ///< wave1d partial-sum truncation
  int series_terms_each = 100;  ///< membrane double-sum truncation per index

  int num_inputs() const { return static_cast<int>(axes.size()); }
  int num_space_axes() const { return num_inputs() - 1; }
  const Interval& time_axis() const { return axes.back(); }

  bool has_analytical() const {
    return kind == PdeKind::kWave1d || kind == PdeKind::kMembrane2d;
  }
  /// u_t(x, 0) = 0 is part of the problem statement for the second-order-
  /// in-time equations.
  bool has_initial_velocity() const {
    return kind == PdeKind::kWave1d || kind == PdeKind::kMembrane2d;
  }
  bool homogeneous_dirichlet() const { return kind != PdeKind::kHeat2d; }

  void validate() const {
    for (const Interval& ax : axes)
      if (!(ax.lo < ax.hi)) throw ArgumentError("domain axis with lo >= hi");
    if (c <= 0.0 || nu <= 0.0 || alpha <= 0.0)
      throw ArgumentError("PDE coefficients must be strictly positive");
  }
};

inline PdeProblem make_problem(PdeKind kind) {
  PdeProblem p;
  p.kind = kind;
  switch (kind) {
    case PdeKind::kWave1d:
      p.axes = {{0.0, 2.0}, {0.0, 4.0}};
      break;
    case PdeKind::kBurgers:
      p.axes = {{-1.0, 1.0}, {0.0, 1.0}};
      break;
    case PdeKind::kHeat2d:
      p.axes = {{0.0, 1.0}, {0.0, 1.0}, {0.0, 20.0}};
      break;
    case PdeKind::kMembrane2d:
      p.axes = {{0.0, 2.0}, {0.0, 3.0}, {0.0, 1.0}};
      p.c = 6.0;
      break;
  }
  return p;
}

// ---------------------------------------------------------------------------
// Closed-form problem data, templated so jets/duals can flow through them.
// ---------------------------------------------------------------------------

/// Initial condition u(space, t=0).
template <class V>
V ic_value(const PdeProblem& p, std::span<const V> space) {
  switch (p.kind) {
    case PdeKind::kWave1d: return space[0] * (2.0 - space[0]);
    case PdeKind::kBurgers: return -(sin(space[0] * std::numbers::pi));
    case PdeKind::kHeat2d: return space[0] * 0.0 + p.heat_ic;  // constant, anchored to V
    case PdeKind::kMembrane2d:
      return space[0] * space[1] * (2.0 - space[0]) * (3.0 - space[1]);
  }
  return space[0] * 0.0;
}

/// Product of (x_i - lo)(hi - x_i) over spatial axes; vanishes on the whole
/// spatial boundary. For the membrane this is xy(2-x)(3-y), the same factor
/// the IC uses.
template <class V>
V boundary_factor(const PdeProblem& p, std::span<const V> space) {
  V f = (space[0] - p.axes[0].lo) * (p.axes[0].hi - space[0]);
  for (int a = 1; a < p.num_space_axes(); ++a) {
    const Interval& ax = p.axes[a];
    f = f * ((space[a] - ax.lo) * (ax.hi - space[a]));
  }
  return f;
}

// ---------------------------------------------------------------------------
// Input-derivative probes via nested duals.
// ---------------------------------------------------------------------------

namespace detail {
template <class E>
double eval_plain(E&& net, std::span<const double> in) {
  return net(in);
}

/// (value, d/dx_i, d2/dx_i2) in one nested-dual evaluation.
template <class E>
std::array<double, 3> value_first_second(E&& net, std::span<const double> in, int i) {
  std::vector<Dual2> x(in.size());
  for (std::size_t k = 0; k < in.size(); ++k) {
    const double s = static_cast<int>(k) == i ? 1.0 : 0.0;
    x[k] = Dual2(Dual1(in[k], s), Dual1(s, 0.0));
  }
  Dual2 y = net(std::span<const Dual2>(x));
  return {y.v.v, y.v.d, y.d.d};
}

template <class E>
double first_partial(E&& net, std::span<const double> in, int i) {
  std::vector<Dual1> x(in.size());
  for (std::size_t k = 0; k < in.size(); ++k)
    x[k] = Dual1(in[k], static_cast<int>(k) == i ? 1.0 : 0.0);
  return net(std::span<const Dual1>(x)).d;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Residual operators N(net): zero at exact solutions.
// ---------------------------------------------------------------------------

/// u_tt - c^2 u_xx
template <class E>
double wave1d_residual(E&& net, double x, double t, double c) {
  const double in[2] = {x, t};
  const double u_xx = detail::value_first_second(net, in, 0)[2];
  const double u_tt = detail::value_first_second(net, in, 1)[2];
  return u_tt - c * c * u_xx;
}

/// u_t + u u_x - nu u_xx
template <class E>
double burgers_residual(E&& net, double x, double t, double nu) {
  const double in[2] = {x, t};
  const auto vx = detail::value_first_second(net, in, 0);
  const double u_t = detail::first_partial(net, in, 1);
  return u_t + vx[0] * vx[1] - nu * vx[2];
}

/// u_t - alpha (u_xx + u_yy)
template <class E>
double heat2d_residual(E&& net, double x, double y, double t, double alpha_diff) {
  const double in[3] = {x, y, t};
  const double u_xx = detail::value_first_second(net, in, 0)[2];
  const double u_yy = detail::value_first_second(net, in, 1)[2];
  const double u_t = detail::first_partial(net, in, 2);
  return u_t - alpha_diff * (u_xx + u_yy);
}

/// u_tt - 6^2 (u_xx + u_yy)
template <class E>
double membrane_residual(E&& net, double x, double y, double t) {
  const double in[3] = {x, y, t};
  const double u_xx = detail::value_first_second(net, in, 0)[2];
  const double u_yy = detail::value_first_second(net, in, 1)[2];
  const double u_tt = detail::value_first_second(net, in, 2)[2];
  return u_tt - 36.0 * (u_xx + u_yy);
}

/// Dispatch on problem kind; `in` is (space..., t).
template <class E>
double pde_residual(const PdeProblem& p, E&& net, std::span<const double> in) {
  switch (p.kind) {
    case PdeKind::kWave1d: return wave1d_residual(net, in[0], in[1], p.c);
    case PdeKind::kBurgers: return burgers_residual(net, in[0], in[1], p.nu);
    case PdeKind::kHeat2d: return heat2d_residual(net, in[0], in[1], in[2], p.alpha);
    case PdeKind::kMembrane2d: return membrane_residual(net, in[0], in[1], in[2]);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Analytical series solutions.
// ---------------------------------------------------------------------------

/// Fourier coefficient of the 1D wave problem, kept in the exact form that
/// separation of variables produces (the sin(pi n) term is identically zero
/// for integer n but is part of the derived expression).
inline double wave1d_series_coefficient(int n) {
  const double pi = std::numbers::pi;
  return -(8.0 * pi * n * std::sin(pi * n) + 16.0 * std::cos(pi * n) - 16.0) /
         (pi * pi * pi * static_cast<double>(n) * n * n);
}

/// Partial sum of sum_n alpha_n cos(n pi t / 2) sin(n pi x / 2).
template <class V>
V wave1d_series(const V& x, const V& t, int n_terms) {
  if (n_terms < 1) throw ArgumentError("wave1d_series: n_terms must be >= 1");
  const double pi = std::numbers::pi;
  V u = x * 0.0;
  for (int n = 1; n <= n_terms; ++n) {
    const double a = wave1d_series_coefficient(n);
    if (a == 0.0) continue;
    u = u + a * (cos(t * (n * pi / 2.0)) * sin(x * (n * pi / 2.0)));
  }
  return u;
}

/// Coefficient of the membrane double series; the (1 + (-1)^{i+1}) factors
/// kill every even index. Prefactor 576/pi^6 from the separable Fourier
/// coefficients of the IC xy(2-x)(3-y).
inline double membrane_series_coefficient(int i, int j) {
  const double pref = 576.0 / std::pow(std::numbers::pi, 6);
  return pref * (1.0 + std::pow(-1.0, i + 1)) * (1.0 + std::pow(-1.0, j + 1)) /
         (static_cast<double>(i) * i * i * static_cast<double>(j) * j * j);
}

/// Double series for the vibrating membrane on [0,2]x[0,3] with c = 6.
template <class V>
V membrane_series(const V& x, const V& y, const V& t, int n_terms_each) {
  if (n_terms_each < 1) throw ArgumentError("membrane_series: n_terms_each must be >= 1");
  const double pi = std::numbers::pi;
  V u = x * 0.0;
  for (int i = 1; i <= n_terms_each; i += 2) {  // even indices have zero coefficient
    for (int j = 1; j <= n_terms_each; j += 2) {
      const double cij = membrane_series_coefficient(i, j);
      const double omega = pi * std::sqrt(9.0 * static_cast<double>(i) * i +
                                          4.0 * static_cast<double>(j) * j);
      u = u + cij * (sin(x * (i * pi / 2.0)) * sin(y * (j * pi / 3.0)) * cos(t * omega));
    }
  }
  return u;
}

/// Analytical solution at (space..., t); only wave1d and membrane2d have one.
template <class V>
V analytical_solution(const PdeProblem& p, std::span<const V> in) {
  switch (p.kind) {
    case PdeKind::kWave1d: return wave1d_series(in[0], in[1], p.series_terms);
    case PdeKind::kMembrane2d:
      return membrane_series(in[0], in[1], in[2], p.series_terms_each);
    default:
      throw ArgumentError(std::string("no analytical solution for ") + pde_name(p.kind));
  }
}

// ---------------------------------------------------------------------------
// Finite-difference reference solvers.
// ---------------------------------------------------------------------------

/// Explicit update of one heat-equation cell from its four neighbours.
inline double heat_explicit_update(double phi, double left, double right, double down, double up,
                                   double alpha_diff, double h, double dt) {
  const double r = dt * alpha_diff / (h * h);
  return (1.0 - 4.0 * r) * phi + dt * alpha_diff * ((left + right + down + up) / (h * h));
}

struct HeatSnapshot {
  double time = 0.0;
  GridField field;
};

/// Explicit FD solve of the unit-square heat problem (Dirichlet faces
/// BC1..BC4, uniform interior IC). Snapshots include t = 0.
inline std::vector<HeatSnapshot> heat2d_fd_solve(const PdeProblem& p, double h, double dt,
                                                 int steps, int snapshot_every = 0) {
  if (p.kind != PdeKind::kHeat2d) throw ArgumentError("heat2d_fd_solve: wrong problem kind");
  if (h <= 0.0 || dt <= 0.0 || steps < 0) throw ArgumentError("heat2d_fd_solve: bad resolution");
  const double bound = h * h / (4.0 * p.alpha);
  if (dt > bound)
    throw RejectedConfigError("unstable configuration: require dt <= h^2/(4*alpha), i.e. dt <= " +
                              std::to_string(bound));
  const int n = static_cast<int>(std::lround(1.0 / h)) + 1;
  if (n < 3) throw ArgumentError("heat2d_fd_solve: grid too coarse");

  GridField f(static_cast<std::size_t>(n), static_cast<std::size_t>(n), {0.0, 1.0}, {0.0, 1.0});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) f.at(i, j) = p.heat_ic;
  for (int j = 0; j < n; ++j) {
    f.at(0, j) = p.heat_bc[0];      // x = 0
    f.at(n - 1, j) = p.heat_bc[1];  // x = 1
  }
  for (int i = 0; i < n; ++i) {
    f.at(i, 0) = p.heat_bc[2];      // y = 0
    f.at(i, n - 1) = p.heat_bc[3];  // y = 1
  }

  std::vector<HeatSnapshot> out;
  out.push_back({0.0, f});
  GridField next = f;
  for (int k = 1; k <= steps; ++k) {
    for (int i = 1; i < n - 1; ++i)
      for (int j = 1; j < n - 1; ++j)
        next.at(i, j) = heat_explicit_update(f.at(i, j), f.at(i - 1, j), f.at(i + 1, j),
                                             f.at(i, j - 1), f.at(i, j + 1), p.alpha, h, dt);
    std::swap(f.values, next.values);
    if (snapshot_every > 0 && (k % snapshot_every == 0 || k == steps))
      out.push_back({k * dt, f});
  }
  if (snapshot_every <= 0 && steps > 0) out.push_back({steps * dt, f});
  return out;
}

/// Explicit FD solve of viscous Burgers on [-1,1], IC -sin(pi x), zero
/// Dirichlet BCs: upwind convection, central diffusion. Returns the field on
/// an (x, t) grid with nt_out equally spaced time slices (including t=0, T).
/// Pass dt = 0 to pick 0.9x the stability bound automatically.
inline GridField burgers_fd_solve(double nu, int nx, double dt, double T, int nt_out = 201) {
  if (nu <= 0.0 || nx < 8 || T <= 0.0 || nt_out < 2)
    throw ArgumentError("burgers_fd_solve: bad configuration");
  const double h = 2.0 / nx;
  // necessary CFL pair (the documented gate); max|u| = max|IC| = 1 and the
  // scheme's maximum principle keeps it there
  const double bound = std::min(h, h * h / (2.0 * nu));
  // sufficient combined bound for the second-order upwind convection plus
  // central diffusion stencil
  const double combined = 1.0 / (1.5 / h + 2.0 * nu / (h * h));
  if (dt == 0.0) dt = 0.9 * combined;
  if (dt > bound)
    throw RejectedConfigError(
        "unstable configuration: require dt <= min(h/max|u|, h^2/(2*nu)), i.e. dt <= " +
        std::to_string(bound));

  const int slices = nt_out - 1;
  // integer number of steps per output slice, shrinking dt as needed
  const double slice_t = T / slices;
  const int steps_per_slice = std::max(1, static_cast<int>(std::ceil(slice_t / dt)));
  dt = slice_t / steps_per_slice;

  std::vector<double> u(static_cast<std::size_t>(nx) + 1), un(u.size());
  for (int i = 0; i <= nx; ++i) u[i] = -std::sin(std::numbers::pi * (-1.0 + i * h));
  u[0] = u[nx] = 0.0;

  GridField out(u.size(), static_cast<std::size_t>(nt_out), {-1.0, 1.0}, {0.0, T});
  for (int i = 0; i <= nx; ++i) out.at(i, 0) = u[i];

  for (int s = 1; s <= slices; ++s) {
    for (int k = 0; k < steps_per_slice; ++k) {
      for (int i = 1; i < nx; ++i) {
        // second-order upwind-biased difference on u u_x, switched on the
        // local sign (first-order next to the walls); stencil sums are
        // associated so mirrored points round identically
        double ux;
        if (u[i] > 0.0)
          ux = i >= 2 ? ((3.0 * u[i] - 4.0 * u[i - 1]) + u[i - 2]) / (2.0 * h)
                      : (u[i] - u[i - 1]) / h;
        else
          ux = i + 2 <= nx ? -(((3.0 * u[i] - 4.0 * u[i + 1]) + u[i + 2]) / (2.0 * h))
                           : (u[i + 1] - u[i]) / h;
        const double diff = ((u[i - 1] + u[i + 1]) - 2.0 * u[i]) / (h * h);
        un[i] = u[i] + dt * (nu * diff - u[i] * ux);
      }
      un[0] = un[nx] = 0.0;
      std::swap(u, un);
    }
    for (int i = 0; i <= nx; ++i) out.at(i, s) = u[i];
  }
  return out;
}

}  // namespace pinn
