#pragma once

#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pinn/common.hpp"

namespace pinn {

// ---------------------------------------------------------------------------
// Stochastic gradient descent.
// ---------------------------------------------------------------------------

/// theta <- theta - gamma * mean batch gradient. `grad_fn(item)` returns the
/// per-item gradient; the reduction order is the batch order.
template <class Item, class GradFn>
std::vector<double> sgd_step(std::vector<double> params, GradFn&& grad_fn,
                             std::span<const Item> batch, double gamma) {
  if (batch.empty()) throw ArgumentError("sgd_step: empty batch");
  if (gamma <= 0.0) throw ArgumentError("sgd_step: learning rate must be positive");
  std::vector<double> mean(params.size(), 0.0);
  for (const Item& item : batch) {
    std::vector<double> g = grad_fn(item);
    if (g.size() != params.size()) throw StructuralError("sgd_step: gradient size mismatch");
    axpy(1.0, g, mean);
  }
  axpy(-gamma / static_cast<double>(batch.size()), mean, params);
  return params;
}

// ---------------------------------------------------------------------------
// ADAM. Moment updates use the standard pairing m <- b1 m + (1-b1) g,
// v <- b2 v + (1-b2) g.g with bias correction 1 - b^t.
// ---------------------------------------------------------------------------

struct AdamState {
  std::vector<double> m;  ///< first-moment estimate
  std::vector<double> v;  ///< second-moment estimate
  long t = 0;             ///< step counter
  double alpha = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double delta = 1e-8;  ///< divide guard

  static AdamState make(std::size_t n, double alpha = 1e-3, double beta1 = 0.9,
                        double beta2 = 0.999) {
    if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0))
      throw ArgumentError("adam: decay rates must lie in [0,1)");
    if (alpha <= 0.0) throw ArgumentError("adam: step size must be positive");
    AdamState s;
    s.m.assign(n, 0.0);
    s.v.assign(n, 0.0);
    s.alpha = alpha;
    s.beta1 = beta1;
    s.beta2 = beta2;
    return s;
  }
};

inline void adam_step(AdamState& state, std::vector<double>& params,
                      std::span<const double> grad) {
  if (grad.size() != params.size() || state.m.size() != params.size())
    throw StructuralError("adam_step: size mismatch");
  for (std::size_t i = 0; i < grad.size(); ++i)
    if (!std::isfinite(grad[i]))
      throw NumericError("adam_step: non-finite gradient at index " + std::to_string(i));
  state.t += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grad[i];
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grad[i] * grad[i];
    const double m_hat = state.m[i] / bc1;
    const double v_hat = state.v[i] / bc2;
    params[i] -= state.alpha * m_hat / (std::sqrt(v_hat) + state.delta);
  }
}

// ---------------------------------------------------------------------------
// L-BFGS.
// ---------------------------------------------------------------------------

struct LbfgsState {
  struct Pair {
    std::vector<double> s;  ///< parameter delta theta_{k+1} - theta_k
    std::vector<double> y;  ///< gradient delta
    double rho;             ///< 1 / y.s
  };
  std::deque<Pair> history;  ///< newest pair at the back
  std::size_t m = 50;        ///< history cap
  double c1 = 1e-4;          ///< Armijo constant
  double c2 = 0.9;           ///< Wolfe curvature constant

  /// Stores (s, y) unless the curvature safeguard y.s > 1e-10 |y||s| fails,
  /// in which case the pair is discarded. Returns whether it was stored.
  bool push_pair(std::vector<double> s, std::vector<double> y) {
    const double ys = dot(y, s);
    if (!(ys > 1e-10 * norm2(y) * norm2(s))) return false;
    history.push_back({std::move(s), std::move(y), 1.0 / ys});
    while (history.size() > m) history.pop_front();
    return true;
  }

  void clear() { history.clear(); }
};

/// Two-loop recursion over the stored pairs, with initial scaling
/// H0 = (s.y / y.y) I taken from the newest pair. Empty history gives the
/// steepest-descent direction -grad.
inline std::vector<double> lbfgs_direction(const LbfgsState& state, std::span<const double> grad) {
  if (!all_finite(grad)) throw NumericError("lbfgs_direction: non-finite gradient");
  std::vector<double> q(grad.begin(), grad.end());
  if (state.history.empty()) {
    for (double& x : q) x = -x;
    return q;
  }
  std::vector<double> alpha(state.history.size());
  for (std::size_t k = state.history.size(); k-- > 0;) {
    const auto& p = state.history[k];
    alpha[k] = p.rho * dot(p.s, q);
    axpy(-alpha[k], p.y, q);
  }
  const auto& newest = state.history.back();
  const double gamma = dot(newest.s, newest.y) / dot(newest.y, newest.y);
  for (double& x : q) x *= gamma;
  for (std::size_t k = 0; k < state.history.size(); ++k) {
    const auto& p = state.history[k];
    const double beta = p.rho * dot(p.y, q);
    axpy(alpha[k] - beta, p.s, q);
  }
  for (double& x : q) x = -x;
  return q;
}

// ---------------------------------------------------------------------------
// Armijo--Wolfe inexact line search.
// ---------------------------------------------------------------------------

struct LineSearchResult {
  double alpha = 0.0;
  double loss = 0.0;
  std::vector<double> grad;  ///< gradient at theta + alpha p
  bool armijo_ok = false;
  bool wolfe_ok = false;  ///< strong curvature condition also satisfied
  int evals = 0;
};

/// Backtracks from alpha = 1 by halving (at most 50 times) until the Armijo
/// condition holds, then enforces the strong Wolfe curvature condition with a
/// bisection zoom. `loss_fn(theta)` returns {loss, gradient}. Exhausting the
/// halvings returns the smallest-alpha trial with armijo_ok = false.
template <class LossFn>
LineSearchResult line_search(LossFn&& loss_fn, std::span<const double> params,
                             std::span<const double> p, double f0,
                             std::span<const double> g0, double c1 = 1e-4, double c2 = 0.9) {
  if (!(0.0 < c1 && c1 < c2 && c2 < 1.0))
    throw ArgumentError("line_search: require 0 < c1 < c2 < 1");
  const double slope0 = dot(p, g0);
  if (!(slope0 < 0.0)) throw ArgumentError("line_search: p is not a descent direction");

  std::vector<double> trial(params.size());
  LineSearchResult res;
  auto eval = [&](double a) {
    for (std::size_t i = 0; i < params.size(); ++i) trial[i] = params[i] + a * p[i];
    auto [f, g] = loss_fn(std::span<const double>(trial));
    ++res.evals;
    return std::pair<double, std::vector<double>>(f, std::move(g));
  };
  auto armijo = [&](double a, double f) { return f <= f0 + c1 * a * slope0; };
  auto curvature = [&](std::span<const double> g) {
    return std::abs(dot(p, g)) <= c2 * std::abs(slope0);
  };

  double a = 1.0;
  double a_failed = 0.0;  // most recent alpha that failed Armijo (0 = none)
  for (int halvings = 0; halvings <= 50; ++halvings) {
    auto [f, g] = eval(a);
    if (std::isfinite(f) && armijo(a, f)) {
      res.alpha = a;
      res.loss = f;
      res.grad = std::move(g);
      res.armijo_ok = true;
      break;
    }
    a_failed = a;
    if (halvings == 50) {  // exhausted: smallest-alpha warning result
      res.alpha = a;
      res.loss = f;
      res.grad = std::move(g);
      return res;
    }
    a *= 0.5;
  }

  if (curvature(res.grad)) {
    res.wolfe_ok = true;
    return res;
  }

  // Strong-Wolfe zoom. lo always satisfies Armijo; hi brackets from the side
  // the curvature test points to. With no failed upper trial the step is
  // capped at 1 and the Armijo point stands as-is.
  double lo = res.alpha, f_lo = res.loss;
  double slope_lo = dot(p, res.grad);
  double hi;
  if (slope_lo < 0.0) {
    if (a_failed <= res.alpha) return res;
    hi = a_failed;
  } else {
    hi = 0.0;
  }
  for (int iter = 0; iter < 20; ++iter) {
    const double mid = 0.5 * (lo + hi);
    auto [f, g] = eval(mid);
    if (!std::isfinite(f) || !armijo(mid, f) || f >= f_lo) {
      hi = mid;
      continue;
    }
    const double slope = dot(p, g);
    if (curvature(g)) {
      res.alpha = mid;
      res.loss = f;
      res.grad = std::move(g);
      res.wolfe_ok = true;
      return res;
    }
    if (slope * (hi - lo) >= 0.0) hi = lo;
    lo = mid;
    f_lo = f;
    res.alpha = mid;
    res.loss = f;
    res.grad = std::move(g);
  }
  return res;  // best Armijo point found; curvature not certified
}

/// Convenience overload computing f0 and g0 itself.
template <class LossFn>
LineSearchResult line_search(LossFn&& loss_fn, std::span<const double> params,
                             std::span<const double> p, double c1 = 1e-4, double c2 = 0.9) {
  auto [f0, g0] = loss_fn(params);
  return line_search(loss_fn, params, p, f0, g0, c1, c2);
}

// ---------------------------------------------------------------------------
// Dense BFGS inverse update (small-dimension verification path; the trainer
// uses the two-loop form above).
// ---------------------------------------------------------------------------

struct SquareMatrix {
  std::size_t n = 0;
  std::vector<double> a;  ///< row-major

  static SquareMatrix identity(std::size_t n) {
    SquareMatrix m;
    m.n = n;
    m.a.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) m.a[i * n + i] = 1.0;
    return m;
  }
  double& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }

  std::vector<double> apply(std::span<const double> x) const {
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) y[i] = dot(std::span(a).subspan(i * n, n), x);
    return y;
  }
};

/// Sherman--Morrison rank-two update of the inverse Hessian estimate:
/// (I - s y^T / y.s) Hinv (I - y s^T / y.s) + s s^T / y.s.
/// Returns nullopt (skip signal) when y.s <= 0.
inline std::optional<SquareMatrix> bfgs_inverse_update(const SquareMatrix& h_inv,
                                                       std::span<const double> s,
                                                       std::span<const double> y) {
  const std::size_t n = h_inv.n;
  if (s.size() != n || y.size() != n) throw StructuralError("bfgs_inverse_update: size mismatch");
  const double ys = dot(y, s);
  if (!(ys > 0.0)) return std::nullopt;
  const double rho = 1.0 / ys;

  // left = (I - rho s y^T) Hinv
  SquareMatrix left = h_inv;
  std::vector<double> yth(n, 0.0);  // y^T Hinv
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) yth[j] += y[i] * h_inv.at(i, j);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) left.at(i, j) -= rho * s[i] * yth[j];

  // result = left (I - rho y s^T) + rho s s^T
  SquareMatrix out = left;
  std::vector<double> ly(n, 0.0);  // left y
  for (std::size_t i = 0; i < n; ++i) ly[i] = dot(std::span(left.a).subspan(i * n, n), y);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out.at(i, j) += -rho * ly[i] * s[j] + rho * s[i] * s[j];
  return out;
}

}  // namespace pinn
