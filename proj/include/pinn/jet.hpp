#pragma once

#include <array>
#include <cmath>

#include "pinn/common.hpp"
#include "pinn/dual.hpp"

namespace pinn {

// ---------------------------------------------------------------------------
// Jet<K>: a fused stack of K second-order dual numbers sharing one value.
//
// Component layout: value v, first derivatives d[k], pure second derivatives
// h[k] along K independent seed directions. Jet<K> arithmetic is exactly
// Dual<Dual<double>> arithmetic with equal inner/outer seeds, evaluated once
// per direction with the value computation shared; cross terms between
// directions are not stored because no residual operator here needs them.
// ---------------------------------------------------------------------------

template <int K>
struct Jet {
  double v{};
  std::array<double, K> d{};
  std::array<double, K> h{};

  constexpr Jet() = default;
  constexpr Jet(double value) : v(value) {}  // NOLINT: lift constants

  /// Variable seeded along direction `dir`.
  static Jet seed(double value, int dir) {
    Jet j(value);
    j.d[static_cast<std::size_t>(dir)] = 1.0;
    return j;
  }
};

template <int K>
Jet<K> operator-(const Jet<K>& a) {
  Jet<K> r(-a.v);
  for (int k = 0; k < K; ++k) {
    r.d[k] = -a.d[k];
    r.h[k] = -a.h[k];
  }
  return r;
}

template <int K>
Jet<K> operator+(const Jet<K>& a, const Jet<K>& b) {
  Jet<K> r(a.v + b.v);
  for (int k = 0; k < K; ++k) {
    r.d[k] = a.d[k] + b.d[k];
    r.h[k] = a.h[k] + b.h[k];
  }
  return r;
}

template <int K>
Jet<K> operator-(const Jet<K>& a, const Jet<K>& b) {
  Jet<K> r(a.v - b.v);
  for (int k = 0; k < K; ++k) {
    r.d[k] = a.d[k] - b.d[k];
    r.h[k] = a.h[k] - b.h[k];
  }
  return r;
}

template <int K>
Jet<K> operator*(const Jet<K>& a, const Jet<K>& b) {
  Jet<K> r(a.v * b.v);
  for (int k = 0; k < K; ++k) {
    r.d[k] = a.v * b.d[k] + a.d[k] * b.v;
    r.h[k] = a.v * b.h[k] + 2.0 * a.d[k] * b.d[k] + a.h[k] * b.v;
  }
  return r;
}

template <int K>
Jet<K> operator/(const Jet<K>& a, const Jet<K>& b) {
  if (b.v == 0.0) throw DomainError("jet division by zero");
  const double inv = 1.0 / b.v;
  Jet<K> r(a.v * inv);
  for (int k = 0; k < K; ++k) {
    r.d[k] = (a.d[k] - r.v * b.d[k]) * inv;
    r.h[k] = (a.h[k] - 2.0 * r.d[k] * b.d[k] - r.v * b.h[k]) * inv;
  }
  return r;
}

template <int K>
Jet<K> operator+(Jet<K> a, double c) {
  a.v += c;
  return a;
}
template <int K>
Jet<K> operator+(double c, Jet<K> a) {
  a.v += c;
  return a;
}
template <int K>
Jet<K> operator-(Jet<K> a, double c) {
  a.v -= c;
  return a;
}
template <int K>
Jet<K> operator-(double c, const Jet<K>& a) {
  return -(a - c);
}
template <int K>
Jet<K> operator*(const Jet<K>& a, double c) {
  Jet<K> r(a.v * c);
  for (int k = 0; k < K; ++k) {
    r.d[k] = a.d[k] * c;
    r.h[k] = a.h[k] * c;
  }
  return r;
}
template <int K>
Jet<K> operator*(double c, const Jet<K>& a) {
  return a * c;
}
template <int K>
Jet<K> operator/(const Jet<K>& a, double c) {
  return a * (1.0 / c);
}
template <int K>
Jet<K> operator/(double c, const Jet<K>& a) {
  return Jet<K>(c) / a;
}

/// Chain rule for a unary op with derivatives f', f'' at a.v.
template <int K>
Jet<K> unary_jet(const Jet<K>& a, double f, double f1, double f2) {
  Jet<K> r(f);
  for (int k = 0; k < K; ++k) {
    r.d[k] = f1 * a.d[k];
    r.h[k] = f1 * a.h[k] + f2 * a.d[k] * a.d[k];
  }
  return r;
}

template <int K>
Jet<K> exp(const Jet<K>& a) {
  const double e = std::exp(a.v);
  return unary_jet(a, e, e, e);
}

template <int K>
Jet<K> log(const Jet<K>& a) {
  if (a.v <= 0.0) throw DomainError("ln of non-positive value");
  const double inv = 1.0 / a.v;
  return unary_jet(a, std::log(a.v), inv, -inv * inv);
}

template <int K>
Jet<K> sin(const Jet<K>& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return unary_jet(a, s, c, -s);
}

template <int K>
Jet<K> cos(const Jet<K>& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return unary_jet(a, c, -s, -c);
}

template <int K>
Jet<K> tanh(const Jet<K>& a) {
  const double t = std::tanh(a.v);
  const double s = 1.0 - t * t;
  return unary_jet(a, t, s, -2.0 * t * s);
}

template <int K>
Jet<K> softplus(const Jet<K>& a) {
  const double g = logistic(a.v);
  return unary_jet(a, softplus(a.v), g, g * (1.0 - g));
}

template <int K>
Jet<K> pow(const Jet<K>& a, double c) {
  return unary_jet(a, std::pow(a.v, c), c * std::pow(a.v, c - 1.0),
                   c * (c - 1.0) * std::pow(a.v, c - 2.0));
}

// ---------------------------------------------------------------------------
// Cotangent<K>: a linear functional over Jet<K> components, used by the
// reverse sweep. Propagating phi(x) = sum_c kappa_c * x_c through a node with
// local-partial jet p costs one transposed jet product:
//   phi(x (x) p) = <pullback(kappa, p), x>.
// ---------------------------------------------------------------------------

template <int K>
struct Cotangent {
  double v{};
  std::array<double, K> d{};
  std::array<double, K> h{};
};

/// <kappa, jet>
template <int K>
double apply(const Cotangent<K>& c, const Jet<K>& x) {
  double s = c.v * x.v;
  for (int k = 0; k < K; ++k) s += c.d[k] * x.d[k] + c.h[k] * x.h[k];
  return s;
}

/// Transposed multiplication: pullback(kappa, p)_c = sum_b kappa_b d(x(x)p)_b / dx_c.
template <int K>
Cotangent<K> pullback(const Cotangent<K>& c, const Jet<K>& p) {
  Cotangent<K> r;
  r.v = apply(c, p);
  for (int k = 0; k < K; ++k) {
    r.d[k] = c.d[k] * p.v + 2.0 * c.h[k] * p.d[k];
    r.h[k] = c.h[k] * p.v;
  }
  return r;
}

}  // namespace pinn
