#pragma once

#include <cmath>
#include <ostream>
#include <type_traits>

#include "pinn/common.hpp"

namespace pinn {

// ---------------------------------------------------------------------------
// Forward-mode scalar: value + directional derivative, with epsilon^2 == 0.
//
// Dual<double> gives first derivatives; Dual<Dual<double>> nests to second
// order, and so on. All elementary functions below are written so they accept
// either plain doubles or any nesting depth.
// ---------------------------------------------------------------------------

template <class T>
struct Dual {
  using value_type = T;

  T v{};  ///< primal value
  T d{};  ///< tangent (directional derivative)

  constexpr Dual() = default;
  constexpr Dual(T value) : v(value), d(T(0)) {}  // NOLINT: implicit lift of constants
  constexpr Dual(T value, T tangent) : v(value), d(tangent) {}
  template <class U>
    requires(std::is_arithmetic_v<U> && !std::is_same_v<U, T>)
  constexpr Dual(U value) : v(T(value)), d(T(0)) {}  // NOLINT: lift through nesting levels

  Dual& operator+=(const Dual& o) {
    v += o.v;
    d += o.d;
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    d -= o.d;
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    d = v * o.d + d * o.v;  // no d*o.d term: epsilon^2 == 0
    v = v * o.v;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    d = (d * o.v - v * o.d) / (o.v * o.v);
    v = v / o.v;
    return *this;
  }
};

template <class T>
struct is_dual : std::false_type {};
template <class T>
struct is_dual<Dual<T>> : std::true_type {};

/// Innermost primal of an arbitrarily nested dual.
inline double primal(double x) { return x; }
template <class T>
double primal(const Dual<T>& x) {
  return primal(x.v);
}

template <class T>
Dual<T> operator-(const Dual<T>& a) {
  return {-a.v, -a.d};
}
template <class T>
Dual<T> operator+(const Dual<T>& a) {
  return a;
}

template <class T>
Dual<T> operator+(Dual<T> a, const Dual<T>& b) {
  return a += b;
}
template <class T>
Dual<T> operator-(Dual<T> a, const Dual<T>& b) {
  return a -= b;
}
template <class T>
Dual<T> operator*(Dual<T> a, const Dual<T>& b) {
  return a *= b;
}
template <class T>
Dual<T> operator/(Dual<T> a, const Dual<T>& b) {
  return a /= b;
}

// Mixed dual/scalar arithmetic. The scalar is lifted with zero tangent.
template <class T>
Dual<T> operator+(Dual<T> a, double c) {
  a.v += T(c);
  return a;
}
template <class T>
Dual<T> operator+(double c, Dual<T> a) {
  a.v += T(c);
  return a;
}
template <class T>
Dual<T> operator-(Dual<T> a, double c) {
  a.v -= T(c);
  return a;
}
template <class T>
Dual<T> operator-(double c, const Dual<T>& a) {
  return {T(c) - a.v, -a.d};
}
template <class T>
Dual<T> operator*(const Dual<T>& a, double c) {
  return {a.v * T(c), a.d * T(c)};
}
template <class T>
Dual<T> operator*(double c, const Dual<T>& a) {
  return a * c;
}
template <class T>
Dual<T> operator/(const Dual<T>& a, double c) {
  return {a.v / T(c), a.d / T(c)};
}
template <class T>
Dual<T> operator/(double c, const Dual<T>& a) {
  return Dual<T>(T(c)) / a;
}

template <class T>
bool operator<(const Dual<T>& a, const Dual<T>& b) {
  return primal(a) < primal(b);
}
template <class T>
bool operator>(const Dual<T>& a, const Dual<T>& b) {
  return primal(a) > primal(b);
}

// --- elementary functions (the registered op set) --------------------------

using std::cos;
using std::exp;
using std::log;
using std::pow;
using std::sin;
using std::tanh;

template <class T>
Dual<T> exp(const Dual<T>& x) {
  T e = exp(x.v);
  return {e, e * x.d};
}

template <class T>
Dual<T> log(const Dual<T>& x) {
  if (primal(x) <= 0.0) throw DomainError("ln of non-positive value");
  return {log(x.v), x.d / x.v};
}

template <class T>
Dual<T> sin(const Dual<T>& x) {
  return {sin(x.v), cos(x.v) * x.d};
}

template <class T>
Dual<T> cos(const Dual<T>& x) {
  return {cos(x.v), T(0) - sin(x.v) * x.d};
}

template <class T>
Dual<T> tanh(const Dual<T>& x) {
  T t = tanh(x.v);
  return {t, (T(1) - t * t) * x.d};
}

/// Logistic function, the derivative of softplus; overflow-safe.
inline double logistic(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

/// softplus(x) = ln(1 + e^x), computed as max(x,0) + ln(1 + e^-|x|) so that
/// large positive arguments do not overflow.
inline double softplus(double x) { return std::fmax(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

template <class T>
T logistic(const Dual<T>&) = delete;  // only the primal form is ever needed

template <class T>
Dual<T> softplus(const Dual<T>& x) {
  // d/dx softplus = logistic(x), itself expressed through the op set:
  // logistic(x) = e^x / (1 + e^x) for x < 0, 1 / (1 + e^-x) otherwise.
  T s = softplus(x.v);
  T g;
  if (primal(x) >= 0.0) {
    g = T(1) / (T(1) + exp(T(0) - x.v));
  } else {
    T e = exp(x.v);
    g = e / (T(1) + e);
  }
  return {s, g * x.d};
}

template <class T>
Dual<T> pow(const Dual<T>& x, double c) {
  T p = pow(x.v, c);
  return {p, T(c) * pow(x.v, c - 1.0) * x.d};
}

template <class T>
Dual<T> pow(const Dual<T>& x, const Dual<T>& y) {
  if (primal(x) <= 0.0) throw DomainError("pow with non-positive base and non-constant exponent");
  return exp(y * log(x));
}

template <class T>
std::ostream& operator<<(std::ostream& os, const Dual<T>& x) {
  return os << "(" << x.v << " + " << x.d << "e)";
}

using Dual1 = Dual<double>;
using Dual2 = Dual<Dual<double>>;

}  // namespace pinn
