#pragma once

#include <span>
#include <utility>
#include <vector>

#include "pinn/common.hpp"
#include "pinn/dual.hpp"
#include "pinn/tape.hpp"

namespace pinn {

// ---------------------------------------------------------------------------
// Module entry points. An "expression" is any callable that maps a
// std::span<const V> of inputs to a V, for V in {double, Dual<...>, TVar<S>}.
// The same template therefore runs plainly, forward-seeded, or recorded.
// ---------------------------------------------------------------------------

/// Evaluates `expr` and the directional derivative w.r.t. inputs[seed_index]
/// in a single forward pass with dual numbers.
template <class F>
std::pair<double, double> forward_eval(F&& expr, std::span<const double> inputs,
                                       std::size_t seed_index) {
  if (seed_index >= inputs.size())
    throw ArgumentError("forward_eval: seed index " + std::to_string(seed_index) +
                        " out of range for arity " + std::to_string(inputs.size()));
  std::vector<Dual1> x(inputs.size());
  for (std::size_t k = 0; k < inputs.size(); ++k)
    x[k] = Dual1(inputs[k], k == seed_index ? 1.0 : 0.0);
  Dual1 y = expr(std::span<const Dual1>(x));
  return {y.v, y.d};
}

/// Records `expr` onto `tape`, registering every entry of `inputs` as a
/// differentiation target. Returns the output node.
template <class S, class F>
NodeId record(Tape<S>& tape, F&& expr, std::span<const S> inputs) {
  std::vector<TVar<S>> x;
  x.reserve(inputs.size());
  for (const S& v : inputs) x.emplace_back(&tape, tape.var(v));
  TVar<S> y = expr(std::span<const TVar<S>>(x));
  return y.id;
}

/// One reverse sweep over a recorded tape.
template <class S>
GradientT<S> reverse_gradient(const Tape<S>& tape, NodeId output) {
  return tape.reverse(output);
}

/// Full input gradient of `expr` at `inputs` via record + reverse sweep.
template <class F>
std::vector<double> input_gradient(F&& expr, std::span<const double> inputs) {
  Tape<double> tape;
  NodeId out = record(tape, expr, inputs);
  return tape.reverse(out).adjoints;
}

/// d2 expr / dx_i dx_j via forward-over-reverse: dual numbers seeded along
/// x_j are threaded through the tape, and the reverse sweep's adjoint of x_i
/// carries the mixed second derivative in its tangent.
template <class F>
double second_derivative(F&& expr, std::span<const double> inputs, std::size_t i, std::size_t j) {
  if (i >= inputs.size() || j >= inputs.size())
    throw ArgumentError("second_derivative: index out of range");
  Tape<Dual1> tape;
  std::vector<Dual1> x(inputs.size());
  for (std::size_t k = 0; k < inputs.size(); ++k)
    x[k] = Dual1(inputs[k], k == j ? 1.0 : 0.0);
  NodeId out = record(tape, expr, std::span<const Dual1>(x));
  GradientT<Dual1> g = tape.reverse(out);
  return g.adjoints[i].d;
}

/// Central finite difference, the independent cross-check used by the tests
/// (never by the library itself).
template <class F>
double central_difference(F&& expr, std::span<const double> inputs, std::size_t i,
                          double step = 1e-5) {
  std::vector<double> x(inputs.begin(), inputs.end());
  x[i] = inputs[i] + step;
  double up = expr(std::span<const double>(x));
  x[i] = inputs[i] - step;
  double dn = expr(std::span<const double>(x));
  return (up - dn) / (2.0 * step);
}

}  // namespace pinn
