#pragma once

#include <span>
#include <vector>

#include "pinn/network.hpp"
#include "pinn/pde.hpp"

namespace pinn {

/// Multiplier applied to the network along the time axis. t^2 also pins the
/// initial velocity to zero (d/dt of t^2 vanishes at t = 0), extending the
/// construction of the IC encoding to problems with u_t(x,0) = 0.
enum class TimeFactor { kLinear, kQuadratic };

/// Universal-approximator transform U = boundary_factor * time_factor * net
/// + ic_value. Satisfies the IC at t = 0 and homogeneous Dirichlet BCs for
/// all t by construction, for any base parameters.
struct ConstraintWrapper {
  PdeProblem problem;
  NetworkParams base;
  TimeFactor time_factor = TimeFactor::kQuadratic;

  template <class V>
  V time_factor_value(const V& t) const {
    V tau = t - problem.time_axis().lo;
    return time_factor == TimeFactor::kQuadratic ? tau * tau : tau;
  }

  template <class V>
  V operator()(std::span<const V> in) const {
    const std::span<const V> space = in.first(static_cast<std::size_t>(problem.num_space_axes()));
    V lam = forward_scalar(base, in);
    return boundary_factor(problem, space) * time_factor_value(in.back()) * lam +
           ic_value(problem, space);
  }
};

inline ConstraintWrapper wrap_hard_constraints(NetworkParams base, const PdeProblem& problem) {
  if (!problem.homogeneous_dirichlet() || problem.kind == PdeKind::kHeat2d)
    throw UnsupportedConstraintError(
        std::string(pde_name(problem.kind)) +
        ": hard constraints need a closed-form IC and homogeneous Dirichlet BCs; "
        "use soft-loss training instead");
  if (static_cast<int>(base.arch.sizes.front()) != problem.num_inputs())
    throw StructuralError("wrap_hard_constraints: network fan-in does not match problem inputs");
  ConstraintWrapper w;
  w.problem = problem;
  w.base = std::move(base);
  w.time_factor =
      problem.has_initial_velocity() ? TimeFactor::kQuadratic : TimeFactor::kLinear;
  return w;
}

}  // namespace pinn
