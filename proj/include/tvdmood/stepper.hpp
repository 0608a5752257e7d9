// Distributed under the MIT License.
// See LICENSE.txt for details.

#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tvdmood/certify.hpp"

namespace tvdmood {

using State = std::vector<double>;

// Semi-discrete problem split into a non-stiff explicit tendency and a stiff
// implicit tendency.  implicit_solve(nu, rhs, t) returns x with
// x - nu * implicit_op(x, t) = rhs and must be exact for linear operators.
struct SemiDiscreteProblem {
  std::size_t state_dim = 0;
  std::function<State(const State&, double t)> explicit_op;
  std::function<State(const State&, double t)> implicit_op;
  std::function<State(double nu, const State& rhs, double t)> implicit_solve;
};

struct StepContext {
  double dt = 0.0;
  double t = 0.0;
};

struct StepFailure : std::runtime_error {
  explicit StepFailure(const std::string& what) : std::runtime_error(what) {}
};

// One step of the convex-combination scheme: stage k is solved with implicit
// coefficient theta_k a_kk + (1-theta_k) c_k, its right-hand side carries
// (1-theta_k) ct_k of the time-n explicit tendency plus the theta_k-weighted
// tableau history; the update blends the tableau update with a single
// backward/forward Euler step.  For stiffly accurate tableaux the update is
// the last stage.
State step_convex(const SemiDiscreteProblem& p, const State& w, const ConvexScheme& scheme,
                  const StepContext& ctx);

// Plain IMEX-RK update with the raw tableau; identical code path as
// step_convex with all theta equal to 1.
State step_plain(const SemiDiscreteProblem& p, const State& w, const ImexTableau& tab,
                 const StepContext& ctx);

// dt = nu * dx / speed, floored against zero speed and capped at the
// remaining time.  Callers choose the speed by CFL mode: material c_m,
// acoustic c_m + c_a/eps, or the Euler normal-velocity/sound variants.
double cfl_dt(double nu, double dx, double speed, double t_remaining);

}  // namespace tvdmood
