// Distributed under the MIT License.
// See LICENSE.txt for details.

#pragma once

#include <cstddef>

#include "tvdmood/stepper.hpp"

namespace tvdmood {

// Periodic 1D transport w_t + c_m w_x + (c_a/eps) w_x = 0 on (0, L).
struct ScalarProblemSpec {
  double c_m = 1.0;
  double c_a = 1.0;
  double epsilon = 1.0;
  double domain_length = 0.0;
  int n = 0;
  double dx() const { return domain_length / n; }
  double transport_speed() const { return c_m + c_a / epsilon; }
  void validate() const;
};

// tendency_j = -speed (w_j - w_{j-1}) / dx
State upwind_op(const State& w, double speed, double dx);
// tendency_j = -speed (w_{j+1} - w_{j-1}) / (2 dx)
State central_op(const State& w, double speed, double dx);

// Interface values of cell j: minus at x_{j-1/2}, plus at x_{j+1/2}.
struct Reconstruction {
  State minus;
  State plus;
};

// Third-order interface reconstruction.  The unlimited branch evaluates the
// parabola through the three neighbouring averages; when limiting is enabled,
// cells whose consecutive slopes change sign or whose slope ratio leaves
// [1/4, 4] switch to a minmod-bounded value, clamped to the three-point
// range.
Reconstruction reconstruct3(const State& w, bool limited);

// Flux-difference tendencies built from reconstruct3 (upwind side for
// positive speed).
State parabolic3_op(const State& w, double speed, double dx);
State limited3_op(const State& w, double speed, double dx);

// Solves x_j + nu (x_j - x_{j-1}) = rhs_j on the periodic grid: forward sweep
// plus the rank-one periodic correction.  Exact for nu >= 0.
State solve_upwind_periodic(double nu, const State& rhs);

// Solves x_j + (kappa/2)(x_{j+1} - x_{j-1}) = rhs_j on the periodic grid via
// the circulant spectral factorization; the symbol 1 + i kappa sin is bounded
// away from zero for every kappa.
State solve_central_periodic(double kappa, const State& rhs);

enum class SpaceOp { upwind1, central2, parabolic3, limited3 };

// Assembles the split problem: explicit tendency at speed c_m with the
// requested operator, implicit tendency at speed c_a/eps (upwind1 or central2
// only; the implicit part stays linear).
SemiDiscreteProblem make_scalar_problem(const ScalarProblemSpec& spec, SpaceOp explicit_part,
                                        SpaceOp implicit_part);

double exact_smooth(const ScalarProblemSpec& spec, double t, double x);
double exact_discontinuous(const ScalarProblemSpec& spec, double t, double x);

// Cell-center samples of the exact solutions at time t.
State sample_smooth(const ScalarProblemSpec& spec, double t);
State sample_discontinuous(const ScalarProblemSpec& spec, double t);

}  // namespace tvdmood
