// Distributed under the MIT License.
// See LICENSE.txt for details.

#include "tvdmood/stepper.hpp"

#include <algorithm>
#include <cmath>

namespace tvdmood {

namespace {

void check_finite(const State& w, const char* where) {
  for (double v : w)
    if (!std::isfinite(v)) throw StepFailure(std::string("non-finite state after ") + where);
}

void axpy(State& y, double a, const State& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

}  // namespace

State step_convex(const SemiDiscreteProblem& p, const State& w, const ConvexScheme& scheme,
                  const StepContext& ctx) {
  scheme.validate();
  const ImexTableau& tab = scheme.tab;
  const std::vector<double>& theta = scheme.theta;
  const double dt = ctx.dt;
  if (!(dt > 0.0)) throw StepFailure("step requires dt > 0");
  const std::size_t s = tab.s;

  const State f_ex_n = p.explicit_op(w, ctx.t);
  std::vector<State> f_ex(s), f_im(s);
  State stage;

  for (std::size_t k = 0; k < s; ++k) {
    const double th = theta[k];
    const double acoef = th * tab.a_im[k][k] + (1.0 - th) * tab.c_im[k];
    State rhs = w;
    axpy(rhs, dt * (1.0 - th) * tab.c_ex[k], f_ex_n);
    for (std::size_t l = 0; l < k; ++l) {
      if (tab.a_ex[k][l] != 0.0) axpy(rhs, dt * th * tab.a_ex[k][l], f_ex[l]);
      if (tab.a_im[k][l] != 0.0) axpy(rhs, dt * th * tab.a_im[k][l], f_im[l]);
    }
    const double tk = ctx.t + tab.c_im[k] * dt;
    if (acoef != 0.0) {
      stage = p.implicit_solve(dt * acoef, rhs, tk);
      // recover the implicit tendency from the solved stage; exact for the
      // linear operators used here and immune to solver round-off drift
      f_im[k] = stage;
      for (std::size_t i = 0; i < stage.size(); ++i)
        f_im[k][i] = (stage[i] - rhs[i]) / (dt * acoef);
    } else {
      stage = std::move(rhs);
      const bool used_later = [&] {
        for (std::size_t r = k + 1; r < s; ++r)
          if (tab.a_im[r][k] != 0.0) return true;
        return tab.b_im[k] != 0.0;
      }();
      f_im[k] = used_later ? p.implicit_op(stage, tk) : State(stage.size(), 0.0);
    }
    check_finite(stage, "stage solve");
    f_ex[k] = p.explicit_op(stage, tk);
  }

  if (tab.stiffly_accurate()) return stage;

  const double thu = theta[s];
  State rhs = w;
  axpy(rhs, dt * (1.0 - thu), f_ex_n);
  for (std::size_t k = 0; k < s; ++k) {
    if (tab.b_ex[k] != 0.0) axpy(rhs, dt * thu * tab.b_ex[k], f_ex[k]);
    if (tab.b_im[k] != 0.0) axpy(rhs, dt * thu * tab.b_im[k], f_im[k]);
  }
  State out;
  if (thu != 1.0) {
    out = p.implicit_solve(dt * (1.0 - thu), rhs, ctx.t + dt);
  } else {
    out = std::move(rhs);
  }
  check_finite(out, "update");
  return out;
}

State step_plain(const SemiDiscreteProblem& p, const State& w, const ImexTableau& tab,
                 const StepContext& ctx) {
  ConvexScheme scheme;
  scheme.tab = tab;
  scheme.theta.assign(tab.stiffly_accurate() ? tab.s : tab.s + 1, 1.0);
  return step_convex(p, w, scheme, ctx);
}

double cfl_dt(double nu, double dx, double speed, double t_remaining) {
  const double dt = nu * dx / std::max(speed, 1e-12);
  if (t_remaining > 0.0) return std::min(dt, t_remaining);
  return dt;
}

}  // namespace tvdmood
