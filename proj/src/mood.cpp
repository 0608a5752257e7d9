// Distributed under the MIT License.
// See LICENSE.txt for details.

#include "tvdmood/mood.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"

namespace tvdmood {

void MoodHierarchy::validate() const {
  if (levels.size() < 2) throw std::invalid_argument("mood: need at least 2 levels");
  if (!detector_sup) throw std::invalid_argument("mood: detector is not set");
  if (!(xi >= 0.0 && xi <= 1.0)) throw std::invalid_argument("mood: xi must be in [0,1]");
  if (!(dmp_slack >= 0.0) || !std::isfinite(dmp_slack))
    throw std::invalid_argument("mood: dmp_slack must be finite and non-negative");
  for (const MoodLevel& lvl : levels) {
    if (!lvl.problem.explicit_op || !lvl.problem.implicit_op || !lvl.problem.implicit_solve)
      throw std::invalid_argument("mood: level problem is incomplete");
    lvl.scheme.validate();
  }
}

std::function<double(const State&)> bounds_detector(const State& w_ref) {
  if (w_ref.empty()) throw std::invalid_argument("bounds_detector: empty reference state");
  const auto [lo, hi] = std::minmax_element(w_ref.begin(), w_ref.end());
  const double mid = 0.5 * (*lo + *hi);
  return [mid](const State& w) {
    double m = 0.0;
    for (double v : w) m = std::max(m, std::abs(v - mid));
    return m;
  };
}

MoodThreshold init_threshold(const MoodHierarchy& h, const State& w0) {
  const double e0 = h.detector_sup(w0);
  return {e0, e0};
}

namespace {

bool bound_ok(double value, double threshold, double slack) {
  return value <= threshold * (1.0 + 1e-12) + 1e-14 + slack;
}

}  // namespace

MoodStepResult mood_step(const MoodHierarchy& h, const MoodThreshold& th, const State& w,
                         const StepContext& ctx) {
  h.validate();
  MoodStepResult out;
  for (std::size_t lvl = 0; lvl < h.levels.size(); ++lvl) {
    const bool terminal = lvl + 1 == h.levels.size();
    State cand;
    double val = 0.0;
    if (terminal) {
      cand = step_convex(h.levels[lvl].problem, w, h.levels[lvl].scheme, ctx);
      val = h.detector_sup(cand);
    } else {
      // A failed solve or an out-of-domain candidate counts as a rejection.
      try {
        cand = step_convex(h.levels[lvl].problem, w, h.levels[lvl].scheme, ctx);
        val = h.detector_sup(cand);
      } catch (const StepFailure&) {
        continue;
      } catch (const std::domain_error&) {
        continue;
      }
    }
    if (!bound_ok(val, th.current, h.dmp_slack) && !terminal) continue;
    if (terminal && val > th.current + h.dmp_slack + 1e-10) {
      std::fprintf(stderr,
                   "mood: parachute level '%s' violates the bound test by %.3e at t=%.6g\n",
                   h.levels[lvl].name.c_str(), val - th.current, ctx.t);
    }
    out.w = std::move(cand);
    out.level_used = static_cast<int>(lvl);
    break;
  }
  const double accepted_val = h.detector_sup(out.w);
  out.threshold_next =
      h.time_dependent ? h.xi * accepted_val + (1.0 - h.xi) * th.current : th.initial;
  return out;
}

std::string mood_stats_to_json(const MoodStats& s) {
  nlohmann::json j;
  j["steps"] = s.steps;
  j["activations_per_level"] = s.activations_per_level;
  j["acceptance_rate"] = s.acceptance_rate;
  return j.dump(2);
}

MoodRunResult mood_run(const MoodHierarchy& h, State w0, double t_final,
                       const std::function<double(const State&, double, double)>& dt_provider,
                       const std::function<void(const State&, double, int)>& observe) {
  h.validate();
  if (!dt_provider) throw std::invalid_argument("mood_run: dt provider is not set");
  MoodRunResult res;
  res.stats.activations_per_level.assign(h.levels.size(), 0);
  MoodThreshold th = init_threshold(h, w0);
  State w = std::move(w0);
  double t = 0.0;
  if (observe) observe(w, t, -1);
  while (t < t_final - 1e-14 * std::max(1.0, std::abs(t_final))) {
    const double dt = dt_provider(w, t, t_final - t);
    if (!(dt > 0.0)) throw std::invalid_argument("mood_run: nonpositive time step");
    MoodStepResult step = mood_step(h, th, w, {dt, t});
    w = std::move(step.w);
    th.current = step.threshold_next;
    t += dt;
    ++res.stats.steps;
    ++res.stats.activations_per_level[static_cast<std::size_t>(step.level_used)];
    res.level_sequence.push_back(step.level_used);
    if (observe) observe(w, t, step.level_used);
  }
  res.stats.acceptance_rate =
      res.stats.steps == 0
          ? 1.0
          : static_cast<double>(res.stats.activations_per_level[0]) / res.stats.steps;
  res.w = std::move(w);
  res.t_final = t;
  return res;
}

}  // namespace tvdmood
