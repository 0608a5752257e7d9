// Distributed under the MIT License.
// See LICENSE.txt for details.

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tvdmood/certify.hpp"
#include "tvdmood/stepper.hpp"

namespace tvdmood {

// One fallback level: a time scheme together with its space discretization.
struct MoodLevel {
  SemiDiscreteProblem problem;
  ConvexScheme scheme;
  std::string name;
};

// Ordered cascade from the high-order candidate down to the terminal
// parachute.  detector_sup(w) returns the scalar the bound test compares
// against the threshold.  dmp_slack is an absolute allowance added to the
// bound: detectors dominated by a stiff term (the 1/M sound-speed part of the
// Riemann invariants) drift by O(M) under resolved acoustics, which must not
// count as an oscillation.
struct MoodHierarchy {
  std::vector<MoodLevel> levels;
  std::function<double(const State&)> detector_sup;
  double xi = 0.0;
  bool time_dependent = false;
  double dmp_slack = 0.0;
  void validate() const;
};

// Detector measuring how far a state leaves the bounds of the reference
// state: sup_j |w_j - mid| with mid the midpoint of the reference range.  The
// induced initial threshold is half the reference range, so the bound test
// accepts exactly the states inside [min w_ref, max w_ref].
std::function<double(const State&)> bounds_detector(const State& w_ref);

struct MoodThreshold {
  double initial = 0.0;
  double current = 0.0;
};

// threshold with initial = current = detector_sup(w0)
MoodThreshold init_threshold(const MoodHierarchy& h, const State& w0);

struct MoodStepResult {
  State w;
  int level_used = 0;
  double threshold_next = 0.0;
};

// One cascade step: try levels in order, accept the first candidate passing
// the bound test; the terminal level is always accepted (with a diagnostic on
// stderr if it still violates the bound by more than 1e-10).
MoodStepResult mood_step(const MoodHierarchy& h, const MoodThreshold& th, const State& w,
                         const StepContext& ctx);

struct MoodStats {
  int steps = 0;
  std::vector<int> activations_per_level;
  double acceptance_rate = 0.0;
};

std::string mood_stats_to_json(const MoodStats& s);

struct MoodRunResult {
  State w;
  MoodStats stats;
  std::vector<int> level_sequence;
  double t_final = 0.0;
};

// Advances w0 to t_final.  dt_provider(w, t, remaining) returns the next step
// size (already capped by the caller's CFL rule); observe, when set, is called
// with the initial state and after every accepted step.
MoodRunResult mood_run(const MoodHierarchy& h, State w0, double t_final,
                       const std::function<double(const State&, double, double)>& dt_provider,
                       const std::function<void(const State&, double, int)>& observe = nullptr);

}  // namespace tvdmood
