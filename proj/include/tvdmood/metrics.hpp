// Distributed under the MIT License.
// See LICENSE.txt for details.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tvdmood/stepper.hpp"

namespace tvdmood {

// Grid norms.  The default prefactor is 1/cell_volume; the volume_weighted
// flag switches to the cell_volume prefactor.
double l1_norm(const State& w, double cell_volume, bool volume_weighted = false);
double l2_norm(const State& w, double cell_volume, bool volume_weighted = false);
double linf_norm(const State& w);

// max_j w_j - min_j w_j
double field_range(const State& w);

// Running record of how far a trajectory's range has grown past its initial
// range; feed every accepted state in order, starting with the initial one.
struct RangeTracker {
  void observe(const State& w);
  double max_growth() const { return growth_; }

 private:
  bool started_ = false;
  double initial_range_ = 0.0;
  double growth_ = 0.0;
};

// Overshoot-aware quasinorm: adds the worst range growth of the trajectory to
// every cell of the measured field.  The field is the error for convergence
// lines and the raw state for bound reporting; the growth always comes from
// the raw numerical trajectory.
double l1o_quasinorm(double max_range_growth, const State& w, double cell_volume,
                     bool volume_weighted = false);

struct SpaceTimeError {
  double mean = 0.0;
  double max = 0.0;
};

// Mean and max over time steps of (exact range - numeric range); step 0 is
// excluded by passing ranges for n = 1..n_t.
SpaceTimeError spacetime_errors(const std::vector<double>& exact_ranges,
                                const std::vector<double>& numeric_ranges);

struct ErrorRow {
  int n = 0;
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
  double l1o = 0.0;
  std::optional<double> eoc_l1;
  std::optional<double> eoc_l2;
};

// Fills the EOC columns between consecutive rows whose cell-count ratio is 2
// (dim 1) or 4 (dim 2); EOC = log2(coarse/fine).  Rows with a zero or missing
// neighbour error keep an empty column.
std::vector<ErrorRow> eoc_table(std::vector<ErrorRow> rows, int dim);

// 12 significant digits, shortest form.
std::string format_sig(double v);

// Header N,L1,EOC_L1,L2,EOC_L2,Linf,L1o then one line per row, LF endings.
std::string csv_error_table(const std::vector<ErrorRow>& rows);

}  // namespace tvdmood
