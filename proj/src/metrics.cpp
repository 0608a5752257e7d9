// Distributed under the MIT License.
// See LICENSE.txt for details.

#include "tvdmood/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace tvdmood {

namespace {

double prefactor(double cell_volume, bool volume_weighted) {
  if (!(cell_volume > 0.0)) throw std::invalid_argument("norm: cell volume must be positive");
  return volume_weighted ? cell_volume : 1.0 / cell_volume;
}

}  // namespace

double l1_norm(const State& w, double cell_volume, bool volume_weighted) {
  double s = 0.0;
  for (double v : w) s += std::abs(v);
  return prefactor(cell_volume, volume_weighted) * s;
}

double l2_norm(const State& w, double cell_volume, bool volume_weighted) {
  double s = 0.0;
  for (double v : w) s += v * v;
  return std::sqrt(prefactor(cell_volume, volume_weighted) * s);
}

double linf_norm(const State& w) {
  double m = 0.0;
  for (double v : w) m = std::max(m, std::abs(v));
  return m;
}

double field_range(const State& w) {
  if (w.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
  return *hi - *lo;
}

void RangeTracker::observe(const State& w) {
  const double r = field_range(w);
  if (!started_) {
    started_ = true;
    initial_range_ = r;
    return;
  }
  growth_ = std::max(growth_, r - initial_range_);
}

double l1o_quasinorm(double max_range_growth, const State& w, double cell_volume,
                     bool volume_weighted) {
  const double growth = std::max(max_range_growth, 0.0);
  double s = 0.0;
  for (double v : w) s += std::abs(v) + growth;
  return prefactor(cell_volume, volume_weighted) * s;
}

SpaceTimeError spacetime_errors(const std::vector<double>& exact_ranges,
                                const std::vector<double>& numeric_ranges) {
  if (exact_ranges.size() != numeric_ranges.size())
    throw std::invalid_argument("spacetime_errors: trajectories have different lengths");
  if (exact_ranges.empty()) throw std::invalid_argument("spacetime_errors: empty trajectories");
  SpaceTimeError e;
  e.max = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < exact_ranges.size(); ++n) {
    const double d = exact_ranges[n] - numeric_ranges[n];
    e.mean += d;
    e.max = std::max(e.max, d);
  }
  e.mean /= static_cast<double>(exact_ranges.size());
  return e;
}

std::vector<ErrorRow> eoc_table(std::vector<ErrorRow> rows, int dim) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("eoc_table: dim must be 1 or 2");
  const int cell_ratio = dim == 1 ? 2 : 4;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].n != cell_ratio * rows[i - 1].n) continue;
    if (rows[i - 1].l1 > 0.0 && rows[i].l1 > 0.0)
      rows[i].eoc_l1 = std::log2(rows[i - 1].l1 / rows[i].l1);
    if (rows[i - 1].l2 > 0.0 && rows[i].l2 > 0.0)
      rows[i].eoc_l2 = std::log2(rows[i - 1].l2 / rows[i].l2);
  }
  return rows;
}

std::string format_sig(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string csv_error_table(const std::vector<ErrorRow>& rows) {
  std::string out = "N,L1,EOC_L1,L2,EOC_L2,Linf,L1o\n";
  for (const ErrorRow& r : rows) {
    out += std::to_string(r.n);
    out += ',';
    out += format_sig(r.l1);
    out += ',';
    if (r.eoc_l1) out += format_sig(*r.eoc_l1);
    out += ',';
    out += format_sig(r.l2);
    out += ',';
    if (r.eoc_l2) out += format_sig(*r.eoc_l2);
    out += ',';
    out += format_sig(r.linf);
    out += ',';
    out += format_sig(r.l1o);
    out += '\n';
  }
  return out;
}

}  // namespace tvdmood
