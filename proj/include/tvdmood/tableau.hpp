// Distributed under the MIT License.
// See LICENSE.txt for details.

#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace tvdmood {

// Double Butcher tableau of an implicit-explicit Runge-Kutta pair.
// a_ex is strictly lower triangular, a_im lower triangular.  Row sums of
// each part must reproduce c_ex / c_im to 1e-13.
struct ImexTableau {
  std::size_t s = 0;
  std::vector<std::vector<double>> a_ex;  // s x s
  std::vector<std::vector<double>> a_im;  // s x s
  std::vector<double> b_ex, b_im;         // length s
  std::vector<double> c_ex, c_im;         // length s
  std::string name;

  // first implicit column zero and a_im[0][0] == 0, so stage 1 is w^n
  bool trivial_first_stage() const;
  // b vectors equal the last rows of the respective A matrices
  bool stiffly_accurate() const;
  void validate() const;  // throws std::invalid_argument on any shape/value defect
};

// Residuals of the coupled order conditions.  Conditions mix both parts of
// the pair; a scheme has classical order p when every residual up to p
// vanishes.  `order` is the largest p in {0,..,3} with all residuals <= tol.
struct OrderCheck {
  int order = 0;
  std::vector<std::pair<std::string, double>> residuals;  // (condition, residual)
  double max_residual_up_to(int p) const;
};
OrderCheck order_check(const ImexTableau& t, double tol = 1e-12);

// Forward/backward Euler pair: explicit flux frozen at w^n, implicit flux at
// the new state.  Realized as a two-stage pair whose second stage is the
// update (one implicit solve per step).
ImexTableau make_imex1();

// Four equal forward/backward Euler substeps of size dt/4 packaged as a
// single pair (first order, four implicit solves per step).
ImexTableau make_imex1_4();

// Third-order pair with explicit first stage; both parts share b and c.
// delta = (3 + sqrt(3))/6.
ImexTableau make_ars233();

// Four-stage third-order pair tuned for a large certified TVD step size.
// Coefficients are fixed 16-digit constants; the companion relaxation
// parameters live in certify.hpp (make_tvd3_4_scheme).
ImexTableau make_tvd3_4();

// One-parameter family of three-stage third-order pairs; gamma must avoid
// {0, 1/3}.  Both parts share b and c.
ImexTableau make_tvd3_family(double gamma);

// Lookup by name: "imex1", "imex1_4", "ars233", "tvd3_4", "imex3"
// (= tvd3_family at gamma = 2/3), or "tvd3_family(<gamma>)".
ImexTableau builtin_tableau(const std::string& name);

// JSON object with fields s, A_ex, A_im, b_ex, b_im, c_ex, c_im (row-major
// arrays); values round-trip at full double precision.
std::string tableau_to_json(const ImexTableau& t);
ImexTableau tableau_from_json(const std::string& text);
ImexTableau load_tableau(const std::string& path);
void save_tableau(const ImexTableau& t, const std::string& path);

}  // namespace tvdmood
