// Distributed under the MIT License.
// See LICENSE.txt for details.

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tvdmood/tableau.hpp"

namespace tvdmood {

// An IMEX pair plus per-stage relaxation weights theta in [0,1].  theta[0]
// must be 1.  theta has length s when b equals the last tableau rows (the
// update then coincides with the last stage weight) and length s+1 otherwise
// (the extra entry relaxes the update itself).
struct ConvexScheme {
  ImexTableau tab;
  std::vector<double> theta;
  // set for members of the three-stage family; enables the closed-form
  // certified step-size bound
  std::optional<double> family_gamma;
  void validate() const;
};

// Largest theta_3 for which the gamma-family certificate can be tight:
// (3*gamma - 1) / (6*gamma^2).  Requires gamma > 1/3.
double family_theta3_opt(double gamma);

// Closed-form feasibility data of the three-stage family with
// theta = (1, 1, theta3_opt, theta4).  Feasible only for
// gamma >= 1/sqrt(3) and 0 < theta4 < theta4_max.
struct FamilyBounds {
  bool feasible = false;
  double theta3 = 0.0;
  double theta4_max = 0.0;
  double lambda_max = 0.0;  // 0 when infeasible
};
FamilyBounds family_bounds(double gamma, double theta4);

// gamma = 2/3 trade-off curve: alpha in (0,1) maps to
// theta4 = (7/16) alpha and lambda = (1 - alpha) / (1 - (11/16) alpha).
struct FamilyAlphaPoint {
  double theta4 = 0.0;
  double lambda = 0.0;
};
FamilyAlphaPoint family_alpha_point(double alpha);

/// Convex schemes used throughout: the gamma family with optimal theta3, and
// the four-stage pair with its tuned weights.
ConvexScheme make_tvd3_scheme(double gamma, double theta4);
ConvexScheme make_tvd3_opt();      // gamma = 2/3, theta4 = 7/48, lambda_max = 32/37
ConvexScheme make_tvd3_4_scheme(); // tuned thetas; certified lambda 0.5471076190680170
ConvexScheme make_imex1_scheme(); // theta = (1,1); certified lambda_max = 1

// certified step-size constant of make_tvd3_4_scheme()
inline constexpr double kTvd34Lambda = 0.5471076190680170;

// Append the update as an explicit extra stage (zero diagonal entry) so that
// a pair whose b differs from the last rows becomes stiffly accurate.
ImexTableau extend_with_update_stage(const ImexTableau& t);

// Sign-condition certificate for the monotone convex-combination form of a
// scheme applied to double upwind differences.  All inequalities are
// evaluated with slack `tol` (value >= -tol passes).
struct Certificate {
  bool feasible = false;
  double min_margin = 0.0;  // smallest constraint value encountered
  std::vector<std::pair<std::string, double>> coeffs;
  std::vector<std::string> binding;  // constraints within 1e-9 of active, or violated
};

// Certificate for pairs whose first stage is w^n itself (zero first implicit
// column).  Requires, or creates via extend_with_update_stage, a stiffly
// accurate tableau.  Stage-1 differences are folded into the time-n level.
Certificate certify_trivial_first_stage(const ConvexScheme& cs, double lambda,
                                        double tol = 1e-12);

// Certificate for pairs with a genuinely implicit first stage
// (a_im[0][0] > 0).  When the first stage is trivial instead, level-1
// contributions fold into the time-n coefficients and the result agrees with
// certify_trivial_first_stage.
Certificate certify_general(const ConvexScheme& cs, double lambda,
                            double tol = 1e-12);

// dispatches on the tableau structure
Certificate certify(const ConvexScheme& cs, double lambda, double tol = 1e-12);

// Largest lambda in [0, 100] certified feasible at slack `tol`, bisected to
// 1e-10.  Family schemes with theta3 = theta3_opt short-circuit to the closed
// form.  Coefficients published to 16 digits carry rounding in the last
// places, so certifying them at their printed step size needs tol near 1e-8.
double max_certified_lambda(const ConvexScheme& cs, double tol = 1e-12);

}  // namespace tvdmood
