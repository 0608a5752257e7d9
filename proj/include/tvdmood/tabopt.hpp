// Distributed under the MIT License.
// See LICENSE.txt for details.

#pragma once

#include <cstdint>

#include "tvdmood/certify.hpp"

namespace tvdmood {

// Search for relaxed IMEX pairs maximizing lambda + sum(theta) subject to
// third-order conditions and the step-size certificate.  Four-stage searches
// walk the space of pairs with a trivial first stage, a zero first implicit
// column, and b and c shared between the two parts (the published optimum
// lies in this subspace and is not stiffly accurate, so b stays free of the
// last tableau rows).  Three-stage searches walk the one-parameter family.
struct OptProblem {
  int stages = 4;             // 3 or 4
  double lambda_floor = 0.5;  // candidates certified below this bound are discarded
  double order_tol = 1e-10;   // order-condition residual bound
  double certify_tol = 1e-12; // certificate slack; loosen to 1e-8 for schemes
                              // whose coefficients were rounded to 16 digits
  void validate() const;
};

struct OptOutcome {
  bool feasible = false;
  ConvexScheme scheme;  // meaningful only when feasible
  double lambda = 0.0;  // certified step-size bound of `scheme`
  double objective = 0.0;  // lambda + sum(theta)
  int best_restart = -1;   // restart index that produced the incumbent
};

// lambda_max of the scheme plus the sum of its relaxation weights.
double scheme_objective(const ConvexScheme& cs);

// Random multistart: every restart projects a random coefficient draw onto
// the order-condition manifold with a damped Gauss-Newton iteration and then
// relaxes theta against the certified bound with a Nelder-Mead search; the
// incumbent is polished by a neighbourhood refinement pass.  Restarts may run
// concurrently; the result depends only on (problem, seed, restarts), never
// on the thread count.
OptOutcome optimize(const OptProblem& problem, std::uint64_t seed, int restarts);

// Neighbourhood refinement around a known scheme, also the warm-start entry:
// the start is evaluated as given and the outcome never has a smaller
// objective.  Rounds perturb the start inside the four-stage search space;
// schemes outside it (different stage count or unshared weights) are returned
// evaluated but unperturbed.
OptOutcome refine(const OptProblem& problem, const ConvexScheme& start, std::uint64_t seed,
                  int rounds);

}  // namespace tvdmood
