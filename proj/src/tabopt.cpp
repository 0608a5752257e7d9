// Distributed under the MIT License.
// See LICENSE.txt for details.

#include "tvdmood/tabopt.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "tvdmood/tableau.hpp"

namespace tvdmood {

namespace {

// Free coordinates of the four-stage space: a_ex(21, 31, 32, 41, 42, 43),
// a_im(32, 42, 43), b(2, 3, 4).  The first stage is trivial, the first
// implicit column is zero, b and c are shared between the parts, and the
// implicit diagonal absorbs the row-sum constraint so both parts carry the
// same abscissae exactly.
constexpr int kCoords = 12;
using Coords = std::array<double, kCoords>;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Penalty pushing the theta search back over the step-size floor; the gap
// keeps every infeasible score below every feasible one.
constexpr double kPenaltySlope = 20.0;
constexpr double kPenaltyGap = 5.0;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  return seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
}

ImexTableau build_tableau(const Coords& u) {
  ImexTableau t;
  t.s = 4;
  t.name = "opt4";
  t.a_ex.assign(4, std::vector<double>(4, 0.0));
  t.a_im.assign(4, std::vector<double>(4, 0.0));
  t.a_ex[1][0] = u[0];
  t.a_ex[2][0] = u[1];
  t.a_ex[2][1] = u[2];
  t.a_ex[3][0] = u[3];
  t.a_ex[3][1] = u[4];
  t.a_ex[3][2] = u[5];
  const double c2 = u[0];
  const double c3 = u[1] + u[2];
  const double c4 = u[3] + u[4] + u[5];
  t.a_im[1][1] = c2;
  t.a_im[2][1] = u[6];
  t.a_im[2][2] = c3 - u[6];
  t.a_im[3][1] = u[7];
  t.a_im[3][2] = u[8];
  t.a_im[3][3] = c4 - u[7] - u[8];
  t.b_ex = {0.0, u[9], u[10], u[11]};
  t.b_im = t.b_ex;
  t.c_ex = {0.0, c2, c3, c4};
  t.c_im = t.c_ex;
  return t;
}

bool extract_coords(const ImexTableau& t, Coords& u) {
  if (t.s != 4 || !t.trivial_first_stage()) return false;
  for (std::size_t k = 0; k < 4; ++k) {
    if (t.b_ex[k] != t.b_im[k] || t.c_ex[k] != t.c_im[k]) return false;
  }
  if (t.b_ex[0] != 0.0) return false;
  u = {t.a_ex[1][0], t.a_ex[2][0], t.a_ex[2][1], t.a_ex[3][0], t.a_ex[3][1], t.a_ex[3][2],
       t.a_im[2][1], t.a_im[3][1], t.a_im[3][2], t.b_ex[1],   t.b_ex[2],   t.b_ex[3]};
  return true;
}

// Shared b and c collapse the coupled third-order battery to five equations.
Eigen::VectorXd order_residuals(const Coords& u) {
  const double c2 = u[0];
  const double c3 = u[1] + u[2];
  const double c4 = u[3] + u[4] + u[5];
  const double b2 = u[9], b3 = u[10], b4 = u[11];
  Eigen::VectorXd r(5);
  r(0) = b2 + b3 + b4 - 1.0;
  r(1) = b2 * c2 + b3 * c3 + b4 * c4 - 0.5;
  r(2) = b2 * c2 * c2 + b3 * c3 * c3 + b4 * c4 * c4 - 1.0 / 3.0;
  r(3) = b3 * u[2] * c2 + b4 * (u[4] * c2 + u[5] * c3) - 1.0 / 6.0;
  r(4) = b2 * c2 * c2 + b3 * (u[6] * c2 + (c3 - u[6]) * c3) +
         b4 * (u[7] * c2 + u[8] * c3 + (c4 - u[7] - u[8]) * c4) - 1.0 / 6.0;
  return r;
}

// Damped Gauss-Newton with minimum-norm steps onto the order manifold.
bool project_to_order(Coords& u) {
  constexpr double kTarget = 1e-13;
  constexpr double kStep = 1e-7;
  for (int it = 0; it < 80; ++it) {
    const Eigen::VectorXd r = order_residuals(u);
    if (r.lpNorm<Eigen::Infinity>() <= kTarget) return true;
    Eigen::MatrixXd jac(5, kCoords);
    for (int k = 0; k < kCoords; ++k) {
      Coords up = u, um = u;
      up[k] += kStep;
      um[k] -= kStep;
      jac.col(k) = (order_residuals(up) - order_residuals(um)) / (2.0 * kStep);
    }
    Eigen::MatrixXd jjt = jac * jac.transpose();
    jjt.diagonal().array() += 1e-14 * (1.0 + jjt.trace());
    const Eigen::VectorXd delta = jac.transpose() * jjt.ldlt().solve(r);
    const double rn = r.norm();
    double step = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 30; ++ls) {
      Coords trial = u;
      for (int k = 0; k < kCoords; ++k) trial[k] -= step * delta[k];
      if (order_residuals(trial).norm() < rn) {
        u = trial;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) return false;
  }
  return order_residuals(u).lpNorm<Eigen::Infinity>() <= 1e-11;
}

struct ThetaEval {
  ConvexScheme cs;
  double lambda = 0.0;
  double objective = -kInf;  // lambda + sum(theta)
  double score = -kInf;      // objective minus the floor penalty
  bool feasible = false;
};

ThetaEval eval_theta(const ImexTableau& tab, const std::vector<double>& free_theta,
                     const OptProblem& problem) {
  ThetaEval e;
  e.cs.tab = tab;
  const std::size_t len = tab.stiffly_accurate() ? tab.s : tab.s + 1;
  e.cs.theta.assign(len, 1.0);
  for (std::size_t k = 1; k < len && k - 1 < free_theta.size(); ++k) {
    e.cs.theta[k] = std::clamp(free_theta[k - 1], 0.0, 1.0);
  }
  double lam = 0.0;
  try {
    lam = max_certified_lambda(e.cs, problem.certify_tol);
  } catch (const std::exception&) {
    return e;
  }
  const double sum = std::accumulate(e.cs.theta.begin(), e.cs.theta.end(), 0.0);
  e.lambda = lam;
  e.objective = lam + sum;
  e.feasible = lam >= problem.lambda_floor;
  e.score = e.feasible
                ? e.objective
                : e.objective - kPenaltySlope * (problem.lambda_floor - lam) - kPenaltyGap;
  return e;
}

// Coarse lattice over the free weights; most random tableaux certify no
// positive step size at all, and the walk needs a foothold inside the
// certifiable region before polishing pays off.
ThetaEval scan_theta(const ImexTableau& tab, std::size_t n, const OptProblem& problem) {
  static constexpr double kLevels[4] = {0.95, 0.65, 0.35, 0.1};
  ThetaEval best;
  std::vector<double> x(n);
  std::vector<int> idx(n, 0);
  while (true) {
    for (std::size_t k = 0; k < n; ++k) x[k] = kLevels[static_cast<std::size_t>(idx[k])];
    const ThetaEval e = eval_theta(tab, x, problem);
    if (e.score > best.score) best = e;
    std::size_t k = 0;
    while (k < n && ++idx[k] == 4) {
      idx[k] = 0;
      ++k;
    }
    if (k == n) break;
  }
  return best;
}

// Nelder-Mead ascent over the free relaxation weights; evaluation clamps to
// [0,1], so the walk needs no explicit box handling.  Returns the best
// evaluation seen, which may beat the final simplex.
ThetaEval relax_theta(const ImexTableau& tab, const std::vector<double>& start,
                      const OptProblem& problem, int max_iter) {
  const std::size_t n = start.size();
  ThetaEval best;
  auto score = [&](const std::vector<double>& x) {
    ThetaEval e = eval_theta(tab, x, problem);
    if (e.score > best.score) best = e;
    return e.score;
  };

  std::vector<std::vector<double>> xs(n + 1, start);
  std::vector<double> fs(n + 1);
  for (std::size_t i = 1; i <= n; ++i) xs[i][i - 1] += 0.15;
  for (std::size_t i = 0; i <= n; ++i) fs[i] = score(xs[i]);

  auto order = [&]() {
    std::vector<std::size_t> idx(n + 1);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return fs[a] > fs[b];
    });
    std::vector<std::vector<double>> nxs(n + 1);
    std::vector<double> nfs(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      nxs[i] = xs[idx[i]];
      nfs[i] = fs[idx[i]];
    }
    xs = std::move(nxs);
    fs = std::move(nfs);
  };

  for (int it = 0; it < max_iter; ++it) {
    order();
    double spread = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        spread = std::max(spread, std::abs(xs[i][k] - xs[0][k]));
      }
    }
    if (spread < 1e-9 && fs[0] - fs[n] < 1e-11) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) centroid[k] += xs[i][k] / n;
    }
    auto blend = [&](double w) {
      std::vector<double> x(n);
      for (std::size_t k = 0; k < n; ++k) x[k] = centroid[k] + w * (xs[n][k] - centroid[k]);
      return x;
    };

    const std::vector<double> refl = blend(-1.0);
    const double fr = score(refl);
    if (fr > fs[0]) {
      const std::vector<double> expd = blend(-2.0);
      const double fe = score(expd);
      if (fe > fr) {
        xs[n] = expd;
        fs[n] = fe;
      } else {
        xs[n] = refl;
        fs[n] = fr;
      }
      continue;
    }
    if (fr > fs[n - 1]) {
      xs[n] = refl;
      fs[n] = fr;
      continue;
    }
    const std::vector<double> ctr = blend(fr > fs[n] ? -0.5 : 0.5);
    const double fc = score(ctr);
    if (fc > std::max(fr, fs[n])) {
      xs[n] = ctr;
      fs[n] = fc;
      continue;
    }
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t k = 0; k < n; ++k) xs[i][k] = 0.5 * (xs[i][k] + xs[0][k]);
      fs[i] = score(xs[i]);
    }
  }
  return best;
}

std::size_t free_theta_count(const ImexTableau& tab) {
  return (tab.stiffly_accurate() ? tab.s : tab.s + 1) - 1;
}

OptOutcome outcome_from(const ThetaEval& e, int restart) {
  OptOutcome o;
  o.feasible = true;
  o.scheme = e.cs;
  o.lambda = e.lambda;
  o.objective = e.objective;
  o.best_restart = restart;
  return o;
}

// feasible beats infeasible, then larger objective, then the earlier restart
bool better(const OptOutcome& a, const OptOutcome& b) {
  if (a.feasible != b.feasible) return a.feasible;
  if (!a.feasible) return false;
  if (a.objective != b.objective) return a.objective > b.objective;
  return a.best_restart < b.best_restart && a.best_restart >= 0;
}

// Projected coordinates whose abscissae leave (0, 1.2), whose implicit
// diagonal dips below 0.02, or whose weights go negative almost never
// certify a positive step size; redraw instead of walking them.
bool plausible_coords(const Coords& u) {
  const double c2 = u[0];
  const double c3 = u[1] + u[2];
  const double c4 = u[3] + u[4] + u[5];
  for (double c : {c2, c3, c4}) {
    if (!(c > 0.02 && c < 1.2)) return false;
  }
  if (c3 - u[6] < 0.02) return false;
  if (c4 - u[7] - u[8] < 0.02) return false;
  for (int k = 9; k < kCoords; ++k) {
    if (u[k] < 0.0) return false;
  }
  return true;
}

OptOutcome run_restart(const OptProblem& problem, std::uint64_t seed, int restart) {
  std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(restart)));
  std::uniform_real_distribution<double> coef(-0.5, 1.0);
  std::uniform_real_distribution<double> weight(0.0, 0.7);

  Coords u;
  bool drawn = false;
  for (int attempt = 0; attempt < 40 && !drawn; ++attempt) {
    for (int k = 0; k < 9; ++k) u[k] = coef(rng);
    for (int k = 9; k < kCoords; ++k) u[k] = weight(rng);
    drawn = project_to_order(u) && plausible_coords(u);
  }
  if (!drawn) return {};

  ImexTableau tab;
  try {
    tab = build_tableau(u);
    tab.validate();
  } catch (const std::invalid_argument&) {
    return {};
  }
  if (order_check(tab, problem.order_tol).order < 3) return {};

  const std::size_t n = free_theta_count(tab);
  const ThetaEval grid = scan_theta(tab, n, problem);
  if (grid.lambda <= 0.0) return {};
  std::vector<double> th0(n);
  for (std::size_t k = 0; k < n; ++k) th0[k] = grid.cs.theta[k + 1];
  ThetaEval e = relax_theta(tab, th0, problem, 220);
  if (grid.score > e.score) e = grid;
  if (!e.feasible) return {};
  return outcome_from(e, restart);
}

// Adaptive local search around the incumbent: Gaussian steps in the tableau
// coordinates, re-projected onto the order manifold and re-relaxed over the
// weights.  The step size widens on acceptance and contracts on rejection.
OptOutcome refine_outcome(const OptProblem& problem, OptOutcome base, std::uint64_t seed,
                          int rounds) {
  Coords u;
  if (!base.feasible || !extract_coords(base.scheme.tab, u)) return base;
  std::mt19937_64 rng(mix_seed(seed, 0x5EEDULL));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> jitter(-0.05, 0.05);
  double sigma = 0.15;
  for (int round = 0; round < rounds; ++round) {
    Coords v = u;
    for (int k = 0; k < kCoords; ++k) v[k] += sigma * gauss(rng);
    bool accepted = false;
    if (project_to_order(v)) {
      ImexTableau tab;
      bool built = true;
      try {
        tab = build_tableau(v);
        tab.validate();
      } catch (const std::invalid_argument&) {
        built = false;
      }
      if (built && order_check(tab, problem.order_tol).order >= 3) {
        const std::size_t n = free_theta_count(tab);
        std::vector<double> th0(n);
        for (std::size_t k = 0; k < n; ++k) {
          const double prev =
              k + 1 < base.scheme.theta.size() ? base.scheme.theta[k + 1] : 0.55;
          th0[k] = prev + jitter(rng);
        }
        const ThetaEval e = relax_theta(tab, th0, problem, 220);
        if (e.feasible) {
          const OptOutcome cand = outcome_from(e, base.best_restart);
          if (better(cand, base)) {
            base = cand;
            u = v;
            accepted = true;
          }
        }
      }
    }
    sigma = accepted ? std::min(0.25, sigma * 1.3) : std::max(1e-3, sigma * 0.92);
  }
  return base;
}

// The three-stage search walks the closed-form family: the abscissa
// maximizing theta3 by golden section, then the trade of theta4 against the
// certified bound, cut back to the feasibility floor by bisection.
OptOutcome run_family(const OptProblem& problem) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto golden_max = [&phi](const std::function<double(double)>& f, double lo, double hi) {
    double a = lo, b = hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + phi * (b - a);
        f2 = f(x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - phi * (b - a);
        f1 = f(x1);
      }
    }
    return 0.5 * (a + b);
  };

  const double gamma_lo = 1.0 / std::sqrt(3.0) + 1e-12;
  const double gamma = golden_max([](double g) { return family_theta3_opt(g); }, gamma_lo, 6.0);

  const double theta4_cap = family_bounds(gamma, 0.0).theta4_max;
  auto lambda_at = [&](double t4) { return family_bounds(gamma, t4).lambda_max; };
  double cut = theta4_cap;
  if (lambda_at(theta4_cap * (1.0 - 1e-12)) < problem.lambda_floor) {
    double lo = 0.0, hi = theta4_cap;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (lambda_at(mid) >= problem.lambda_floor ? lo : hi) = mid;
    }
    cut = lo;
  }
  if (cut <= 0.0) return {};

  const double theta3 = family_theta3_opt(gamma);
  auto objective_at = [&](double t4) { return lambda_at(t4) + 2.0 + theta3 + t4; };
  const double eps = 1e-12 * std::max(1.0, cut);
  const double theta4 = golden_max(objective_at, eps, cut - eps);

  OptOutcome o;
  o.scheme = make_tvd3_scheme(gamma, theta4);
  o.lambda = max_certified_lambda(o.scheme, problem.certify_tol);
  o.objective = o.lambda + std::accumulate(o.scheme.theta.begin(), o.scheme.theta.end(), 0.0);
  o.feasible = o.lambda >= problem.lambda_floor;
  o.best_restart = 0;
  return o;
}

OptOutcome evaluate_start(const OptProblem& problem, const ConvexScheme& start) {
  start.validate();
  OptOutcome base;
  base.scheme = start;
  base.lambda = max_certified_lambda(start, problem.certify_tol);
  base.objective =
      base.lambda + std::accumulate(start.theta.begin(), start.theta.end(), 0.0);
  base.feasible = base.lambda >= problem.lambda_floor &&
                  order_check(start.tab, problem.order_tol).order >= 3;
  base.best_restart = -1;
  return base;
}

}  // namespace

void OptProblem::validate() const {
  if (stages != 3 && stages != 4) {
    throw std::invalid_argument("optimizer supports 3 or 4 stages");
  }
  if (!(lambda_floor >= 0.0)) {
    throw std::invalid_argument("step-size floor must be non-negative");
  }
  if (!(order_tol > 0.0)) {
    throw std::invalid_argument("order tolerance must be positive");
  }
  if (!(certify_tol > 0.0)) {
    throw std::invalid_argument("certificate tolerance must be positive");
  }
}

double scheme_objective(const ConvexScheme& cs) {
  cs.validate();
  return max_certified_lambda(cs) +
         std::accumulate(cs.theta.begin(), cs.theta.end(), 0.0);
}

OptOutcome optimize(const OptProblem& problem, std::uint64_t seed, int restarts) {
  problem.validate();
  if (restarts < 1) throw std::invalid_argument("optimizer needs at least one restart");
  if (problem.stages == 3) return run_family(problem);

  std::vector<OptOutcome> results(static_cast<std::size_t>(restarts));
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int i = next.fetch_add(1); i < restarts; i = next.fetch_add(1)) {
      try {
        results[static_cast<std::size_t>(i)] = run_restart(problem, seed, i);
      } catch (const std::exception&) {
        results[static_cast<std::size_t>(i)] = {};
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned threads = std::min(hw, static_cast<unsigned>(restarts));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  // The top restarts seed independent local searches; distinct incumbents
  // usually sit in distinct basins, and polishing several costs little.
  std::vector<OptOutcome> top;
  for (const OptOutcome& o : results) {
    if (!o.feasible) continue;
    top.push_back(o);
    std::sort(top.begin(), top.end(), better);
    if (top.size() > 3) top.pop_back();
  }
  OptOutcome best;
  for (std::size_t k = 0; k < top.size(); ++k) {
    const OptOutcome r =
        refine_outcome(problem, top[k], mix_seed(seed, 0xF1FEULL + k), 140);
    if (better(r, best)) best = r;
  }
  return best;
}

OptOutcome refine(const OptProblem& problem, const ConvexScheme& start, std::uint64_t seed,
                  int rounds) {
  problem.validate();
  if (rounds < 0) throw std::invalid_argument("refinement rounds must be non-negative");
  if (problem.stages != static_cast<int>(start.tab.s)) {
    throw std::invalid_argument("stage count does not match the start scheme");
  }
  return refine_outcome(problem, evaluate_start(problem, start), seed, rounds);
}

}  // namespace tvdmood
