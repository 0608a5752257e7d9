// Distributed under the MIT License.
// See LICENSE.txt for details.

#include "tvdmood/certify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tvdmood {

namespace {

constexpr double kBindingTol = 1e-9;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("ConvexScheme: " + what);
}

std::string idx(const char* base, std::size_t k) {
  return std::string(base) + "_" + std::to_string(k + 1);
}
std::string idx2(const char* base, std::size_t k, std::size_t l) {
  return std::string(base) + "_" + std::to_string(k + 1) + std::to_string(l + 1);
}

struct ConstraintSet {
  Certificate cert;
  double tol;
  explicit ConstraintSet(double tol_) : tol(tol_) {
    cert.feasible = true;
    cert.min_margin = 1e300;
  }
  void record(const std::string& name, double value) {
    cert.coeffs.emplace_back(name, value);
  }
  // inequality value >= 0 required (with slack tol)
  void ge0(const std::string& name, double value) {
    cert.coeffs.emplace_back(name, value);
    cert.min_margin = std::min(cert.min_margin, value);
    if (value < -tol) cert.feasible = false;
    if (value < -tol || std::abs(value) <= kBindingTol) cert.binding.push_back(name);
  }
  // strictly positive required
  void gt0(const std::string& name, double value) {
    cert.coeffs.emplace_back(name, value);
    cert.min_margin = std::min(cert.min_margin, value);
    if (!(value > 0.0)) cert.feasible = false;
    if (!(value > 0.0) || std::abs(value) <= kBindingTol) cert.binding.push_back(name);
  }
};

// Normalized data: stiffly accurate tableau plus theta of matching length.
struct SaScheme {
  ImexTableau tab;
  std::vector<double> theta;
};

SaScheme normalize(const ConvexScheme& cs) {
  cs.validate();
  SaScheme out;
  if (cs.tab.stiffly_accurate()) {
    out.tab = cs.tab;
  } else {
    out.tab = extend_with_update_stage(cs.tab);
  }
  out.theta = cs.theta;
  if (out.theta.size() != out.tab.s)
    throw std::invalid_argument("certify: theta length does not cover the update stage");
  return out;
}

}  // namespace

void ConvexScheme::validate() const {
  tab.validate();
  const std::size_t want = tab.stiffly_accurate() ? tab.s : tab.s + 1;
  require(theta.size() == want, "theta length must be s (stiffly accurate) or s+1");
  require(theta[0] == 1.0, "theta[0] must be 1");
  for (double th : theta) require(th >= 0.0 && th <= 1.0, "theta entries must lie in [0,1]");
}

double family_theta3_opt(double gamma) {
  if (!(gamma > 1.0 / 3.0))
    throw std::invalid_argument("family_theta3_opt: requires gamma > 1/3");
  return (3.0 * gamma - 1.0) / (6.0 * gamma * gamma);
}

FamilyBounds family_bounds(double gamma, double theta4) {
  FamilyBounds out;
  if (!(gamma > 1.0 / 3.0)) return out;
  out.theta3 = family_theta3_opt(gamma);
  out.theta4_max =
      (3.0 * gamma - 1.0) * (3.0 * gamma * gamma + 1.0) / (18.0 * gamma * gamma * gamma);
  if (gamma < 1.0 / std::sqrt(3.0)) return out;
  if (!(theta4 > 0.0 && theta4 < out.theta4_max)) return out;
  const double g = gamma;
  const double num = 18.0 * g * g * g * theta4 - (3.0 * g - 1.0) * (3.0 * g * g + 1.0);
  const double den =
      (3.0 * g - 1.0) * ((6.0 * g * g + 1.0) * theta4 - (3.0 * g * g + 1.0));
  // the update-stage constraint gives num/den; the stage-level pair
  // constraints add the theta4-independent bound 6g/(3g^2+1), which binds
  // only for g > 1 + sqrt(2/3)
  const double pair_bound = 6.0 * g / (3.0 * g * g + 1.0);
  out.feasible = true;
  out.lambda_max = std::min(num / den, pair_bound);
  return out;
}

FamilyAlphaPoint family_alpha_point(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("family_alpha_point: alpha must lie in (0,1)");
  FamilyAlphaPoint p;
  p.theta4 = (7.0 / 16.0) * alpha;
  p.lambda = (1.0 - alpha) / (1.0 - (11.0 / 16.0) * alpha);
  return p;
}

ConvexScheme make_tvd3_scheme(double gamma, double theta4) {
  ConvexScheme cs;
  cs.tab = make_tvd3_family(gamma);
  cs.theta = {1.0, 1.0, family_theta3_opt(gamma), theta4};
  cs.family_gamma = gamma;
  cs.validate();
  return cs;
}

ConvexScheme make_tvd3_opt() { return make_tvd3_scheme(2.0 / 3.0, 7.0 / 48.0); }

ConvexScheme make_tvd3_4_scheme() {
  ConvexScheme cs;
  cs.tab = make_tvd3_4();
  cs.theta = {1.0, 1.0, 1.0, 0.5110907014643069, 0.4997722865197203};
  cs.validate();
  return cs;
}

ConvexScheme make_imex1_scheme() {
  ConvexScheme cs;
  cs.tab = make_imex1();
  cs.theta = {1.0, 1.0};
  cs.validate();
  return cs;
}

ImexTableau extend_with_update_stage(const ImexTableau& t) {
  if (t.stiffly_accurate()) return t;
  ImexTableau e;
  e.s = t.s + 1;
  e.name = t.name + "+update";
  e.a_ex.assign(e.s, std::vector<double>(e.s, 0.0));
  e.a_im.assign(e.s, std::vector<double>(e.s, 0.0));
  for (std::size_t i = 0; i < t.s; ++i) {
    for (std::size_t j = 0; j < t.s; ++j) {
      e.a_ex[i][j] = t.a_ex[i][j];
      e.a_im[i][j] = t.a_im[i][j];
    }
  }
  double csum_ex = 0.0, csum_im = 0.0;
  for (std::size_t j = 0; j < t.s; ++j) {
    e.a_ex[t.s][j] = t.b_ex[j];
    e.a_im[t.s][j] = t.b_im[j];
    csum_ex += t.b_ex[j];
    csum_im += t.b_im[j];
  }
  e.b_ex = e.a_ex[t.s];
  e.b_im = e.a_im[t.s];
  e.c_ex = t.c_ex;
  e.c_im = t.c_im;
  e.c_ex.push_back(csum_ex);
  e.c_im.push_back(csum_im);
  e.validate();
  return e;
}

// Stage-level coefficients shared by both certificate paths.
namespace {

struct StageData {
  std::size_t s;
  std::vector<double> aa;   // theta_k a_kk + (1-theta_k) c_k
  std::vector<std::vector<double>> bb;   // theta_k a_kl / aa_l  (0 when a_kl == 0)
  std::vector<std::vector<double>> bbt;  // theta_k at_kl
};

StageData stage_data(const SaScheme& ss) {
  const ImexTableau& t = ss.tab;
  StageData d;
  d.s = t.s;
  d.aa.assign(t.s, 0.0);
  d.bb.assign(t.s, std::vector<double>(t.s, 0.0));
  d.bbt.assign(t.s, std::vector<double>(t.s, 0.0));
  for (std::size_t k = 0; k < t.s; ++k) {
    const double th = ss.theta[k];
    d.aa[k] = th * t.a_im[k][k] + (1.0 - th) * t.c_im[k];
    for (std::size_t l = 0; l < k; ++l) {
      d.bbt[k][l] = th * t.a_ex[k][l];
      if (t.a_im[k][l] != 0.0) {
        if (d.aa[l] == 0.0)
          throw std::domain_error("certify: implicit weight refers to a stage with zero solve coefficient");
        d.bb[k][l] = th * t.a_im[k][l] / d.aa[l];
      }
    }
  }
  return d;
}

}  // namespace

Certificate certify_trivial_first_stage(const ConvexScheme& cs, double lambda, double tol) {
  const SaScheme ss = normalize(cs);
  const ImexTableau& t = ss.tab;
  if (!t.trivial_first_stage())
    throw std::invalid_argument("certify_trivial_first_stage: first implicit column must vanish");
  const StageData d = stage_data(ss);
  const std::size_t s = t.s;

  // stage-1 differences coincide with the time-n level, so the explicit
  // first-column weights fold into the time-n coefficients
  std::vector<double> aat(s, 0.0);
  for (std::size_t k = 1; k < s; ++k)
    aat[k] = ss.theta[k] * t.a_ex[k][0] + (1.0 - ss.theta[k]) * t.c_ex[k];

  std::vector<double> C(s, 0.0), D(s, 0.0);
  std::vector<std::vector<double>> Cp(s, std::vector<double>(s, 0.0));
  std::vector<std::vector<double>> Dp(s, std::vector<double>(s, 0.0));

  ConstraintSet cons(tol);
  for (std::size_t k = 1; k < s; ++k) {
    const bool divisor_used = [&] {
      for (std::size_t r = k + 1; r < s; ++r)
        if (t.a_im[r][k] != 0.0) return true;
      return false;
    }();
    if (divisor_used || t.a_im[k][k] != 0.0 || ss.theta[k] != 1.0)
      cons.gt0(idx("A", k), d.aa[k]);
    else
      cons.record(idx("A", k), d.aa[k]);

    C[k] = aat[k];
    D[k] = 1.0 - lambda * aat[k];
    for (std::size_t l = 1; l < k; ++l) {
      C[k] -= d.bb[k][l] * C[l];
      D[k] -= d.bb[k][l] * D[l];
    }
    cons.ge0(idx("C", k), C[k]);
    cons.ge0(idx("D", k), D[k]);

    for (std::size_t l = 1; l < k; ++l) {
      Cp[k][l] = d.bbt[k][l];
      Dp[k][l] = d.bb[k][l] - lambda * d.bbt[k][l];
      for (std::size_t r = l + 1; r < k; ++r) {
        Cp[k][l] -= d.bb[k][r] * Cp[r][l];
        Dp[k][l] -= d.bb[k][r] * Dp[r][l];
      }
      cons.ge0(idx2("C", k, l), Cp[k][l]);
      cons.ge0(idx2("D", k, l), Dp[k][l]);
    }
  }
  return cons.cert;
}

Certificate certify_general(const ConvexScheme& cs, double lambda, double tol) {
  const SaScheme ss = normalize(cs);
  const ImexTableau& t = ss.tab;
  if (t.trivial_first_stage()) {
    // level-1 differences are time-n differences; the folded coefficients
    // reproduce the dedicated certificate exactly
    return certify_trivial_first_stage(cs, lambda, tol);
  }
  const StageData d = stage_data(ss);
  const std::size_t s = t.s;

  std::vector<double> aat(s, 0.0);
  for (std::size_t k = 0; k < s; ++k) aat[k] = (1.0 - ss.theta[k]) * t.c_ex[k];

  std::vector<double> Ct(s, 0.0), C(s, 0.0);
  std::vector<std::vector<double>> Dt(s, std::vector<double>(s, 0.0));
  std::vector<std::vector<double>> Dp(s, std::vector<double>(s, 0.0));

  ConstraintSet cons(tol);
  for (std::size_t k = 0; k < s; ++k) {
    const bool divisor_used = [&] {
      for (std::size_t r = k + 1; r < s; ++r)
        if (t.a_im[r][k] != 0.0) return true;
      return false;
    }();
    if (divisor_used || t.a_im[k][k] != 0.0 || ss.theta[k] != 1.0)
      cons.gt0(idx("A", k), d.aa[k]);
    else
      cons.record(idx("A", k), d.aa[k]);

    Ct[k] = aat[k];
    for (std::size_t l = 1; l < k; ++l) Ct[k] -= d.bb[k][l] * Ct[l];
    C[k] = 1.0;
    for (std::size_t l = 0; l < k; ++l) C[k] -= d.bb[k][l] * C[l];
    cons.ge0(idx("Ct", k), lambda * Ct[k]);
    cons.ge0(idx("Cm", k), C[k] - lambda * Ct[k]);

    for (std::size_t l = 0; l < k; ++l) {
      Dt[k][l] = d.bbt[k][l];
      Dp[k][l] = d.bb[k][l];
      for (std::size_t r = l + 1; r < k; ++r) {
        Dt[k][l] -= d.bb[k][r] * Dt[r][l];
        Dp[k][l] -= d.bb[k][r] * Dp[r][l];
      }
      cons.ge0(idx2("Dt", k, l), lambda * Dt[k][l]);
      cons.ge0(idx2("Dm", k, l), Dp[k][l] - lambda * Dt[k][l]);
    }
  }
  return cons.cert;
}

Certificate certify(const ConvexScheme& cs, double lambda, double tol) {
  if (cs.tab.trivial_first_stage()) return certify_trivial_first_stage(cs, lambda, tol);
  return certify_general(cs, lambda, tol);
}

double max_certified_lambda(const ConvexScheme& cs, double tol) {
  if (cs.family_gamma && cs.theta.size() == 4 && cs.theta[0] == 1.0 && cs.theta[1] == 1.0 &&
      std::abs(cs.theta[2] - family_theta3_opt(*cs.family_gamma)) <= 1e-12) {
    const FamilyBounds fb = family_bounds(*cs.family_gamma, cs.theta[3]);
    return fb.feasible ? fb.lambda_max : 0.0;
  }
  if (!certify(cs, 0.0, tol).feasible) return 0.0;
  double lo = 0.0, hi = 100.0;
  if (certify(cs, hi, tol).feasible) return hi;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (certify(cs, mid, tol).feasible ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace tvdmood
