// Distributed under the MIT License.
// See LICENSE.txt for details.

#include "tvdmood/certify.hpp"

#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

#include "doctest.h"

using namespace tvdmood;

namespace {

std::map<std::string, double> coeff_map(const Certificate& c) {
  return {c.coeffs.begin(), c.coeffs.end()};
}

bool has_binding(const Certificate& c, const std::string& name) {
  for (const auto& b : c.binding)
    if (b == name) return true;
  return false;
}

}  // namespace

TEST_CASE("family closed forms at gamma = 2/3") {
  CHECK(family_theta3_opt(2.0 / 3.0) == doctest::Approx(3.0 / 8.0).epsilon(1e-15));
  const FamilyBounds fb = family_bounds(2.0 / 3.0, 7.0 / 48.0);
  CHECK(fb.feasible);
  CHECK(fb.theta3 == doctest::Approx(3.0 / 8.0).epsilon(1e-15));
  CHECK(fb.theta4_max == doctest::Approx(7.0 / 16.0).epsilon(1e-15));
  CHECK(fb.lambda_max == doctest::Approx(32.0 / 37.0).epsilon(1e-15));
}

TEST_CASE("alpha parameterization reproduces the optimal point") {
  const FamilyAlphaPoint p = family_alpha_point(1.0 / 3.0);
  CHECK(p.theta4 == doctest::Approx(7.0 / 48.0).epsilon(1e-15));
  CHECK(p.lambda == doctest::Approx(32.0 / 37.0).epsilon(1e-15));
  CHECK_THROWS_AS(family_alpha_point(0.0), std::invalid_argument);
  CHECK_THROWS_AS(family_alpha_point(1.0), std::invalid_argument);
  // step-size bound approaches 1 as the update weight vanishes
  CHECK(family_alpha_point(1e-9).lambda == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("family feasibility boundary in gamma and theta4") {
  CHECK_FALSE(family_bounds(0.55, 0.1).feasible);
  CHECK_FALSE(family_bounds(0.5, 0.01).feasible);
  CHECK(family_bounds(1.0 / std::sqrt(3.0) + 1e-6, 1e-3).feasible);
  CHECK(family_bounds(2.0, 0.01).feasible);
  const double t4max = family_bounds(2.0 / 3.0, 0.1).theta4_max;
  CHECK_FALSE(family_bounds(2.0 / 3.0, t4max + 1e-9).feasible);
  CHECK_FALSE(family_bounds(2.0 / 3.0, 0.0).feasible);
  CHECK_FALSE(family_bounds(2.0 / 3.0, -0.1).feasible);
}

TEST_CASE("certificate coefficients at the optimal family point") {
  const ConvexScheme cs = make_tvd3_opt();
  const double lam = 0.5;
  const Certificate cert = certify_trivial_first_stage(cs, lam);
  CHECK(cert.feasible);
  const auto m = coeff_map(cert);
  CHECK(m.at("A_2") == doctest::Approx(1.0 / 4.0).epsilon(1e-14));
  CHECK(m.at("A_3") == doctest::Approx(7.0 / 12.0).epsilon(1e-14));
  CHECK(m.at("A_4") == doctest::Approx(41.0 / 48.0).epsilon(1e-14));
  CHECK(m.at("C_2") == doctest::Approx(1.0 / 4.0).epsilon(1e-14));
  CHECK(m.at("C_3") == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(m.at("C_4") == doctest::Approx(37.0 / 48.0).epsilon(1e-14));
  CHECK(m.at("D_2") == doctest::Approx(1.0 - lam / 4.0).epsilon(1e-14));
  CHECK(m.at("D_3") == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(m.at("D_4") == doctest::Approx(2.0 / 3.0 - 37.0 / 48.0 * lam).epsilon(1e-14));
  CHECK(m.at("C_32") == doctest::Approx(3.0 / 8.0 * 14.0 / 9.0).epsilon(1e-14));
  CHECK(m.at("C_42") == doctest::Approx(1.0 / 48.0).epsilon(1e-14));
  CHECK(m.at("C_43") == doctest::Approx(1.0 / 16.0).epsilon(1e-14));
  CHECK(m.at("D_42") == doctest::Approx(19.0 / 84.0 - lam / 48.0).epsilon(1e-14));
  CHECK(m.at("D_43") == doctest::Approx(3.0 / 28.0 - lam / 16.0).epsilon(1e-14));
}

TEST_CASE("optimal family point is tight at lambda = 32/37") {
  const ConvexScheme cs = make_tvd3_opt();
  const double lmax = 32.0 / 37.0;
  CHECK(certify(cs, lmax - 1e-6).feasible);
  CHECK_FALSE(certify(cs, lmax + 1e-6).feasible);
  const Certificate at = certify(cs, lmax);
  CHECK(has_binding(at, "D_4"));
  CHECK(has_binding(at, "C_3"));
  CHECK(max_certified_lambda(cs) == doctest::Approx(lmax).epsilon(1e-15));
  // bisection agrees with the closed form once the shortcut is disabled
  ConvexScheme plain = cs;
  plain.family_gamma.reset();
  CHECK(max_certified_lambda(plain) == doctest::Approx(lmax).epsilon(1e-8));
}

TEST_CASE("closed form matches bisection across the family") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dg(1.0 / std::sqrt(3.0) + 1e-3, 5.0);
  for (int i = 0; i < 25; ++i) {
    const double g = dg(rng);
    const double t4max = family_bounds(g, 0.1).theta4_max;
    std::uniform_real_distribution<double> dt4(1e-3 * t4max, (1.0 - 1e-3) * t4max);
    const double t4 = dt4(rng);
    ConvexScheme cs = make_tvd3_scheme(g, t4);
    const double closed = max_certified_lambda(cs);
    cs.family_gamma.reset();
    const double bisected = max_certified_lambda(cs);
    CHECK(std::abs(closed - bisected) <= 1e-8);
  }
}

TEST_CASE("feasible lambda set is an interval") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dg(0.6, 3.0);
  for (int i = 0; i < 10; ++i) {
    const double g = dg(rng);
    const double t4max = family_bounds(g, 0.1).theta4_max;
    std::uniform_real_distribution<double> dt4(0.05 * t4max, 0.95 * t4max);
    ConvexScheme cs = make_tvd3_scheme(g, dt4(rng));
    cs.family_gamma.reset();
    const double lmax = max_certified_lambda(cs);
    if (lmax <= 0.0) continue;
    CHECK(certify(cs, 0.0).feasible);
    CHECK(certify(cs, 0.5 * lmax).feasible);
    CHECK_FALSE(certify(cs, lmax + 1e-6).feasible);
  }
}

TEST_CASE("both certificate paths accept the family example") {
  const ConvexScheme cs = make_tvd3_opt();
  CHECK(certify_trivial_first_stage(cs, 0.5).feasible);
  CHECK(certify_general(cs, 0.5).feasible);
}

TEST_CASE("backward-Euler pair is certified up to lambda = 1") {
  const ConvexScheme cs = make_imex1_scheme();
  CHECK(certify(cs, 1.0).feasible);
  CHECK_FALSE(certify(cs, 1.0 + 1e-6).feasible);
  CHECK(max_certified_lambda(cs) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("four-substep first-order pair is certified up to lambda = 4") {
  ConvexScheme cs;
  cs.tab = builtin_tableau("imex1_4");
  cs.theta.assign(cs.tab.s, 1.0);
  CHECK(certify(cs, 4.0 - 1e-9).feasible);
  CHECK_FALSE(certify(cs, 4.0 + 1e-6).feasible);
  CHECK(max_certified_lambda(cs) == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("tuned four-stage pair is feasible at its published step bound") {
  const ConvexScheme cs = make_tvd3_4_scheme();
  // coefficients are published to 16 digits; the rounded values miss the
  // exact constraint boundary by about 6e-9
  const Certificate cert = certify(cs, kTvd34Lambda, 1e-8);
  CHECK(cert.feasible);
  CHECK_FALSE(certify(cs, kTvd34Lambda + 1e-4).feasible);
  CHECK(max_certified_lambda(cs) == doctest::Approx(kTvd34Lambda).epsilon(1e-4));
}

TEST_CASE("general certificate handles a nonzero first implicit diagonal") {
  // two-stage pair with a_im[0][0] = 1/2; the only lambda-dependent
  // constraint is B_21 - lambda * Bt_21 = 1/2 - lambda
  ImexTableau t;
  t.s = 2;
  t.name = "dirk_pair";
  t.a_ex = {{0.0, 0.0}, {1.0, 0.0}};
  t.a_im = {{0.5, 0.0}, {0.25, 0.5}};
  t.b_ex = {1.0, 0.0};
  t.b_im = {0.25, 0.5};
  t.c_ex = {0.0, 1.0};
  t.c_im = {0.5, 0.75};
  t.validate();
  CHECK_FALSE(t.trivial_first_stage());
  ConvexScheme cs;
  cs.tab = t;
  cs.theta = {1.0, 1.0};
  CHECK(certify_general(cs, 0.4).feasible);
  CHECK_FALSE(certify_general(cs, 0.6).feasible);
  CHECK(max_certified_lambda(cs) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK_THROWS_AS(certify_trivial_first_stage(cs, 0.4), std::invalid_argument);
}

TEST_CASE("update-stage extension produces a stiffly accurate tableau") {
  const ImexTableau t = make_tvd3_family(2.0 / 3.0);
  CHECK_FALSE(t.stiffly_accurate());
  const ImexTableau e = extend_with_update_stage(t);
  CHECK(e.s == 4);
  CHECK(e.stiffly_accurate());
  CHECK_NOTHROW(e.validate());
  CHECK(e.c_ex[3] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e.c_im[3] == doctest::Approx(1.0).epsilon(1e-14));
  for (std::size_t j = 0; j < t.s; ++j) {
    CHECK(e.a_ex[3][j] == t.b_ex[j]);
    CHECK(e.a_im[3][j] == t.b_im[j]);
  }
  // already stiffly accurate tableaux are returned unchanged
  CHECK(extend_with_update_stage(make_imex1()).s == 2);
}

TEST_CASE("convex scheme validation rejects malformed weights") {
  ConvexScheme cs;
  cs.tab = make_tvd3_family(2.0 / 3.0);
  cs.theta = {1.0, 1.0, 0.375};  // missing update weight
  CHECK_THROWS_AS(cs.validate(), std::invalid_argument);
  cs.theta = {0.5, 1.0, 0.375, 0.1};
  CHECK_THROWS_AS(cs.validate(), std::invalid_argument);
  cs.theta = {1.0, 1.0, 1.375, 0.1};
  CHECK_THROWS_AS(cs.validate(), std::invalid_argument);
  cs.theta = {1.0, 1.0, 0.375, 0.1};
  CHECK_NOTHROW(cs.validate());
}
