// Distributed under the MIT License.
// See LICENSE.txt for details.

#include "tvdmood/metrics.hpp"

#include <cmath>
#include <random>

#include "doctest.h"

using namespace tvdmood;

TEST_CASE("grid norms on hand examples") {
  const State w{3.0, -4.0};
  CHECK(l1_norm(w, 0.5) == doctest::Approx(14.0).epsilon(1e-15));
  CHECK(l1_norm(w, 0.5, true) == doctest::Approx(3.5).epsilon(1e-15));
  CHECK(l2_norm(w, 0.5) == doctest::Approx(std::sqrt(50.0)).epsilon(1e-15));
  CHECK(l2_norm(w, 0.5, true) == doctest::Approx(std::sqrt(12.5)).epsilon(1e-15));
  CHECK(linf_norm(w) == 4.0);
  CHECK(field_range(w) == 7.0);
}

TEST_CASE("norms are absolutely homogeneous") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  State w(33);
  for (double& v : w) v = u(rng);
  const double a = -2.7;
  State aw = w;
  for (double& v : aw) v *= a;
  for (bool vw : {false, true}) {
    CHECK(l1_norm(aw, 0.1, vw) == doctest::Approx(std::abs(a) * l1_norm(w, 0.1, vw)).epsilon(1e-13));
    CHECK(l2_norm(aw, 0.1, vw) == doctest::Approx(std::abs(a) * l2_norm(w, 0.1, vw)).epsilon(1e-13));
  }
  CHECK(linf_norm(aw) == doctest::Approx(std::abs(a) * linf_norm(w)).epsilon(1e-13));
}

TEST_CASE("quasinorm reduces to the plain norm on range-preserving runs") {
  RangeTracker tracker;
  tracker.observe(State{0.0, 1.0, 0.5});
  tracker.observe(State{0.1, 0.9, 0.5});
  tracker.observe(State{0.2, 0.8, 0.5});
  CHECK(tracker.max_growth() == 0.0);
  const State err{0.01, -0.02, 0.005};
  for (bool vw : {false, true}) {
    CHECK(l1o_quasinorm(tracker.max_growth(), err, 0.25, vw) ==
          doctest::Approx(l1_norm(err, 0.25, vw)).epsilon(1e-15));
  }
}

TEST_CASE("quasinorm charges the worst range growth once per cell") {
  RangeTracker tracker;
  tracker.observe(State{0.0, 1.0});            // initial range 1
  tracker.observe(State{-0.05, 1.15});         // range 1.2, growth 0.2
  tracker.observe(State{0.0, 1.1});            // range 1.1, growth stays 0.2
  CHECK(tracker.max_growth() == doctest::Approx(0.2).epsilon(1e-14));

  const State err{0.3, -0.1, 0.2, 0.0};
  const double dx = 0.5;
  const double n = 4.0;
  CHECK(l1o_quasinorm(tracker.max_growth(), err, dx) ==
        doctest::Approx(l1_norm(err, dx) + n * 0.2 / dx).epsilon(1e-14));
  CHECK(l1o_quasinorm(tracker.max_growth(), err, dx, true) ==
        doctest::Approx(l1_norm(err, dx, true) + n * 0.2 * dx).epsilon(1e-14));
}

TEST_CASE("quasinorm dominates the plain norm") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> g(0.0, 0.5);
  for (int rep = 0; rep < 20; ++rep) {
    State w(17);
    for (double& v : w) v = u(rng);
    const double growth = g(rng);
    CHECK(l1o_quasinorm(growth, w, 0.1) >= l1_norm(w, 0.1));
  }
}

TEST_CASE("space-time errors on hand trajectories") {
  const std::vector<double> exact{2.0, 2.0, 2.0};
  SpaceTimeError self = spacetime_errors(exact, exact);
  CHECK(self.mean == 0.0);
  CHECK(self.max == 0.0);

  const std::vector<double> num{2.0, 1.5, 1.8};
  SpaceTimeError e = spacetime_errors(exact, num);
  CHECK(e.mean == doctest::Approx(0.7 / 3.0).epsilon(1e-15));
  CHECK(e.max == doctest::Approx(0.5).epsilon(1e-15));

  CHECK_THROWS_AS(spacetime_errors(exact, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("EOC columns follow the log ratio of consecutive errors") {
  std::vector<ErrorRow> rows(2);
  rows[0].n = 50;
  rows[0].l1 = 0.04;
  rows[0].l2 = 0.04;
  rows[1].n = 100;
  rows[1].l1 = 0.01;
  rows[1].l2 = 0.04;
  const auto out = eoc_table(rows, 1);
  CHECK(!out[0].eoc_l1.has_value());
  REQUIRE(out[1].eoc_l1.has_value());
  CHECK(*out[1].eoc_l1 == doctest::Approx(2.0).epsilon(1e-14));
  REQUIRE(out[1].eoc_l2.has_value());
  CHECK(*out[1].eoc_l2 == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("EOC reproduces the published vortex refinement step") {
  std::vector<ErrorRow> rows(2);
  rows[0].n = 1024;
  rows[0].l2 = 0.00861349;
  rows[1].n = 4096;
  rows[1].l2 = 0.00125513;
  const auto out = eoc_table(rows, 2);
  REQUIRE(out[1].eoc_l2.has_value());
  CHECK(*out[1].eoc_l2 == doctest::Approx(2.7788).epsilon(2e-4));
}

TEST_CASE("EOC is skipped off-ratio and on zero errors") {
  std::vector<ErrorRow> rows(3);
  rows[0].n = 50;
  rows[0].l1 = 0.04;
  rows[1].n = 150;  // not a ratio-2 refinement
  rows[1].l1 = 0.01;
  rows[2].n = 300;
  rows[2].l1 = 0.0;  // exact: no EOC defined
  const auto out = eoc_table(rows, 1);
  CHECK(!out[1].eoc_l1.has_value());
  CHECK(!out[2].eoc_l1.has_value());
}

TEST_CASE("CSV table uses 12 significant digits and LF endings") {
  std::vector<ErrorRow> rows(2);
  rows[0].n = 50;
  rows[0].l1 = 0.04;
  rows[0].l2 = 1.0 / 3.0;
  rows[0].linf = 2.0;
  rows[0].l1o = 0.05;
  rows[1] = rows[0];
  rows[1].n = 100;
  rows[1].l1 = 0.01;
  const auto with_eoc = eoc_table(rows, 1);
  const std::string csv = csv_error_table(with_eoc);
  CHECK(csv.find("N,L1,EOC_L1,L2,EOC_L2,Linf,L1o\n") == 0);
  CHECK(csv.find("50,0.04,,0.333333333333,") != std::string::npos);
  CHECK(csv.find("100,0.01,2,") != std::string::npos);
  CHECK(csv.find('\r') == std::string::npos);
  CHECK(csv.back() == '\n');
}
