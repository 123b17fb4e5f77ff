#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "helpers.hpp"

#include "scatterkit/n2_analytic.hpp"

using namespace scatterkit;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_SUITE_BEGIN("n2_analytic");

TEST_CASE("xi_plus values and limits") {
  // Direct evaluation: sqrt(cos(pi/4) + cos^2(pi/4)) = sqrt(sqrt(2)/2 + 1/2).
  CHECK(xi_plus(kPi / 2.0) ==
        doctest::Approx(1.0986841134678098).epsilon(1e-14));
  CHECK(xi_plus(1e-9) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  CHECK(xi_plus(kPi - 1e-7) == doctest::Approx(0.0).epsilon(1e-3));
  CHECK(xi_minus(kPi / 2.0) ==
        doctest::Approx(std::sqrt(std::sqrt(0.5) - 0.5)).epsilon(1e-14));
}

TEST_CASE("xi_plus is strictly decreasing") {
  double prev = xi_plus(1e-4);
  for (int i = 1; i <= 1000; ++i) {
    const double theta = 1e-4 + (kPi - 2e-4) * i / 1000.0;
    const double value = xi_plus(theta);
    CHECK(value < prev);
    prev = value;
  }
}

TEST_CASE("xi_plus_inverse hits its target") {
  for (double target : {0.05, 1.0 / 6.0, 0.5, 1.0, 1.3, 1.41}) {
    const double theta = xi_plus_inverse(target);
    CHECK(xi_plus(theta) == doctest::Approx(target).epsilon(1e-12));
  }
  CHECK_THROWS_AS(xi_plus_inverse(1.5), InvalidParams);
  CHECK_THROWS_AS(xi_plus_inverse(0.0), InvalidParams);
  // The resonant-family flux is pinned by Xi_plus(theta0) = 1/6.
  CHECK(std::abs(xi_plus(resonant_family_theta0()) - 1.0 / 6.0) < 1e-12);
}

TEST_CASE("beta squares at the distinguished points") {
  for (double theta : {0.4, kPi / 2.0, 2.8}) {
    const N2Params p = make_n2_params(-1.0, -0.5, theta);
    CHECK(beta2_sq(p, p.lambda1() - 2.0) ==
          doctest::Approx(4.0 * xi_plus(theta)).epsilon(1e-13));
    CHECK(beta1_sq(p, p.lambda2() - 2.0) ==
          doctest::Approx(4.0 * xi_minus(theta)).epsilon(1e-13));
    CHECK(beta1_sq(p, p.lambda2() + 2.0) ==
          doctest::Approx(4.0 * xi_plus(theta)).epsilon(1e-13));
    CHECK(beta2_sq(p, p.lambda1() + 2.0) ==
          doctest::Approx(4.0 * xi_minus(theta)).epsilon(1e-13));
    // |0 - 4|^{1/2} = 2 at the channel's own eigenvalue.
    CHECK(beta1_sq(p, p.lambda1()) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(beta2_sq(p, p.lambda2()) == doctest::Approx(2.0).epsilon(1e-14));
  }
}

TEST_CASE("make_n2_params normalises the site order") {
  const N2Params p = make_n2_params(-0.5, 2.0, 1.0);
  CHECK(p.a == doctest::Approx(std::sqrt(2.0)));
  CHECK(p.b == doctest::Approx(std::sqrt(0.5)));
  CHECK(p.u1 == 1);
  CHECK(p.u2 == -1);
  CHECK(p.rho() == doctest::Approx(-2.0 + 0.5));
  CHECK_THROWS_AS(make_n2_params(1.0, 1.0, 1.0), InvalidParams);
  CHECK_THROWS_AS(make_n2_params(1.0, 0.5, 0.0), InvalidParams);
}

TEST_CASE("closed-form moduli and branch guards") {
  // Single-channel branches carry unit-modulus diagonal entries; on the
  // two-channel middle branch the diagonal entries drop below one whenever
  // the channels couple, and only det S keeps unit modulus.
  std::mt19937 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const ModelParams raw = sktest::random_params(rng, 2);
    const N2Params p = make_n2_params(raw.v(0), raw.v(1), raw.theta);
    const double l1 = p.lambda1(), l2 = p.lambda2();
    for (double frac : {0.13, 0.5, 0.87}) {
      const double lam1 = l1 - 2.0 + frac * ((l2 - 2.0) - (l1 - 2.0));
      const double lam2 = (l2 - 2.0) + frac * ((l1 + 2.0) - (l2 - 2.0));
      const double lam3 = (l1 + 2.0) + frac * ((l2 + 2.0) - (l1 + 2.0));
      CHECK(std::abs(std::abs(s11_closed(p, lam1)) - 1.0) < 1e-12);
      CHECK(std::abs(s11_closed(p, lam2)) < 1.0 + 1e-12);
      CHECK(std::abs(s22_closed(p, lam2)) < 1.0 + 1e-12);
      // Unitarity ties the two diagonal moduli together on the middle branch.
      CHECK(std::abs(s11_closed(p, lam2)) ==
            doctest::Approx(std::abs(s22_closed(p, lam2))).epsilon(1e-10));
      CHECK(std::abs(std::abs(s22_closed(p, lam3)) - 1.0) < 1e-12);
      CHECK(std::abs(std::abs(det_s_closed(p, lam2)) - 1.0) < 1e-12);
    }
    CHECK_THROWS_AS(s11_closed(p, l1 + 2.5), OutOfBranch);
    CHECK_THROWS_AS(s22_closed(p, l1 - 3.0), OutOfBranch);
    CHECK_THROWS_AS(det_s_closed(p, l2 + 2.5), OutOfBranch);
  }
}

TEST_CASE("middle-interval det equals s22/conj(s11)") {
  const N2Params p = make_n2_params(-1.0, 0.5, 1.1);
  const double l1 = p.lambda1(), l2 = p.lambda2();
  for (double frac : {0.1, 0.35, 0.62, 0.9}) {
    const double lam = (l2 - 2.0) + frac * ((l1 + 2.0) - (l2 - 2.0));
    const Complex ratio = s22_closed(p, lam) / std::conj(s11_closed(p, lam));
    CHECK(std::abs(ratio - det_s_closed(p, lam)) < 1e-12);
  }
}

TEST_CASE("Q stays away from zero; rho=0 bound on the middle interval") {
  // a = b with opposite signs gives rho = 0 and numerator A2 = -2 b1^2 b2^2
  // - 2a^4, so |2 b1^2 b2^2 Q| >= 2a^4 everywhere on the middle interval.
  const N2Params p{1, -1, 1.0, 1.0, 1.7};
  const double a4 = 1.0;
  const double lo = p.lambda2() - 2.0, hi = p.lambda1() + 2.0;
  for (int i = 1; i < 400; ++i) {
    const double lam = lo + (hi - lo) * i / 400.0;
    const double b1b2 = beta1_sq(p, lam) * beta2_sq(p, lam);
    const Complex q = q_value(p, lam);
    CHECK(std::abs(q) * 2.0 * b1b2 >= 2.0 * a4 - 1e-9);
    CHECK(std::abs(q) > 0.0);
  }
}

TEST_CASE("Q nonvanishing on a random in-band scan") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const ModelParams raw = sktest::random_params(rng, 2);
    const N2Params p = make_n2_params(raw.v(0), raw.v(1), raw.theta);
    const double lo = p.lambda1() - 2.0, hi = p.lambda2() + 2.0;
    double min_q = 1e300;
    for (int i = 1; i < 1000; ++i) {
      const double lam = lo + (hi - lo) * i / 1000.0;
      if (std::abs(lam - (p.lambda2() - 2.0)) < 1e-9) continue;
      if (std::abs(lam - (p.lambda1() + 2.0)) < 1e-9) continue;
      min_q = std::min(min_q, std::abs(q_value(p, lam)));
    }
    CHECK(min_q > 1e-10);
  }
}

TEST_CASE("s11 middle-interval zero sits at lambda = 0 and det passes through") {
  // s11 vanishes on the middle interval iff beta1^2 beta2^2 = a^2 b^2 with
  // u1 u2 = -1 (for rho != 0 that forces lambda = 0); arrange it by picking
  // theta with 2 sin(theta/2) = ab.
  const double a = 1.2, b = 1.0;
  const double theta = 2.0 * std::asin(a * b / 2.0);
  const N2Params p{1, -1, a, b, theta};
  REQUIRE(p.rho() != 0.0);
  CHECK(std::abs(s11_closed(p, 0.0)) < 1e-12);
  // det S is continuous through the s11 zero.
  const Complex left = det_s_closed(p, -1e-7);
  const Complex right = det_s_closed(p, 1e-7);
  CHECK(std::abs(left - right) < 1e-5);
  CHECK(std::abs(std::abs(det_s_closed(p, 0.0)) - 1.0) < 1e-12);
}

TEST_CASE("middle-interval coefficients never vanish together") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const ModelParams raw = sktest::random_params(rng, 2);
    const N2Params p = make_n2_params(raw.v(0), raw.v(1), raw.theta);
    const double lo = p.lambda2() - 2.0, hi = p.lambda1() + 2.0;
    for (int i = 1; i < 200; ++i) {
      const ABCoefficients c = ab_coefficients(p, lo + (hi - lo) * i / 200.0);
      CHECK(c.a2 * c.a2 + c.b2 * c.b2 > 0.0);
    }
  }
}

TEST_CASE("bottom resonance flux for the reference family") {
  const auto theta0 = resonance_theta_bottom(-1.0, -0.5);
  REQUIRE(theta0.has_value());
  // rho = -3/2, so the defining condition reads Xi_plus(theta0) = 1/6.
  CHECK(xi_plus(*theta0) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(*theta0 == doctest::Approx(resonant_family_theta0()).epsilon(1e-12));
}

TEST_CASE("resonance existence by sign pattern") {
  CHECK_FALSE(resonance_theta_bottom(1.0, 0.5).has_value());  // rho > 0
  CHECK_FALSE(resonance_theta_bottom(-1.0, 0.0).has_value()); // b = 0
  CHECK_FALSE(resonance_theta_top(-1.0, -0.5).has_value());   // rho < 0
  CHECK_FALSE(resonance_theta_top(0.0, 0.0).has_value());
  // rho = 0 solves neither condition.
  CHECK_FALSE(resonance_theta_bottom(1.0, -1.0).has_value());
  CHECK_FALSE(resonance_theta_top(1.0, -1.0).has_value());

  // Negating both coordinates turns a bottom resonance into a top one.
  const auto bottom = resonance_theta_bottom(-2.0, -0.7);
  const auto top = resonance_theta_top(2.0, 0.7);
  REQUIRE(bottom.has_value());
  REQUIRE(top.has_value());
  CHECK(*bottom == doctest::Approx(*top).epsilon(1e-12));
  CHECK_FALSE(resonance_theta_top(-2.0, -0.7).has_value());
  CHECK_FALSE(resonance_theta_bottom(2.0, 0.7).has_value());
}

TEST_CASE("worked-example expectations") {
  const WorkedExpectation b0 = worked_example(WorkedCase::b0, 1.0);
  CHECK(b0.interval_vars == std::array<double, 3>{-0.5, 0.0, -0.5});
  CHECK(b0.count == 1);

  const WorkedExpectation ab = worked_example(WorkedCase::a_eq_b, 2.0);
  CHECK(ab.interval_vars == std::array<double, 3>{0.0, 0.0, 0.0});
  CHECK(ab.count == 2);

  const double theta0 = resonant_family_theta0();
  const WorkedExpectation below = worked_example(WorkedCase::resonant, theta0 - 0.2);
  const WorkedExpectation at = worked_example(WorkedCase::resonant, theta0);
  const WorkedExpectation above =
      worked_example(WorkedCase::resonant, theta0 + 0.5 * (kPi - theta0));
  CHECK(below.count == 1);
  CHECK(at.count == 1);
  CHECK(above.count == 2);
  CHECK(at.threshold_signs == std::array<int, 4>{1, -1, -1, -1});
  // The Arg(z) terms cancel between the first and third intervals.
  CHECK(below.interval_vars[0] + below.interval_vars[2] ==
        doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(at.interval_vars[0] + at.interval_vars[2] ==
        doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(above.interval_vars[0] + above.interval_vars[2] ==
        doctest::Approx(0.0).epsilon(1e-12));
  // z has argument in (0, pi), so each var fragment is nontrivial.
  CHECK(below.interval_vars[0] < -0.5);
  CHECK(above.interval_vars[0] > 0.0);
}

TEST_SUITE_END();
