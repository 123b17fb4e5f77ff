#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "helpers.hpp"

#include "scatterkit/n2_analytic.hpp"
#include "scatterkit/scattering.hpp"

using namespace scatterkit;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Vector2d vec2(double a, double b) { return {a, b}; }

// Energies strictly inside an interval, away from its ends.
std::vector<double> interior_grid(double lo, double hi, int count) {
  std::vector<double> grid;
  for (int i = 1; i < count; ++i) {
    grid.push_back(lo + (hi - lo) * double(i) / count);
  }
  return grid;
}

} // namespace

TEST_SUITE_BEGIN("scattering");

TEST_CASE("beta_sq against the two-channel closed forms") {
  const Model model = make_model(2, 1.3, vec2(-1, -0.5));
  const N2Params p = make_n2_params(-1.0, -0.5, 1.3);
  const int j1 = model.spec.order[0];
  const int j2 = model.spec.order[1];
  CHECK(beta_sq(model, j2, p.lambda1() - 2.0) ==
        doctest::Approx(4.0 * xi_plus(1.3)).epsilon(1e-13));
  CHECK(beta_sq(model, j1, p.lambda2() - 2.0) ==
        doctest::Approx(4.0 * xi_minus(1.3)).epsilon(1e-13));
  CHECK(beta_sq(model, j1, model.spec.lambdas(j1)) ==
        doctest::Approx(2.0).epsilon(1e-14));
  CHECK(beta_sq(model, j1, model.spec.lambdas(j1) + 2.0) == 0.0);
}

TEST_CASE("m_matrix reproduces the closed 2x2 inversion") {
  for (double v1 : {1.0, -1.0}) {
    for (double v2 : {0.5, -0.5}) {
      const Model model = make_model(2, kPi / 2.0, vec2(v1, v2));
      const N2Params p = make_n2_params(v1, v2, kPi / 2.0);
      for (double lambda : {0.0, -1.2, 1.1, -2.5, 2.5}) {
        const Eigen::MatrixXcd vmv =
            model.pot.vhalf.asDiagonal() * m_matrix(model, lambda).m *
            model.pot.vhalf.asDiagonal().toDenseMatrix();
        const Eigen::Matrix2cd expected = vmv_closed(p, lambda);
        CHECK((vmv - expected).cwiseAbs().maxCoeff() < 1e-12);
      }
    }
  }
}

TEST_CASE("m_matrix tends to the sign matrix far below the band") {
  const Model model = make_model(3, 1.0, Eigen::Vector3d(1e-3, -1e-3, 0));
  const Eigen::MatrixXcd m = m_matrix(model, -60.0).m;
  const Eigen::MatrixXcd u =
      model.pot.u.asDiagonal().toDenseMatrix().cast<Complex>();
  CHECK((m - u).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("m_matrix rejects thresholds") {
  const Model model = make_model(2, 1.0, vec2(1, 0));
  CHECK_THROWS_AS(m_matrix(model, model.spec.thresholds(1)), ThresholdEnergy);
}

TEST_CASE("rho = 0 keeps the middle-interval denominator large") {
  const Model model = make_model(2, 1.7, vec2(1, -1));
  const N2Params p = make_n2_params(1.0, -1.0, 1.7);
  for (double lambda :
       interior_grid(p.lambda2() - 2.0, p.lambda1() + 2.0, 64)) {
    const double b1b2 = beta1_sq(p, lambda) * beta2_sq(p, lambda);
    CHECK(std::abs(q_value(p, lambda)) * 2.0 * b1b2 >= 2.0 - 1e-9);
    CHECK_NOTHROW(m_matrix(model, lambda));
  }
}

TEST_CASE("b = 0 kills site-two coupling and leaves a rank-one scatterer") {
  // v^{1/2} annihilates the second site, so the site-basis matrix vMv is
  // supported on the (1,1) entry alone and S - I has rank one.  The channel
  // off-diagonals do not vanish: each flux eigenvector overlaps site one.
  const Model model = make_model(2, kPi / 2.0, vec2(-1, 0));
  for (double lambda : interior_grid(model.spec.thresholds(1) + 1e-3,
                                     model.spec.thresholds(2) - 1e-3, 32)) {
    const Eigen::MatrixXcd vmv =
        model.pot.vhalf.asDiagonal() * m_matrix(model, lambda).m *
        model.pot.vhalf.asDiagonal().toDenseMatrix();
    CHECK(std::abs(vmv(0, 1)) < 1e-14);
    CHECK(std::abs(vmv(1, 0)) < 1e-14);
    CHECK(std::abs(vmv(1, 1)) < 1e-14);

    const FiberMatrix fiber = s_fiber(model, lambda);
    REQUIRE(fiber.channels.multiplicity() == 2);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
        fiber.s - Eigen::MatrixXcd::Identity(2, 2));
    CHECK(svd.singularValues()(1) < 1e-12);
    // Unitarity fixes the off-diagonal weight from the diagonal one.
    const double coupling = 1.0 - std::norm(fiber.s(0, 0));
    CHECK(std::norm(fiber.s(0, 1)) == doctest::Approx(coupling).epsilon(1e-9));
    CHECK(std::abs(fiber.s(0, 1)) == doctest::Approx(std::abs(fiber.s(1, 0)))
                                         .epsilon(1e-10));
  }
}

TEST_CASE("fiber entries match the closed forms on all branches") {
  std::mt19937 rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const ModelParams raw = sktest::random_params(rng, 2);
    const Model model = make_model(raw);
    const N2Params p = make_n2_params(raw.v(0), raw.v(1), raw.theta);
    const int j1 = model.spec.order[0];
    const int j2 = model.spec.order[1];
    const double l1 = p.lambda1(), l2 = p.lambda2();

    for (double lambda : interior_grid(l1 - 2.0 + 1e-4, l2 - 2.0 - 1e-4, 24)) {
      const FiberMatrix fiber = s_fiber(model, lambda);
      CHECK(std::abs(fiber.entry(j1) - s11_closed(p, lambda)) < 1e-10);
    }
    for (double lambda : interior_grid(l2 - 2.0 + 1e-4, l1 + 2.0 - 1e-4, 24)) {
      const FiberMatrix fiber = s_fiber(model, lambda);
      CHECK(std::abs(fiber.entry(j1) - s11_closed(p, lambda)) < 1e-10);
      CHECK(std::abs(fiber.entry(j2) - s22_closed(p, lambda)) < 1e-10);
      CHECK(std::abs(det_s(model, lambda) - det_s_closed(p, lambda)) < 1e-10);
    }
    for (double lambda : interior_grid(l1 + 2.0 + 1e-4, l2 + 2.0 - 1e-4, 24)) {
      const FiberMatrix fiber = s_fiber(model, lambda);
      CHECK(std::abs(fiber.entry(j2) - s22_closed(p, lambda)) < 1e-10);
    }
  }
}

TEST_CASE("reference middle-interval entry at lambda = 0") {
  // a^2 = 1, b^2 = 1/2, u1 = u2 = -1 at theta = pi/2; the closed middle
  // branch is the independent oracle for the generic path.
  const Model model = make_model(2, kPi / 2.0, vec2(-1, -0.5));
  const N2Params p = make_n2_params(-1.0, -0.5, kPi / 2.0);
  const FiberMatrix fiber = s_fiber(model, 0.0);
  CHECK(std::abs(fiber.entry(model.spec.order[0]) - s11_closed(p, 0.0)) <
        1e-10);
}

TEST_CASE("tiny potential scatters trivially") {
  const Model model = make_model(2, 1.1, vec2(1e-8, 0));
  for (double lambda : {-1.5, 0.0, 1.5}) {
    const FiberMatrix fiber = s_fiber(model, lambda);
    const int m = fiber.channels.multiplicity();
    CHECK((fiber.s - Eigen::MatrixXcd::Identity(m, m)).cwiseAbs().maxCoeff() <
          1e-6);
  }
}

TEST_CASE("unitarity and determinant modulus on random samples") {
  std::mt19937 rng(43);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + int(rng() % 3);
    const ModelParams raw = sktest::random_params(rng, n);
    const Model model = make_model(raw);
    const double lambda = sktest::random_inband_lambda(rng, model.spec);
    const FiberMatrix fiber = s_fiber(model, lambda);
    const int m = fiber.channels.multiplicity();
    REQUIRE(m > 0);
    CHECK((fiber.s * fiber.s.adjoint() - Eigen::MatrixXcd::Identity(m, m))
              .cwiseAbs()
              .maxCoeff() < 1e-8);
    CHECK(std::abs(std::abs(fiber.s.determinant()) - 1.0) < 1e-8);
  }
}

TEST_CASE("det reduces to the single diagonal entry below the embedded threshold") {
  const Model model = make_model(2, 1.4, vec2(-2, 1));
  const double lambda = 0.5 * (model.spec.thresholds(0) + model.spec.thresholds(1));
  const FiberMatrix fiber = s_fiber(model, lambda);
  REQUIRE(fiber.channels.multiplicity() == 1);
  CHECK(std::abs(det_s(model, lambda) - fiber.s(0, 0)) == 0.0);
}

TEST_CASE("a = b keeps det S pinned at one on the middle interval") {
  const Model model = make_model(2, 1.9, vec2(1, -1));
  for (double lambda : interior_grid(model.spec.thresholds(1) + 1e-3,
                                     model.spec.thresholds(2) - 1e-3, 40)) {
    CHECK(std::abs(det_s(model, lambda) - 1.0) < 1e-12);
  }
}

TEST_CASE("threshold limits: generic channels close at -1") {
  std::mt19937 rng(47);
  for (int trial = 0; trial < 8; ++trial) {
    const ModelParams raw = sktest::random_params(rng, 2);
    const Model model = make_model(raw);
    const int j1 = model.spec.order[0];
    const int j2 = model.spec.order[1];
    const double l1 = model.spec.lambdas(j1);
    const double l2 = model.spec.lambdas(j2);
    CHECK(threshold_limit(model, l2 - 2.0, Side::above, j2) == -1);
    CHECK(threshold_limit(model, l1 + 2.0, Side::below, j1) == -1);
    CHECK(threshold_limit(model, l1 - 2.0, Side::above, j1) == -1);
    CHECK(threshold_limit(model, l2 + 2.0, Side::below, j2) == -1);
  }
}

TEST_CASE("resonant bottom threshold flips to +1") {
  const double theta0 = resonant_family_theta0();
  const Model model = make_model(2, theta0, vec2(-1, -0.5));
  const int j1 = model.spec.order[0];
  const ThresholdLadder ladder = threshold_limit_ladder(
      model, model.spec.lambdas(j1) - 2.0, Side::above, j1);
  CHECK(ladder.sign == +1);
  CHECK(std::abs(ladder.last().imag()) < 1e-3);
  // The other three thresholds stay generic.
  const int j2 = model.spec.order[1];
  CHECK(threshold_limit(model, model.spec.lambdas(j2) - 2.0, Side::above, j2) == -1);
  CHECK(threshold_limit(model, model.spec.lambdas(j1) + 2.0, Side::below, j1) == -1);
  CHECK(threshold_limit(model, model.spec.lambdas(j2) + 2.0, Side::below, j2) == -1);
}

TEST_CASE("ladder converges at the sqrt(eps) rate") {
  const Model model = make_model(2, 1.2, vec2(-1, 0.4));
  const int j2 = model.spec.order[1];
  const ThresholdLadder ladder = threshold_limit_ladder(
      model, model.spec.lambdas(j2) + 2.0, Side::below, j2);
  REQUIRE(ladder.values.size() >= 6);
  const std::size_t last = ladder.values.size() - 1;
  // |Im| decays and successive rungs shrink roughly by the ladder ratio 2.
  const double im_a = std::abs(ladder.values[last - 2].imag());
  const double im_b = std::abs(ladder.values[last - 1].imag());
  const double im_c = std::abs(ladder.values[last].imag());
  CHECK(im_b < im_a);
  CHECK(im_c < im_b);
  CHECK(im_b / im_a == doctest::Approx(0.5).epsilon(0.2));
  CHECK(im_c / im_b == doctest::Approx(0.5).epsilon(0.2));
  CHECK(std::abs(ladder.last().real() + 1.0) < 1e-3);
}

TEST_CASE("resonant-family z value at the embedded threshold") {
  // On the third interval s22 starts at z = (6 Xi_minus + i)/(6 Xi_minus - i).
  for (double theta : {2.0, 2.6, resonant_family_theta0()}) {
    const Model model = make_model(2, theta, vec2(-1, -0.5));
    const int j1 = model.spec.order[0];
    const int j2 = model.spec.order[1];
    const double tau = model.spec.lambdas(j1) + 2.0;
    const Complex z = Complex(6.0 * xi_minus(theta), 1.0) /
                      Complex(6.0 * xi_minus(theta), -1.0);
    const Complex s22 = s_fiber(model, tau + 1e-8).entry(j2);
    CHECK(std::abs(s22 - z) < 1e-3);
  }
}

TEST_SUITE_END();
