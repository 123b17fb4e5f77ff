#include "scatterkit/n2_analytic.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace scatterkit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Complex kI{0.0, 1.0};
const double kXiPlusSup = std::sqrt(2.0);

// Boundary-value coefficients (c1, c2) by interval position of lambda.
std::pair<Complex, Complex> n2_coefficients(const N2Params& p, double lambda) {
  const double l1 = p.lambda1();
  const double l2 = p.lambda2();
  const Complex c1 = (lambda < l1 - 2.0) ? Complex(1.0)
                     : (lambda < l1 + 2.0) ? kI
                                           : Complex(-1.0);
  const Complex c2 = (lambda < l2 - 2.0) ? Complex(1.0)
                     : (lambda < l2 + 2.0) ? kI
                                           : Complex(-1.0);
  return {c1, c2};
}

[[noreturn]] void out_of_branch(const char* what, double lambda) {
  std::ostringstream msg;
  msg << what << " has no closed-form branch at lambda = " << lambda;
  throw OutOfBranch(msg.str());
}

} // namespace

N2Params make_n2_params(double v1, double v2, double theta) {
  if (v1 == v2) {
    throw InvalidParams("two-channel potential must not be 1-periodic");
  }
  if (std::abs(v1) < std::abs(v2)) std::swap(v1, v2);
  N2Params p;
  p.u1 = (v1 < 0.0) ? -1 : 1;
  p.u2 = (v2 < 0.0) ? -1 : 1;
  p.a = std::sqrt(std::abs(v1));
  p.b = std::sqrt(std::abs(v2));
  p.theta = theta;
  if (p.a <= 0.0) throw InvalidParams("two-channel potential must be nonzero");
  if (!(theta > 0.0 && theta < kPi)) {
    throw InvalidParams("flux theta must lie in (0, pi)");
  }
  return p;
}

Model to_model(const N2Params& p) {
  return make_model(2, p.theta, p.v());
}

double xi_plus(double theta) {
  const double c = std::cos(theta / 2.0);
  return std::sqrt(c + c * c);
}

double xi_minus(double theta) {
  const double c = std::cos(theta / 2.0);
  return std::sqrt(c - c * c);
}

double xi_plus_inverse(double target) {
  if (!(target > 0.0 && target < kXiPlusSup)) {
    std::ostringstream msg;
    msg << "xi_plus target " << target << " outside (0, sqrt(2))";
    throw InvalidParams(msg.str());
  }
  // xi_plus is strictly decreasing, so plain bisection is safe.
  double lo = 1e-12, hi = kPi - 1e-12;
  while (hi - lo > 1e-14) {
    const double mid = 0.5 * (lo + hi);
    if (xi_plus(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double beta1_sq(const N2Params& p, double lambda) {
  const double d = lambda - p.lambda1();
  return std::sqrt(std::abs(d * d - 4.0));
}

double beta2_sq(const N2Params& p, double lambda) {
  const double d = lambda - p.lambda2();
  return std::sqrt(std::abs(d * d - 4.0));
}

ABCoefficients ab_coefficients(const N2Params& p, double lambda) {
  const double b1sq = beta1_sq(p, lambda);
  const double b2sq = beta2_sq(p, lambda);
  const double rho = p.rho();
  const double uu = p.u1 * p.u2;
  const double ab2 = p.a * p.a * p.b * p.b;
  ABCoefficients c{};
  c.a1 = b1sq * (2.0 * uu * b2sq + rho);
  c.b1 = 2.0 * ab2 + rho * b2sq;
  c.a2 = 2.0 * uu * b1sq * b2sq - 2.0 * ab2;
  c.b2 = rho * (b1sq + b2sq);
  c.a3 = b2sq * (2.0 * uu * b1sq - rho);
  c.b3 = -2.0 * ab2 + rho * b1sq;
  return c;
}

Complex s11_closed(const N2Params& p, double lambda) {
  const double l1 = p.lambda1();
  const double l2 = p.lambda2();
  const ABCoefficients c = ab_coefficients(p, lambda);
  const double ab2 = p.a * p.a * p.b * p.b;
  if (lambda > l1 - 2.0 && lambda < l2 - 2.0) {
    return Complex(c.a1, -c.b1) / Complex(c.a1, c.b1);
  }
  if (lambda > l2 - 2.0 && lambda < l1 + 2.0) {
    const double b2sq = beta2_sq(p, lambda);
    return 1.0 + Complex(4.0 * ab2, -2.0 * p.rho() * b2sq) / Complex(c.a2, c.b2);
  }
  out_of_branch("s11", lambda);
}

Complex s22_closed(const N2Params& p, double lambda) {
  const double l1 = p.lambda1();
  const double l2 = p.lambda2();
  const ABCoefficients c = ab_coefficients(p, lambda);
  const double ab2 = p.a * p.a * p.b * p.b;
  if (lambda > l2 - 2.0 && lambda < l1 + 2.0) {
    const double b1sq = beta1_sq(p, lambda);
    return 1.0 + Complex(4.0 * ab2, -2.0 * p.rho() * b1sq) / Complex(c.a2, c.b2);
  }
  if (lambda > l1 + 2.0 && lambda < l2 + 2.0) {
    return Complex(c.a3, -c.b3) / Complex(c.a3, c.b3);
  }
  out_of_branch("s22", lambda);
}

Complex det_s_closed(const N2Params& p, double lambda) {
  const double l1 = p.lambda1();
  const double l2 = p.lambda2();
  if (lambda > l1 - 2.0 && lambda < l2 - 2.0) return s11_closed(p, lambda);
  if (lambda > l2 - 2.0 && lambda < l1 + 2.0) {
    // s22/conj(s11) written in the pole-free form (A2-iB2)/(A2+iB2).
    const ABCoefficients c = ab_coefficients(p, lambda);
    return Complex(c.a2, -c.b2) / Complex(c.a2, c.b2);
  }
  if (lambda > l1 + 2.0 && lambda < l2 + 2.0) return s22_closed(p, lambda);
  out_of_branch("det S", lambda);
}

Complex q_value(const N2Params& p, double lambda) {
  const auto [c1, c2] = n2_coefficients(p, lambda);
  const double b1sq = beta1_sq(p, lambda);
  const double b2sq = beta2_sq(p, lambda);
  const double rho = p.rho();
  const double uu = p.u1 * p.u2;
  const double ab2 = p.a * p.a * p.b * p.b;
  const Complex num = 2.0 * uu * b1sq * b2sq + (c1 * b2sq + c2 * b1sq) * rho +
                      2.0 * ab2 * c1 * c2;
  return num / (2.0 * b1sq * b2sq);
}

Eigen::Matrix2cd vmv_closed(const N2Params& p, double lambda) {
  const auto [c1, c2] = n2_coefficients(p, lambda);
  const double b1sq = beta1_sq(p, lambda);
  const double b2sq = beta2_sq(p, lambda);
  const double a2 = p.a * p.a;
  const double b2 = p.b * p.b;
  const double ab2 = a2 * b2;
  const Complex tplus = c1 / b1sq + c2 / b2sq;
  const Complex tminus = c1 / b1sq - c2 / b2sq;
  const Complex phase = std::polar(1.0, p.theta / 2.0);

  Eigen::Matrix2cd m;
  m(0, 0) = p.u2 * a2 + 0.5 * ab2 * tplus;
  m(0, 1) = 0.5 * ab2 * tminus / phase;
  m(1, 0) = 0.5 * ab2 * tminus * phase;
  m(1, 1) = p.u1 * b2 + 0.5 * ab2 * tplus;
  return m / q_value(p, lambda);
}

namespace {

std::optional<double> resonance_theta(double v1, double v2, int side) {
  if (v1 == v2 || (v1 == 0.0 && v2 == 0.0)) return std::nullopt;
  N2Params p = make_n2_params(v1, v2, kPi / 2.0);
  const double rho = p.rho();
  const double ab2 = p.a * p.a * p.b * p.b;
  if (ab2 == 0.0 || rho * side >= 0.0) return std::nullopt;
  const double target = ab2 / (-2.0 * side * rho);
  if (!(target > 0.0 && target < kXiPlusSup)) return std::nullopt;
  return xi_plus_inverse(target);
}

} // namespace

std::optional<double> resonance_theta_bottom(double v1, double v2) {
  // 2*rho*Xi_plus(theta0) + a^2 b^2 = 0 needs rho < 0.
  return resonance_theta(v1, v2, +1);
}

std::optional<double> resonance_theta_top(double v1, double v2) {
  // 2*rho*Xi_plus(theta0) - a^2 b^2 = 0 needs rho > 0.
  return resonance_theta(v1, v2, -1);
}

double resonant_family_theta0() {
  return xi_plus_inverse(1.0 / 6.0);
}

WorkedExpectation worked_example(WorkedCase which, double theta) {
  WorkedExpectation e{};
  switch (which) {
    case WorkedCase::b0: {
      e.params = N2Params{-1, 1, 1.0, 0.0, theta};
      e.interval_vars = {-0.5, 0.0, -0.5};
      e.threshold_signs = {-1, -1, -1, -1};
      e.count = 1;
      return e;
    }
    case WorkedCase::a_eq_b: {
      e.params = N2Params{1, -1, 1.0, 1.0, theta};
      e.interval_vars = {0.0, 0.0, 0.0};
      e.threshold_signs = {-1, -1, -1, -1};
      e.count = 2;
      return e;
    }
    case WorkedCase::resonant: {
      e.params = N2Params{-1, -1, 1.0, std::sqrt(0.5), theta};
      const double theta0 = resonant_family_theta0();
      const Complex z =
          Complex(6.0 * xi_minus(theta), 1.0) / Complex(6.0 * xi_minus(theta), -1.0);
      const double argz = std::arg(z) / (2.0 * kPi);
      if (std::abs(theta - theta0) < 1e-9) {
        e.interval_vars = {-argz, 0.0, -0.5 + argz};
        e.threshold_signs = {+1, -1, -1, -1};
        e.count = 1;
      } else if (theta < theta0) {
        e.interval_vars = {-0.5 - argz, 0.0, -0.5 + argz};
        e.threshold_signs = {-1, -1, -1, -1};
        e.count = 1;
      } else {
        e.interval_vars = {0.5 - argz, 0.0, -0.5 + argz};
        e.threshold_signs = {-1, -1, -1, -1};
        e.count = 2;
      }
      return e;
    }
  }
  throw InvalidParams("unknown worked case");
}

} // namespace scatterkit
