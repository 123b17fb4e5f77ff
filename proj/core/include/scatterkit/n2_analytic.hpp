#pragma once

#include <array>
#include <complex>
#include <optional>

#include <Eigen/Dense>

#include "scatterkit/model.hpp"

namespace scatterkit {

/// Two-channel parameters in the sign/magnitude form v(1) = u1*a^2,
/// v(2) = u2*b^2 with a >= b >= 0, a > 0, and the derived combination
/// rho = u2*a^2 + u1*b^2.
struct N2Params {
  int u1 = 1;
  int u2 = 1;
  double a = 1.0;
  double b = 0.0;
  double theta = 1.0;

  double rho() const { return u2 * a * a + u1 * b * b; }
  double lambda1() const { return -2.0 * std::cos(theta / 2.0); }
  double lambda2() const { return 2.0 * std::cos(theta / 2.0); }
  Eigen::Vector2d v() const { return {u1 * a * a, u2 * b * b}; }
};

/// Builds N2Params from raw potential values, swapping the two sites if
/// needed so that a >= b (the two orderings describe the same ring up to a
/// relabelling). Throws InvalidParams for a 1-periodic or zero potential.
N2Params make_n2_params(double v1, double v2, double theta);

Model to_model(const N2Params& p);

/// Xi_plus(theta) = sqrt(cos(theta/2) + cos^2(theta/2)), strictly decreasing
/// on (0,pi) with range (0, sqrt(2)).
double xi_plus(double theta);

/// Xi_minus(theta) = sqrt(cos(theta/2) - cos^2(theta/2)).
double xi_minus(double theta);

/// Unique theta in (0,pi) with xi_plus(theta) == target, by bisection.
/// Requires target in (0, sqrt(2)).
double xi_plus_inverse(double target);

double beta1_sq(const N2Params& p, double lambda);
double beta2_sq(const N2Params& p, double lambda);

/// Real pairs (A_k, B_k) entering the closed-form scattering entries:
///   A1 = b1sq*(2*u1*u2*b2sq + rho),        B1 = 2a^2b^2 + rho*b2sq,
///   A2 = 2*u1*u2*b1sq*b2sq - 2a^2b^2,      B2 = rho*(b1sq + b2sq),
///   A3 = b2sq*(2*u1*u2*b1sq - rho),        B3 = -2a^2b^2 + rho*b1sq.
struct ABCoefficients {
  double a1, b1, a2, b2, a3, b3;
};

ABCoefficients ab_coefficients(const N2Params& p, double lambda);

/// Closed-form s11: (A1-iB1)/(A1+iB1) on (lambda1-2, lambda2-2) and
/// 1 + (4a^2b^2 - 2i*rho*b2sq)/(A2+iB2) on (lambda2-2, lambda1+2).
/// Unit modulus on the single-channel branch; |s11| <= 1 on the middle one,
/// where the channels couple.  Throws OutOfBranch outside those intervals.
Complex s11_closed(const N2Params& p, double lambda);

/// Closed-form s22: 1 + (4a^2b^2 - 2i*rho*b1sq)/(A2+iB2) on the middle
/// interval and (A3-iB3)/(A3+iB3) on (lambda1+2, lambda2+2).
Complex s22_closed(const N2Params& p, double lambda);

/// Closed-form det S: s11, (A2-iB2)/(A2+iB2), s22 on the three intervals.
Complex det_s_closed(const N2Params& p, double lambda);

/// Denominator Q of the inverted boundary-value matrix; nonzero in-band for
/// admissible parameters (no embedded eigenvalues).
Complex q_value(const N2Params& p, double lambda);

/// Closed form of vhalf * M(lambda+i0) * vhalf for cross-checking the generic
/// inversion path.
Eigen::Matrix2cd vmv_closed(const N2Params& p, double lambda);

/// Flux solving the bottom-threshold resonance condition
/// 2*rho*Xi_plus(theta) + a^2 b^2 = 0, when one exists (rho < 0 and the
/// target lies in the range of Xi_plus).
std::optional<double> resonance_theta_bottom(double v1, double v2);

/// Mirror condition 2*rho*Xi_plus(theta) - a^2 b^2 = 0 at the top threshold.
std::optional<double> resonance_theta_top(double v1, double v2);

enum class WorkedCase { b0, a_eq_b, resonant };

/// Expected winding data for the three fully worked two-channel families.
/// interval_vars lists the variation of arg det S (clockwise-counted, in
/// turns) on the three inter-threshold intervals; threshold_signs are the
/// one-sided limits of s11/s22 at (lambda1-2, lambda2-2, lambda1+2,
/// lambda2+2); count is the bound-state total.
struct WorkedExpectation {
  N2Params params;
  std::array<double, 3> interval_vars;
  std::array<int, 4> threshold_signs;
  int count = 0;
};

WorkedExpectation worked_example(WorkedCase which, double theta);

/// theta0 of the resonant family (a^2=1, b^2=1/2, u1=u2=-1), defined by
/// Xi_plus(theta0) = 1/6.
double resonant_family_theta0();

} // namespace scatterkit
