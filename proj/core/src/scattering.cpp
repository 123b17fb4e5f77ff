#include "scatterkit/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace scatterkit {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kCondLimit = 1e12;
constexpr double kLadderEps0 = 1e-2;
constexpr int kLadderRungs = 13;

Complex channel_coefficient(double lambda, double lambda_j) {
  if (lambda < lambda_j - 2.0) return Complex(1.0);
  if (lambda > lambda_j + 2.0) return Complex(-1.0);
  return kI;
}

} // namespace

double beta_sq(const Model& model, int j, double lambda) {
  const double d = lambda - model.spec.lambdas(j);
  return std::sqrt(std::abs(d * d - 4.0));
}

namespace {

// u + sum_j c_j vP_jv / beta_j^2, the matrix whose inverse is M(lambda+i0).
Eigen::MatrixXcd boundary_matrix(const Model& model, double lambda) {
  const int n = model.n();
  if (at_threshold(model.spec, lambda)) {
    std::ostringstream msg;
    msg << "boundary value undefined at threshold energy " << lambda;
    throw ThresholdEnergy(msg.str());
  }
  Eigen::MatrixXcd b =
      model.pot.u.asDiagonal().toDenseMatrix().cast<Complex>();
  for (int j = 0; j < n; ++j) {
    const Eigen::VectorXcd w =
        model.pot.vhalf.asDiagonal() * model.spec.xis.col(j);
    const Complex c = channel_coefficient(lambda, model.spec.lambdas(j));
    b += (c / (beta_sq(model, j, lambda) * double(n))) * (w * w.adjoint());
  }
  return b;
}

} // namespace

Complex boundary_det(const Model& model, double lambda) {
  return boundary_matrix(model, lambda).partialPivLu().determinant();
}

BoundaryValueMatrix m_matrix(const Model& model, double lambda) {
  const int n = model.n();
  const Eigen::MatrixXcd b = boundary_matrix(model, lambda);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(b);
  const auto& rdiag = qr.matrixR().diagonal();
  const double rmax = std::abs(rdiag(0));
  const double rmin = std::abs(rdiag(n - 1));
  if (rmin == 0.0 || rmax / rmin > kCondLimit) {
    std::ostringstream msg;
    msg << "boundary-value matrix numerically singular at lambda = " << lambda
        << " (eigenvalue of the perturbed operator?)";
    throw SingularAtEnergy(msg.str());
  }

  BoundaryValueMatrix result;
  result.lambda = lambda;
  result.m = qr.solve(Eigen::MatrixXcd::Identity(n, n));
  return result;
}

Complex FiberMatrix::entry(int channel_j) const {
  const auto it =
      std::find(channels.open.begin(), channels.open.end(), channel_j);
  if (it == channels.open.end()) {
    std::ostringstream msg;
    msg << "channel " << channel_j << " is closed at lambda = " << lambda;
    throw Error(msg.str());
  }
  const auto idx = std::distance(channels.open.begin(), it);
  return s(idx, idx);
}

FiberMatrix s_fiber(const Model& model, double lambda) {
  const int n = model.n();
  FiberMatrix fiber;
  fiber.lambda = lambda;
  fiber.channels = open_channels(model, lambda);
  const int m = fiber.channels.multiplicity();
  fiber.s.resize(m, m);
  if (m == 0) return fiber;

  const Eigen::MatrixXcd vmv = model.pot.vhalf.asDiagonal() *
                               m_matrix(model, lambda).m *
                               model.pot.vhalf.asDiagonal().toDenseMatrix();

  std::vector<double> beta(m);
  for (int r = 0; r < m; ++r) {
    beta[r] = std::sqrt(beta_sq(model, fiber.channels.open[r], lambda));
  }
  for (int r = 0; r < m; ++r) {
    const auto xr = model.spec.xis.col(fiber.channels.open[r]);
    for (int c = 0; c < m; ++c) {
      const auto xc = model.spec.xis.col(fiber.channels.open[c]);
      const Complex overlap = xr.adjoint() * vmv * xc;
      fiber.s(r, c) = ((r == c) ? 1.0 : 0.0) -
                      2.0 * kI * overlap / (beta[r] * beta[c] * double(n));
    }
  }
  return fiber;
}

Complex det_s(const Model& model, double lambda) {
  return s_fiber(model, lambda).s.determinant();
}

ThresholdLadder threshold_limit_ladder(const Model& model, double tau,
                                       Side side, int j) {
  const Eigen::VectorXd& taus = model.spec.thresholds;
  const double dir = (side == Side::above) ? 1.0 : -1.0;

  // Width of the inter-threshold interval the ladder walks into.
  double width = 0.0;
  for (int t = 0; t < taus.size(); ++t) {
    const double gap = dir * (taus(t) - tau);
    if (gap > kThresholdTol && (width == 0.0 || gap < width)) width = gap;
  }
  if (width == 0.0) width = 4.0; // tau is the outermost threshold on this side

  const double eps0 = std::min(kLadderEps0, 0.25 * width);
  const double eps_floor = 100.0 * kThresholdTol * std::max(1.0, std::abs(tau));

  ThresholdLadder ladder;
  for (int k = 0; k < kLadderRungs; ++k) {
    const double eps = eps0 * std::pow(4.0, -k);
    if (eps < eps_floor) break;
    ladder.eps.push_back(eps);
    ladder.values.push_back(s_fiber(model, tau + dir * eps).entry(j));
  }
  if (ladder.values.size() < 4) {
    throw NonConvergent("threshold ladder has too few usable rungs");
  }

  const auto sgn = [](double x) { return (x >= 0.0) ? 1 : -1; };
  const std::size_t last = ladder.values.size() - 1;
  const int s2 = sgn(ladder.values[last - 2].real());
  const int s1 = sgn(ladder.values[last - 1].real());
  const int s0 = sgn(ladder.values[last].real());
  if (s0 != s1 || s1 != s2) {
    std::ostringstream msg;
    msg << "threshold limit at tau = " << tau
        << ": sign of Re s_jj not stable over the last three rungs";
    throw NonConvergent(msg.str());
  }
  const double im2 = std::abs(ladder.values[last - 2].imag());
  const double im1 = std::abs(ladder.values[last - 1].imag());
  const double im0 = std::abs(ladder.values[last].imag());
  const bool decaying = (im0 <= im1 + 1e-9 && im1 <= im2 + 1e-9);
  const bool negligible = (im0 < 1e-6 && im1 < 1e-6 && im2 < 1e-6);
  if (!decaying && !negligible) {
    std::ostringstream msg;
    msg << "threshold limit at tau = " << tau
        << ": |Im s_jj| fails to decrease along the ladder";
    throw NonConvergent(msg.str());
  }

  ladder.sign = s0;
  return ladder;
}

int threshold_limit(const Model& model, double tau, Side side, int j) {
  return threshold_limit_ladder(model, tau, side, j).sign;
}

} // namespace scatterkit
