#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "scatterkit/model.hpp"

namespace scatterkit {

/// beta_j^2(lambda) = |(lambda - lambda_j)^2 - 4|^{1/2}; vanishes exactly at
/// the two thresholds of channel j.
double beta_sq(const Model& model, int j, double lambda);

/// Boundary value M(lambda+i0) of the resolvent-derived matrix, i.e. the
/// inverse of  u + sum_j c_j(lambda) * v^{1/2} P_j v^{1/2} / beta_j^2  with
/// c_j = +1 below channel j, i inside it, and -1 above it.
struct BoundaryValueMatrix {
  double lambda = 0.0;
  Eigen::MatrixXcd m;
};

BoundaryValueMatrix m_matrix(const Model& model, double lambda);

/// Determinant of the matrix being inverted in m_matrix.  Zero exactly at
/// eigenvalues; near-zeros (complex resonances close to the real axis) mark
/// the energies where the scattering matrix varies rapidly.
Complex boundary_det(const Model& model, double lambda);

/// Scattering matrix on the open-channel fiber at energy lambda, in the
/// orthonormal channel basis e_j = xi_j / sqrt(n).  Rows and columns follow
/// channels.open, i.e. increasing-eigenvalue order.
struct FiberMatrix {
  double lambda = 0.0;
  ChannelSet channels;
  Eigen::MatrixXcd s;

  /// Diagonal entry of the given channel; the channel must be open.
  Complex entry(int channel_j) const;
};

FiberMatrix s_fiber(const Model& model, double lambda);

Complex det_s(const Model& model, double lambda);

enum class Side { below, above };

/// One-sided limit data of a diagonal scattering entry at a threshold,
/// sampled on the geometric ladder eps_k = eps0 * 4^{-k}.
struct ThresholdLadder {
  std::vector<double> eps;
  std::vector<Complex> values;
  int sign = 0;

  Complex last() const { return values.back(); }
};

/// Evaluates s_jj(tau + eps) (side == above) or s_jj(tau - eps) (side ==
/// below) along the ladder and classifies the limit as +1 or -1 from the sign
/// of the real part.  The ladder starts at eps0 = 1e-2 shrunk to a quarter of
/// the adjacent inter-threshold interval, with 13 rungs.  Throws
/// NonConvergent when the final three rungs disagree in sign or the imaginary
/// part fails to decay.
ThresholdLadder threshold_limit_ladder(const Model& model, double tau,
                                       Side side, int j);

int threshold_limit(const Model& model, double tau, Side side, int j);

} // namespace scatterkit
