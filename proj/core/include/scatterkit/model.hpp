#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "scatterkit/errors.hpp"

namespace scatterkit {

using Complex = std::complex<double>;

/// Relative tolerance below which an energy counts as sitting on a threshold.
inline constexpr double kThresholdTol = 1e-12;

/// Parameters of the half-cylinder model: channel count n, magnetic flux
/// theta in (0,pi), and the site-0 potential v(1..n).
struct ModelParams {
  int n = 2;
  double theta = 0.0;
  Eigen::VectorXd v;
};

/// Throws InvalidParams unless the parameters are admissible:
/// n >= 2, 0 < theta < pi, v nonzero of length n, and for n = 2 the potential
/// must not be 1-periodic (v(1) != v(2)).
void validate(const ModelParams& params);

ModelParams make_params(int n, double theta, Eigen::VectorXd v);

/// Factorisation diag(v) = u * vhalf^2 with u a diagonal sign matrix
/// (+1 on zero entries of v) and vhalf = |diag(v)|^{1/2}.
struct DecomposedPotential {
  Eigen::VectorXd u;
  Eigen::VectorXd vhalf;
};

DecomposedPotential decompose_potential(const ModelParams& params);

/// Closed-form spectral data of the flux matrix A^theta.
///
/// Arrays are indexed by the channel j = 0..n-1 (1-based j+1 in formulas).
/// `order[k]` is the channel whose eigenvalue is the k-th smallest, so
/// lambdas(order[0]) < lambdas(order[1]) < ... ; `rank[j]` is the inverse
/// permutation.
struct SpectralData {
  Eigen::VectorXd lambdas;             // lambda_j = 2cos((theta+2pi(j+1))/n)
  Eigen::MatrixXcd xis;                // column j = eigenvector xi_j
  std::vector<Eigen::MatrixXcd> projs; // P_j = |xi_j><xi_j| / n
  std::vector<int> order;
  std::vector<int> rank;
  Eigen::VectorXd thresholds;          // sorted {lambda_j +- 2}, size 2n
  double band_min = 0.0;
  double band_max = 0.0;

  double sorted_lambda(int k) const { return lambdas(order[k]); }
};

/// The n x n flux matrix: ones on the two off-diagonals, e^{-i theta} in the
/// upper-right corner, e^{i theta} in the lower-left corner. Hermitian.
Eigen::MatrixXcd build_a_theta(const ModelParams& params);

SpectralData eigendata(const ModelParams& params);

/// Sorted list of the 2n thresholds {lambda_j +- 2}.
Eigen::VectorXd thresholds(const ModelParams& params);

/// Increasing-eigenvalue channel order predicted by the closed form
/// (0-based channels). Equivalent to sorting lambdas numerically; kept as an
/// independent statement of the interleaving so tests can compare both.
std::vector<int> interleaving_order(int n);

/// Channels open at a given energy: j is open iff |lambda - lambda_j| < 2.
/// `open` lists channel indices in increasing-eigenvalue order.
struct ChannelSet {
  double lambda = 0.0;
  std::vector<int> open;

  int multiplicity() const { return static_cast<int>(open.size()); }
};

bool at_threshold(const SpectralData& spec, double lambda);

ChannelSet open_channels(const SpectralData& spec, double lambda);

/// Bundle of parameters plus everything derived from them once.  All library
/// operations are pure functions of a const Model, safe to share across
/// threads.
struct Model {
  ModelParams params;
  DecomposedPotential pot;
  SpectralData spec;

  int n() const { return params.n; }
};

Model make_model(ModelParams params);
Model make_model(int n, double theta, Eigen::VectorXd v);

ChannelSet open_channels(const Model& model, double lambda);

/// Hamiltonian of the lattice truncated at site L: (L+1)*n square, block
/// tridiagonal with A^theta on the diagonal (plus diag(v) in block 0),
/// sqrt(2)*I between blocks 0 and 1, and I elsewhere.
Eigen::MatrixXcd build_truncated_hamiltonian(const ModelParams& params, int L);

} // namespace scatterkit
