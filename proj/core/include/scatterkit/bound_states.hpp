#pragma once

#include <vector>

#include <Eigen/Dense>

#include "scatterkit/model.hpp"

namespace scatterkit {

/// The Hermitian kernel-criterion matrix
///   K(lambda) = u + sum_{lambda < lambda_j - 2} vP_jv / beta_j^2
///                 - sum_{lambda > lambda_j + 2} vP_jv / beta_j^2,
/// with only the closed channels contributing.
Eigen::MatrixXcd kernel_matrix(const Model& model, double lambda);

/// det K(lambda) for lambda outside the closed band; real since K is
/// Hermitian.  A discrete eigenvalue of the perturbed operator sits exactly
/// at the zeros.  Throws InsideBand otherwise.
double eigen_condition_value(const Model& model, double lambda);

struct EigenvalueList {
  std::vector<double> values;        // sorted, outside the band
  std::vector<int> multiplicities;
  int total = 0;
};

struct RootFindOptions {
  double kappa_max = 6.0;   // band-edge offset parametrised as lambda = edge -+ kappa^2
  int grid_points = 2000;
  double kappa_tol = 1e-12;
  double kernel_rel_tol = 1e-8; // singular values below this (times the largest) count as kernel
};

/// Locates the zeros of det K below and above the band by bracketing sign
/// changes on a kappa grid and bisecting.  Multiplicities come from the SVD
/// kernel dimension of K at each root.  The kappa range auto-extends when a
/// sign change touches kappa_max; BracketAtBoundary is thrown only if that
/// keeps happening.
EigenvalueList find_discrete_eigenvalues(const Model& model,
                                         const RootFindOptions& opts = {});

/// Scans the open band for energies where ker K intersects the kernels of the
/// open-channel couplings P_j v (stacked-matrix smallest singular value below
/// 1e-8 relative).  Empty result means no embedded-eigenvalue candidate.
/// grid_step <= 0 selects the default 1e-3 * bandwidth.
std::vector<double> embedded_eigenvalue_scan(const Model& model,
                                             double grid_step = 0.0);

/// Out-of-band eigenvalues of the truncated-lattice Hamiltonian, located by
/// Sturm (inertia) bisection on the block-tridiagonal matrix.  The counting
/// margin is min(delta, 1e-9): truncation is a compression, so it cannot
/// push states out of the band, and delta's real job is the drift tolerance
/// of the L-doubling check.
struct TruncatedSpectrum {
  std::vector<double> below; // eigenvalues below the band, ascending
  std::vector<double> above; // eigenvalues above the band, ascending

  int count() const { return static_cast<int>(below.size() + above.size()); }
};

TruncatedSpectrum truncated_outside_spectrum(const Model& model, int L,
                                             double delta);

/// Number of eigenvalues of the truncated Hamiltonian strictly below sigma
/// (Sylvester inertia of the shifted block tridiagonal).  Exposed for tests.
int truncated_count_below(const Model& model, int L, double sigma);

struct OracleResult {
  int count = 0;
  TruncatedSpectrum at_L;
  TruncatedSpectrum at_2L;
  double max_drift = 0.0;
};

/// Brute-force bound-state count: eigenvalues of the truncated lattice at
/// distance > delta outside the band, required to be stable under doubling L
/// (equal counts, per-eigenvalue drift < delta/10).  Throws Unstable.
OracleResult truncation_oracle_detail(const Model& model, int L = 4000,
                                      double delta = 1e-3);

int truncation_oracle(const Model& model, int L = 4000, double delta = 1e-3);

} // namespace scatterkit
