#pragma once

#include <cmath>
#include <random>

#include "scatterkit/model.hpp"
#include "scatterkit/n2_analytic.hpp"

namespace sktest {

// Admissible random configurations.  For n = 2 the draw stays away from the
// 1-periodic line and from both resonance manifolds (|2*rho*Xi_plus +- a^2b^2|
// >= margin) so that threshold ladders converge cleanly; for n > 2 resonances
// are codimension one and a draw landing near one is rejected by the caller.
inline scatterkit::ModelParams random_params(std::mt19937& rng, int n,
                                             double theta_lo = 0.3,
                                             double theta_hi = 2.9,
                                             double resonance_margin = 0.5) {
  std::uniform_real_distribution<double> theta_dist(theta_lo, theta_hi);
  std::uniform_real_distribution<double> v_dist(-3.0, 3.0);
  for (;;) {
    const double theta = theta_dist(rng);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = v_dist(rng);
    if (v.lpNorm<Eigen::Infinity>() < 0.3) continue;
    if (n == 2) {
      if (std::abs(v(0) - v(1)) < 0.1) continue;
      const scatterkit::N2Params p = scatterkit::make_n2_params(v(0), v(1), theta);
      const double xi = scatterkit::xi_plus(theta);
      const double ab2 = p.a * p.a * p.b * p.b;
      if (std::abs(2.0 * p.rho() * xi + ab2) < resonance_margin) continue;
      if (std::abs(2.0 * p.rho() * xi - ab2) < resonance_margin) continue;
    }
    return scatterkit::make_params(n, theta, std::move(v));
  }
}

// In-band energy at distance > margin from every threshold.
inline double random_inband_lambda(std::mt19937& rng,
                                   const scatterkit::SpectralData& spec,
                                   double margin = 0.05) {
  std::uniform_real_distribution<double> dist(spec.band_min, spec.band_max);
  for (;;) {
    const double lambda = dist(rng);
    bool clear = true;
    for (int t = 0; t < spec.thresholds.size(); ++t) {
      if (std::abs(lambda - spec.thresholds(t)) <= margin) {
        clear = false;
        break;
      }
    }
    if (clear) return lambda;
  }
}

} // namespace sktest
