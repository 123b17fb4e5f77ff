#pragma once

#include <complex>
#include <vector>

#include "scatterkit/bound_states.hpp"
#include "scatterkit/model.hpp"

namespace scatterkit {

/// eta_{+-}(s) = tanh(pi s) +- i / cosh(pi s); unit modulus for every s.
/// These are the reference curves traced by the channel opening/closing
/// operators; traversing eta_- from +inf to -inf (or eta_+ from -inf to
/// +inf) winds half a turn clockwise.
Complex eta_pm(int sign, double s);

/// Variation of arg det S over one inter-threshold interval, in turns and
/// clockwise-counted: minus the unwrapped counterclockwise argument increase
/// divided by 2*pi.  Endpoint phases are Richardson-extrapolated from the
/// clipped ends (det S only has one-sided limits at thresholds).
/// interior_points sets the initial uniform sampling; adaptive bisection
/// refines wherever a step turns by pi/4 or more.
/// Throws PhaseJump if adaptive refinement hits the minimum step with a
/// phase step still >= pi/4.
double interval_variation(const Model& model, double lo, double hi,
                          int interior_points = 96);

/// One-sided limits of the diagonal scattering entries at all 2n thresholds,
/// each in {-1, +1}.  Entries are ordered by threshold value, i.e. the n
/// channel openings (lambda-sorted) followed by the n channel closings.
std::vector<int> classify_thresholds(const Model& model);

struct WindingReport {
  std::vector<double> interval_vars; // 2n-1 inter-threshold variations
  std::vector<int> threshold_signs;  // 2n signs in threshold order
  double var_total = 0.0;
  int plus_count = 0;                // thresholds with limit +1 (resonances)
  double predicted = 0.0;            // n - plus_count/2 + var_total
};

WindingReport winding_report(const Model& model);

struct LevinsonOptions {
  bool with_oracle = true;
  int oracle_L = 4000;
  double oracle_delta = 1e-3;
  bool with_embedded_scan = true;
  double embedded_grid_step = 0.0; // <= 0: default 1e-3 * bandwidth
  double residual_tol = 1e-3;
};

struct LevinsonReport {
  WindingReport winding;
  EigenvalueList eigenvalues;
  std::vector<double> embedded_candidates;
  int analytic_count = 0; // discrete roots plus embedded candidates
  int oracle_count = -1;  // -1 when the oracle was skipped
  double residual = 0.0;  // |predicted - analytic_count|
  bool identity_holds = false;
};

/// Assembles the full identity check
///   predicted = n - #{threshold value +1}/2 + Var(arg det S)
/// against the analytic eigenvalue count and the truncated-lattice oracle.
LevinsonReport levinson_report(const Model& model,
                               const LevinsonOptions& opts = {});

/// Thrown by levinson_check; carries the offending report.
class IdentityViolation : public Error {
public:
  IdentityViolation(const std::string& what, LevinsonReport report)
      : Error(what), report(std::move(report)) {}

  LevinsonReport report;
};

/// As levinson_report, but throws IdentityViolation unless the predicted
/// value is within residual_tol of an integer equal to the analytic count
/// (and to the oracle count when enabled).
LevinsonReport levinson_check(const Model& model,
                              const LevinsonOptions& opts = {});

} // namespace scatterkit
