#include "scatterkit/levinson.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "scatterkit/scattering.hpp"

namespace scatterkit {

namespace {

constexpr double kPi = std::numbers::pi;
// Endpoint clip: small enough that a state parked within ~1e-4 of a threshold
// still leaves the sqrt(eps) endpoint model accurate, floored safely above
// the threshold-coincidence tolerance.
constexpr double kClipFraction = 1e-9;
constexpr double kClipFloor = 1e-11;
constexpr double kMinStep = 1e-11;
constexpr double kMaxPhaseStep = kPi / 4.0;

double principal_diff(Complex w1, Complex w0) {
  return std::arg(w1 / w0);
}

// Unwrapped phase increase of det S from x0 to x1, refining by bisection
// until each step turns by less than pi/4.
double phase_increase(const Model& model, double x0, Complex w0, double x1,
                      Complex w1) {
  const double step = principal_diff(w1, w0);
  if (std::abs(step) < kMaxPhaseStep) return step;
  if (x1 - x0 < kMinStep) {
    std::ostringstream msg;
    msg << "phase step " << step << " at lambda in [" << x0 << ", " << x1
        << "] not resolvable above the minimum step";
    throw PhaseJump(msg.str());
  }
  const double xm = 0.5 * (x0 + x1);
  const Complex wm = det_s(model, xm);
  return phase_increase(model, x0, w0, xm, wm) +
         phase_increase(model, xm, wm, x1, w1);
}

double variation_pass(const Model& model, double lo, double hi,
                      int interior_points) {
  const double len = hi - lo;
  const double clip = std::max(kClipFraction * len, kClipFloor);

  // Anchor points: a 1:4:16 ladder at each end for the endpoint
  // extrapolation, geometric ladders resolving threshold-pinned structure
  // (shallow states concentrate a full turn at a scale set by their depth),
  // and a uniform interior grid.
  std::vector<double> xs;
  xs.push_back(lo + clip);
  xs.push_back(lo + 4.0 * clip);
  for (double d = 16.0 * clip; d < len / 8.0; d *= 2.0) {
    xs.push_back(lo + d);
    xs.push_back(hi - d);
  }
  const int interior = std::max(2, interior_points);
  std::vector<double> uniform(interior + 1);
  for (int i = 0; i <= interior; ++i) {
    uniform[i] = lo + 16.0 * clip + (len - 32.0 * clip) * double(i) / interior;
    xs.push_back(uniform[i]);
  }
  xs.push_back(hi - 4.0 * clip);
  xs.push_back(hi - clip);

  // Near-zeros of the boundary determinant are complex resonances close to
  // the real axis: det S can wind a full turn across a window far narrower
  // than any uniform grid.  Plant geometric clusters around each local
  // minimum of |det B| so the unwrap sees that structure at every scale.
  std::vector<double> qmag(uniform.size());
  for (std::size_t i = 0; i < uniform.size(); ++i) {
    qmag[i] = std::abs(boundary_det(model, uniform[i]));
  }
  for (std::size_t i = 1; i + 1 < uniform.size(); ++i) {
    if (qmag[i] >= qmag[i - 1] || qmag[i] > qmag[i + 1]) continue;
    const double reach = 0.5 * (uniform[i + 1] - uniform[i - 1]);
    for (double d = reach; d > 1e-10 * std::max(1.0, len); d *= 0.5) {
      if (uniform[i] - d > lo + clip) xs.push_back(uniform[i] - d);
      if (uniform[i] + d < hi - clip) xs.push_back(uniform[i] + d);
    }
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  std::vector<Complex> ws(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) ws[i] = det_s(model, xs[i]);

  // Unwrapped phase at each anchor, relative to the first one.
  std::vector<double> phase(xs.size(), 0.0);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    phase[i] = phase[i - 1] +
               phase_increase(model, xs[i - 1], ws[i - 1], xs[i], ws[i]);
  }

  // One-sided endpoint limits behave like phi0 + C*sqrt(eps) + D*eps; the
  // 1:4:16 ladder cancels both correction terms.
  const auto extrapolate = [](double p1, double p4, double p16) {
    return (8.0 * p1 - 6.0 * p4 + p16) / 3.0;
  };
  const std::size_t last = phase.size() - 1;
  const double phi_lo = extrapolate(phase[0], phase[1], phase[2]);
  const double phi_hi =
      extrapolate(phase[last], phase[last - 1], phase[last - 2]);
  return -(phi_hi - phi_lo) / (2.0 * kPi);
}

} // namespace

Complex eta_pm(int sign, double s) {
  return {std::tanh(kPi * s), sign / std::cosh(kPi * s)};
}

double interval_variation(const Model& model, double lo, double hi,
                          int interior_points) {
  // Adaptive bisection only sees phase steps modulo 2*pi, so a feature
  // narrower than the grid can alias by a whole turn.  Escalate the sampling
  // until two consecutive densities agree.
  double prev = variation_pass(model, lo, hi, std::max(2, interior_points));
  for (int pts = std::max(2, interior_points) * 4; pts <= 100000; pts *= 4) {
    const double next = variation_pass(model, lo, hi, pts);
    if (std::abs(next - prev) < 1e-6) return next;
    prev = next;
  }
  std::ostringstream msg;
  msg << "interval variation on (" << lo << ", " << hi
      << ") fails to stabilise under grid refinement";
  throw PhaseJump(msg.str());
}

std::vector<int> classify_thresholds(const Model& model) {
  const int n = model.n();
  std::vector<int> signs;
  signs.reserve(2 * n);
  // Sorted threshold order = the n openings (by eigenvalue) then the n
  // closings: every lambda_j - 2 lies below every lambda_k + 2.
  for (int k = 0; k < n; ++k) {
    const int j = model.spec.order[k];
    signs.push_back(
        threshold_limit(model, model.spec.lambdas(j) - 2.0, Side::above, j));
  }
  for (int k = 0; k < n; ++k) {
    const int j = model.spec.order[k];
    signs.push_back(
        threshold_limit(model, model.spec.lambdas(j) + 2.0, Side::below, j));
  }
  return signs;
}

WindingReport winding_report(const Model& model) {
  WindingReport report;
  const Eigen::VectorXd& taus = model.spec.thresholds;
  for (int t = 0; t + 1 < taus.size(); ++t) {
    report.interval_vars.push_back(
        interval_variation(model, taus(t), taus(t + 1)));
    report.var_total += report.interval_vars.back();
  }
  report.threshold_signs = classify_thresholds(model);
  for (int sign : report.threshold_signs) {
    if (sign > 0) ++report.plus_count;
  }
  report.predicted =
      model.n() - 0.5 * report.plus_count + report.var_total;
  return report;
}

LevinsonReport levinson_report(const Model& model,
                               const LevinsonOptions& opts) {
  LevinsonReport report;
  report.winding = winding_report(model);
  report.eigenvalues = find_discrete_eigenvalues(model);
  if (opts.with_embedded_scan) {
    report.embedded_candidates =
        embedded_eigenvalue_scan(model, opts.embedded_grid_step);
  }
  report.analytic_count = report.eigenvalues.total +
                          static_cast<int>(report.embedded_candidates.size());
  if (opts.with_oracle) {
    report.oracle_count =
        truncation_oracle(model, opts.oracle_L, opts.oracle_delta);
  }
  report.residual =
      std::abs(report.winding.predicted - report.analytic_count);
  const long rounded = std::lround(report.winding.predicted);
  report.identity_holds =
      report.residual < opts.residual_tol &&
      rounded == report.analytic_count &&
      (!opts.with_oracle || report.oracle_count == report.analytic_count);
  return report;
}

LevinsonReport levinson_check(const Model& model,
                              const LevinsonOptions& opts) {
  LevinsonReport report = levinson_report(model, opts);
  if (!report.identity_holds) {
    std::ostringstream msg;
    msg << "Levinson identity violated: predicted = "
        << report.winding.predicted
        << ", analytic count = " << report.analytic_count;
    if (report.oracle_count >= 0) {
      msg << ", oracle count = " << report.oracle_count;
    }
    throw IdentityViolation(msg.str(), std::move(report));
  }
  return report;
}

} // namespace scatterkit
