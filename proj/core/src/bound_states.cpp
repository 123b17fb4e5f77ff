#include "scatterkit/bound_states.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "scatterkit/scattering.hpp"

namespace scatterkit {

namespace {

double kernel_det(const Model& model, double lambda) {
  return kernel_matrix(model, lambda).determinant().real();
}

int kernel_dimension(const Eigen::MatrixXcd& k, double rel_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(k);
  const auto& sv = svd.singularValues();
  const double scale = sv(0);
  int dim = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) < rel_tol * std::max(scale, 1.0)) ++dim;
  }
  return dim;
}

// Roots of det K along lambda = edge + side*kappa^2 (side = -1 below the
// band, +1 above), bracketed on a kappa grid and bisected.
void scan_side(const Model& model, int side, const RootFindOptions& opts,
               EigenvalueList& out) {
  const double edge =
      (side < 0) ? model.spec.band_min : model.spec.band_max;
  const auto lam = [&](double kappa) { return edge + side * kappa * kappa; };
  const auto f = [&](double kappa) { return kernel_det(model, lam(kappa)); };

  double kappa_max = opts.kappa_max;
  for (int attempt = 0;; ++attempt) {
    if (attempt > 3) {
      throw BracketAtBoundary(
          "sign change of det K keeps touching kappa_max; eigenvalues deeper "
          "than the search range");
    }

    std::vector<std::pair<double, double>> brackets;
    const double kappa_min = 1e-5; // depth 1e-10, the reporting cutoff
    double prev_kappa = kappa_min;
    double prev_f = f(prev_kappa);
    bool last_cell_hit = false;
    for (int i = 1; i <= opts.grid_points; ++i) {
      const double kappa = kappa_max * double(i) / opts.grid_points;
      if (kappa <= prev_kappa) continue;
      const double fi = f(kappa);
      if ((prev_f < 0.0) != (fi < 0.0)) {
        brackets.emplace_back(prev_kappa, kappa);
        if (i == opts.grid_points) last_cell_hit = true;
      }
      prev_kappa = kappa;
      prev_f = fi;
    }
    if (last_cell_hit || std::abs(prev_f) < 1e-12) {
      kappa_max *= 2.0;
      continue;
    }

    for (const auto& [lo0, hi0] : brackets) {
      double lo = lo0, hi = hi0;
      double flo = f(lo);
      while (hi - lo > opts.kappa_tol) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = f(mid);
        if ((flo < 0.0) == (fmid < 0.0)) {
          lo = mid;
          flo = fmid;
        } else {
          hi = mid;
        }
      }
      const double root = lam(0.5 * (lo + hi));
      const int mult = std::max(
          1, kernel_dimension(kernel_matrix(model, root), opts.kernel_rel_tol));
      out.values.push_back(root);
      out.multiplicities.push_back(mult);
      out.total += mult;
    }
    return;
  }
}

// ---- Truncated-lattice inertia machinery -----------------------------------
//
// The truncated Hamiltonian is block tridiagonal with constant diagonal block
// A (plus diag(v) in block 0) and hop blocks sqrt(2)*I then I.  The Schur
// recursion S_0 = D_0 - sigma, S_k = A - sigma - hop_k^2 * S_{k-1}^{-1}
// realises an LDL^* congruence, so the eigenvalue count below sigma is the
// total number of negative eigenvalues of the S_k.  Away from the band the
// recursion reaches a fixed point; once stationary to machine precision the
// remaining blocks all contribute the same inertia.

struct BlockInertia {
  int neg = 0;
  bool singular = false;
};

BlockInertia block_inertia(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>& es,
                           const Eigen::MatrixXcd& s) {
  es.compute(s, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  BlockInertia inertia;
  double scale = 1.0;
  for (int i = 0; i < ev.size(); ++i) {
    if (ev(i) < 0.0) ++inertia.neg;
    scale = std::max(scale, std::abs(ev(i)));
  }
  inertia.singular = ev.cwiseAbs().minCoeff() < 1e-13 * scale;
  return inertia;
}

int count_below_once(const Model& model, int L, double sigma, bool& ok) {
  const int n = model.n();
  const Eigen::MatrixXcd a = build_a_theta(model.params);
  const Eigen::MatrixXcd shifted =
      a - sigma * Eigen::MatrixXcd::Identity(n, n);

  Eigen::MatrixXcd s = shifted;
  s += model.params.v.asDiagonal().toDenseMatrix().cast<Complex>();

  ok = true;
  int neg = 0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es;
  Eigen::MatrixXcd prev = Eigen::MatrixXcd::Zero(n, n);
  int stationary = 0;
  for (int site = 0; site <= L; ++site) {
    if (site > 0) {
      const double hop_sq = (site == 1) ? 2.0 : 1.0;
      const Eigen::MatrixXcd sinv =
          s.partialPivLu().solve(Eigen::MatrixXcd::Identity(n, n));
      s = shifted - hop_sq * sinv;
    }
    const BlockInertia inertia = block_inertia(es, s);
    if (inertia.singular) {
      ok = false;
      return 0;
    }
    neg += inertia.neg;

    if (site >= 2) {
      const double diff = (s - prev).cwiseAbs().maxCoeff();
      stationary = (diff < 1e-14 * std::max(1.0, s.cwiseAbs().maxCoeff()))
                       ? stationary + 1
                       : 0;
      if (stationary >= 4) {
        neg += (L - site) * inertia.neg;
        return neg;
      }
    }
    prev = s;
  }
  return neg;
}

int count_below(const Model& model, int L, double sigma) {
  for (int attempt = 0; attempt < 8; ++attempt) {
    bool ok = false;
    const int count = count_below_once(model, L, sigma, ok);
    if (ok) return count;
    sigma += 3e-12 * std::max(1.0, std::abs(sigma));
  }
  throw Unstable("inertia count failed: shifted pivot blocks stay singular");
}

// k-th (1-based) eigenvalue strictly below hi, given that exactly `total`
// of them live in [lo, hi); standard count-based bisection.
double locate_kth(const std::function<int(double)>& count_fn, double lo,
                  double hi, int k) {
  while (hi - lo > 1e-11 * std::max(1.0, std::abs(hi))) {
    const double mid = 0.5 * (lo + hi);
    if (count_fn(mid) >= k) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

} // namespace

Eigen::MatrixXcd kernel_matrix(const Model& model, double lambda) {
  const int n = model.n();
  Eigen::MatrixXcd k =
      model.pot.u.asDiagonal().toDenseMatrix().cast<Complex>();
  for (int j = 0; j < n; ++j) {
    const double lj = model.spec.lambdas(j);
    double sign = 0.0;
    if (lambda < lj - 2.0) {
      sign = 1.0;
    } else if (lambda > lj + 2.0) {
      sign = -1.0;
    } else {
      continue; // open channel: enters through the coupling kernels instead
    }
    const Eigen::VectorXcd w =
        model.pot.vhalf.asDiagonal() * model.spec.xis.col(j);
    k += (sign / (beta_sq(model, j, lambda) * double(n))) * (w * w.adjoint());
  }
  return k;
}

double eigen_condition_value(const Model& model, double lambda) {
  if (lambda >= model.spec.band_min && lambda <= model.spec.band_max) {
    std::ostringstream msg;
    msg << "lambda = " << lambda << " lies inside the band ["
        << model.spec.band_min << ", " << model.spec.band_max << "]";
    throw InsideBand(msg.str());
  }
  return kernel_det(model, lambda);
}

EigenvalueList find_discrete_eigenvalues(const Model& model,
                                         const RootFindOptions& opts) {
  EigenvalueList list;
  scan_side(model, -1, opts, list);
  scan_side(model, +1, opts, list);

  std::vector<int> idx(list.values.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = int(i);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return list.values[a] < list.values[b];
  });
  EigenvalueList sorted;
  sorted.total = list.total;
  for (int i : idx) {
    sorted.values.push_back(list.values[i]);
    sorted.multiplicities.push_back(list.multiplicities[i]);
  }
  return sorted;
}

std::vector<double> embedded_eigenvalue_scan(const Model& model,
                                             double grid_step) {
  const double bandwidth = model.spec.band_max - model.spec.band_min;
  if (grid_step <= 0.0) grid_step = 1e-3 * bandwidth;

  std::vector<double> candidates;
  const Eigen::VectorXd& taus = model.spec.thresholds;
  for (int t = 0; t + 1 < taus.size(); ++t) {
    const double lo = taus(t);
    const double hi = taus(t + 1);
    const double margin = 1e-6 * (hi - lo);
    const int steps = std::max(2, int((hi - lo) / grid_step));
    bool in_cluster = false;
    for (int i = 0; i <= steps; ++i) {
      const double lambda =
          lo + margin + (hi - lo - 2.0 * margin) * double(i) / steps;
      const ChannelSet channels = open_channels(model, lambda);
      const int m = channels.multiplicity();
      Eigen::MatrixXcd stacked(model.n() + m, model.n());
      stacked.topRows(model.n()) = kernel_matrix(model, lambda);
      for (int r = 0; r < m; ++r) {
        Eigen::VectorXcd w = model.pot.vhalf.asDiagonal() *
                             model.spec.xis.col(channels.open[r]);
        const double norm = w.norm();
        if (norm > 0.0) w /= norm;
        stacked.row(model.n() + r) = w.adjoint();
      }
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(stacked);
      const auto& sv = svd.singularValues();
      const bool hit =
          sv(sv.size() - 1) < 1e-8 * std::max(1.0, sv(0));
      if (hit && !in_cluster) candidates.push_back(lambda);
      in_cluster = hit;
    }
  }
  return candidates;
}

int truncated_count_below(const Model& model, int L, double sigma) {
  return count_below(model, L, sigma);
}

TruncatedSpectrum truncated_outside_spectrum(const Model& model, int L,
                                             double delta) {
  // The truncated operator is a compression of the full one, so outside-band
  // eigenvalues cannot be truncation artifacts (Cauchy interlacing); counting
  // uses a tiny floor and delta only sets the drift tolerance downstream.
  const double floor = std::min(delta, 1e-9);
  TruncatedSpectrum spectrum;
  const int size = (L + 1) * model.n();
  const double vmax = model.params.v.lpNorm<Eigen::Infinity>();
  const double lo_bound = model.spec.band_min - vmax - 1.0;
  const double hi_bound = model.spec.band_max + vmax + 1.0;

  const auto below_fn = [&](double x) { return count_below(model, L, x); };
  const int n_below = below_fn(model.spec.band_min - floor);
  for (int k = 1; k <= n_below; ++k) {
    spectrum.below.push_back(
        locate_kth(below_fn, lo_bound, model.spec.band_min - floor, k));
  }

  // Above the band, count downwards from the top via size - count_below.
  const auto above_fn = [&](double x) {
    return size - count_below(model, L, x);
  };
  const int n_above = above_fn(model.spec.band_max + floor);
  for (int k = 1; k <= n_above; ++k) {
    // k-th from the top; bisect on the number of eigenvalues >= x.
    double lo = model.spec.band_max + floor, hi = hi_bound;
    while (hi - lo > 1e-11 * std::max(1.0, std::abs(hi))) {
      const double mid = 0.5 * (lo + hi);
      if (above_fn(mid) >= k) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    spectrum.above.push_back(0.5 * (lo + hi));
  }
  std::sort(spectrum.above.begin(), spectrum.above.end());
  return spectrum;
}

OracleResult truncation_oracle_detail(const Model& model, int L,
                                      double delta) {
  if (L < 100) throw InvalidParams("oracle truncation length L must be >= 100");
  if (delta <= 0.0) throw InvalidParams("oracle margin delta must be positive");

  OracleResult result;
  result.at_L = truncated_outside_spectrum(model, L, delta);
  result.at_2L = truncated_outside_spectrum(model, 2 * L, delta);

  if (result.at_L.count() != result.at_2L.count()) {
    std::ostringstream msg;
    msg << "oracle counts disagree: " << result.at_L.count() << " at L = " << L
        << " vs " << result.at_2L.count() << " at 2L";
    throw Unstable(msg.str());
  }
  for (std::size_t i = 0; i < result.at_L.below.size(); ++i) {
    result.max_drift =
        std::max(result.max_drift,
                 std::abs(result.at_L.below[i] - result.at_2L.below[i]));
  }
  for (std::size_t i = 0; i < result.at_L.above.size(); ++i) {
    result.max_drift =
        std::max(result.max_drift,
                 std::abs(result.at_L.above[i] - result.at_2L.above[i]));
  }
  if (result.max_drift > delta / 10.0) {
    std::ostringstream msg;
    msg << "oracle eigenvalues drift by " << result.max_drift
        << " between L and 2L (limit " << delta / 10.0 << ")";
    throw Unstable(msg.str());
  }
  result.count = result.at_L.count();
  return result;
}

int truncation_oracle(const Model& model, int L, double delta) {
  return truncation_oracle_detail(model, L, delta).count;
}

} // namespace scatterkit
