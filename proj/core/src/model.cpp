#include "scatterkit/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace scatterkit {

namespace {
constexpr double kPi = std::numbers::pi;
}

void validate(const ModelParams& params) {
  if (params.n < 2) {
    throw InvalidParams("channel count n must be >= 2");
  }
  if (!(params.theta > 0.0 && params.theta < kPi)) {
    std::ostringstream msg;
    msg << "flux theta = " << params.theta
        << " is outside (0, pi); theta in {0, pi} is excluded";
    throw InvalidParams(msg.str());
  }
  if (params.v.size() != params.n) {
    throw InvalidParams("potential vector must have length n");
  }
  if (params.v.lpNorm<Eigen::Infinity>() == 0.0) {
    throw InvalidParams("potential vector must be nonzero");
  }
  if (params.n == 2 && params.v(0) == params.v(1)) {
    throw InvalidParams("for n = 2 the potential must not be 1-periodic (v(1) != v(2))");
  }
}

ModelParams make_params(int n, double theta, Eigen::VectorXd v) {
  ModelParams params{n, theta, std::move(v)};
  validate(params);
  return params;
}

DecomposedPotential decompose_potential(const ModelParams& params) {
  DecomposedPotential pot;
  pot.u = Eigen::VectorXd::Ones(params.n);
  pot.vhalf = Eigen::VectorXd::Zero(params.n);
  for (int j = 0; j < params.n; ++j) {
    if (params.v(j) < 0.0) pot.u(j) = -1.0;
    pot.vhalf(j) = std::sqrt(std::abs(params.v(j)));
  }
  return pot;
}

Eigen::MatrixXcd build_a_theta(const ModelParams& params) {
  validate(params);
  const int n = params.n;
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 0; k + 1 < n; ++k) {
    a(k, k + 1) += 1.0;
    a(k + 1, k) += 1.0;
  }
  // For n = 2 both the direct hop and the corner hop land in the same entry.
  a(0, n - 1) += std::polar(1.0, -params.theta);
  a(n - 1, 0) += std::polar(1.0, params.theta);
  return a;
}

SpectralData eigendata(const ModelParams& params) {
  validate(params);
  const int n = params.n;
  SpectralData spec;
  spec.lambdas.resize(n);
  spec.xis.resize(n, n);
  spec.projs.resize(n);

  for (int j = 0; j < n; ++j) {
    const double phi = (params.theta + 2.0 * kPi * (j + 1)) / n;
    spec.lambdas(j) = 2.0 * std::cos(phi);
    for (int k = 0; k < n; ++k) {
      spec.xis(k, j) = std::polar(1.0, phi * (k + 1));
    }
    spec.projs[j] = spec.xis.col(j) * spec.xis.col(j).adjoint() / double(n);
  }

  spec.order.resize(n);
  std::iota(spec.order.begin(), spec.order.end(), 0);
  std::sort(spec.order.begin(), spec.order.end(),
            [&](int a, int b) { return spec.lambdas(a) < spec.lambdas(b); });
  spec.rank.resize(n);
  for (int k = 0; k < n; ++k) spec.rank[spec.order[k]] = k;

  spec.thresholds.resize(2 * n);
  for (int j = 0; j < n; ++j) {
    spec.thresholds(2 * j) = spec.lambdas(j) - 2.0;
    spec.thresholds(2 * j + 1) = spec.lambdas(j) + 2.0;
  }
  std::sort(spec.thresholds.data(), spec.thresholds.data() + 2 * n);
  spec.band_min = spec.thresholds(0);
  spec.band_max = spec.thresholds(2 * n - 1);
  return spec;
}

Eigen::VectorXd thresholds(const ModelParams& params) {
  return eigendata(params).thresholds;
}

std::vector<int> interleaving_order(int n) {
  // 1-based channel chain: for n even
  //   n/2, n/2-1, n/2+1, n/2-2, n/2+2, ..., 1, n-1, n
  // and for n odd
  //   (n-1)/2, (n+1)/2, (n-1)/2-1, (n+1)/2+1, ..., 1, n-1, n.
  std::vector<int> order;
  order.reserve(n);
  int lo, hi;
  if (n % 2 == 0) {
    lo = n / 2;
    hi = n / 2;
    order.push_back(lo);
  } else {
    lo = (n - 1) / 2;
    hi = (n + 1) / 2;
    order.push_back(lo);
    order.push_back(hi);
  }
  while (static_cast<int>(order.size()) + 1 < n) {
    order.push_back(--lo);
    order.push_back(++hi);
  }
  if (static_cast<int>(order.size()) < n) order.push_back(n);
  for (int& j : order) --j; // 0-based channels
  return order;
}

bool at_threshold(const SpectralData& spec, double lambda) {
  for (int t = 0; t < spec.thresholds.size(); ++t) {
    const double tau = spec.thresholds(t);
    if (std::abs(lambda - tau) < kThresholdTol * std::max(1.0, std::abs(tau))) {
      return true;
    }
  }
  return false;
}

ChannelSet open_channels(const SpectralData& spec, double lambda) {
  if (at_threshold(spec, lambda)) {
    std::ostringstream msg;
    msg << "lambda = " << lambda << " coincides with a threshold";
    throw ThresholdEnergy(msg.str());
  }
  ChannelSet channels;
  channels.lambda = lambda;
  for (int k = 0; k < static_cast<int>(spec.order.size()); ++k) {
    const int j = spec.order[k];
    if (std::abs(lambda - spec.lambdas(j)) < 2.0) channels.open.push_back(j);
  }
  return channels;
}

Model make_model(ModelParams params) {
  validate(params);
  Model model;
  model.pot = decompose_potential(params);
  model.spec = eigendata(params);
  model.params = std::move(params);
  return model;
}

Model make_model(int n, double theta, Eigen::VectorXd v) {
  return make_model(make_params(n, theta, std::move(v)));
}

ChannelSet open_channels(const Model& model, double lambda) {
  return open_channels(model.spec, lambda);
}

Eigen::MatrixXcd build_truncated_hamiltonian(const ModelParams& params, int L) {
  validate(params);
  if (L < 2) throw InvalidParams("truncation length L must be >= 2");
  const int n = params.n;
  const int size = (L + 1) * n;
  const Eigen::MatrixXcd a = build_a_theta(params);

  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(size, size);
  for (int site = 0; site <= L; ++site) {
    h.block(site * n, site * n, n, n) = a;
  }
  h.block(0, 0, n, n) += params.v.asDiagonal().toDenseMatrix().cast<Complex>();
  const double root2 = std::sqrt(2.0);
  for (int site = 0; site < L; ++site) {
    const double hop = (site == 0) ? root2 : 1.0;
    h.block(site * n, (site + 1) * n, n, n) =
        hop * Eigen::MatrixXcd::Identity(n, n);
    h.block((site + 1) * n, site * n, n, n) =
        hop * Eigen::MatrixXcd::Identity(n, n);
  }
  return h;
}

} // namespace scatterkit
