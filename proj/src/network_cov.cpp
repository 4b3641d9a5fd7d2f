#include "ppsynth/network_cov.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "ppsynth/cholesky.hpp"
#include "ppsynth/errors.hpp"

namespace ppsynth {

ResistanceMetric::ResistanceMetric(const LinearNetwork& net, int anchor) : net_(&net) {
  const int n = net.node_count();
  if (anchor < 0 || anchor >= n) {
    throw std::invalid_argument("ResistanceMetric: anchor node out of range");
  }
  Eigen::MatrixXd prec = Eigen::MatrixXd::Zero(n, n);
  for (const auto& s : net.segments()) {
    const double c = 1.0 / s.length;
    prec(s.a, s.a) += c;
    prec(s.b, s.b) += c;
    prec(s.a, s.b) -= c;
    prec(s.b, s.a) -= c;
  }
  prec(anchor, anchor) += 1.0;

  const CholeskyFactor chol(prec);
  node_cov_.resize(n, n);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    e[j] = 1.0;
    node_cov_.col(j) = chol.solve(e);
    e[j] = 0.0;
  }
  node_cov_ = 0.5 * (node_cov_ + node_cov_.transpose().eval());
}

double ResistanceMetric::distance(const NetworkLoc& u, const NetworkLoc& v) const {
  if (!net_->valid_loc(u) || !net_->valid_loc(v)) {
    throw std::invalid_argument("ResistanceMetric::distance: location off the network");
  }
  const auto& su = net_->segment(u.seg);
  const auto& sv = net_->segment(v.seg);
  const double tu = u.offset / su.length;
  const double tv = v.offset / sv.length;

  if (u.seg == v.seg) {
    const double dt = std::abs(tu - tv);
    return dt * dt * node_distance(su.a, su.b) + su.length * dt * (1.0 - dt);
  }

  // Var of the node-value contrast plus the two independent bridge variances.
  Eigen::Vector4d w(1.0 - tu, tu, -(1.0 - tv), -tv);
  const int idx[4] = {su.a, su.b, sv.a, sv.b};
  double quad = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      quad += w[i] * w[j] * node_cov_(idx[i], idx[j]);
    }
  }
  return quad + su.length * tu * (1.0 - tu) + sv.length * tv * (1.0 - tv);
}

double ResistanceMetric::diameter() const {
  double best = 0.0;
  const int n = net_->node_count();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) best = std::max(best, node_distance(i, j));
  }
  // A one-node network still has positive extent along its segments.
  for (int s = 0; s < net_->segment_count(); ++s) {
    best = std::max(best, 0.25 * net_->segment(s).length);
  }
  return best;
}

double net_correlation(NetCorrelation kind, double t, double a, double phi) {
  if (!(phi > 0.0)) throw std::invalid_argument("net_correlation: phi must be positive");
  if (t < 0.0) throw std::invalid_argument("net_correlation: distance must be >= 0");
  switch (kind) {
    case NetCorrelation::exponential:
      if (!(a > 0.0 && a <= 1.0)) {
        throw std::invalid_argument("net_correlation: exponential exponent must lie in (0, 1]");
      }
      return std::exp(-std::pow(t, a) / phi);
    case NetCorrelation::matern: {
      if (!(a > 0.0 && a <= 0.5)) {
        throw std::invalid_argument("net_correlation: matern smoothness must lie in (0, 1/2]");
      }
      const double x = t / phi;
      if (x < 1e-12) return 1.0;
      return std::pow(2.0, 1.0 - a) / std::tgamma(a) * std::pow(x, a) * std::cyl_bessel_k(a, x);
    }
  }
  throw std::invalid_argument("net_correlation: unknown correlation kind");
}

Eigen::MatrixXd network_node_covariance(const ResistanceMetric& metric, NetCorrelation kind,
                                        double sigma, double a, double phi) {
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("network_node_covariance: sigma must be positive");
  }
  const int n = metric.network().node_count();
  Eigen::MatrixXd cov(n, n);
  for (int i = 0; i < n; ++i) {
    cov(i, i) = sigma * sigma;
    for (int j = i + 1; j < n; ++j) {
      const double r = net_correlation(kind, metric.node_distance(i, j), a, phi);
      cov(i, j) = cov(j, i) = sigma * sigma * r;
    }
  }
  return cov;
}

std::vector<CovOption> network_cov_grid(const ResistanceMetric& metric,
                                        const PrivacyBudget& budget, NetCorrelation kind, double a,
                                        int n_options) {
  if (!(budget.epsilon > 0.0)) {
    throw std::invalid_argument("network_cov_grid: epsilon must be positive");
  }
  if (!(budget.delta > 0.0 && budget.delta < 1.0)) {
    throw std::invalid_argument("network_cov_grid: log-Gaussian synthesis requires delta in (0, 1)");
  }
  if (!(budget.alpha > 0.0)) {
    throw std::invalid_argument("network_cov_grid: alpha must be positive");
  }
  if (n_options < 1) throw std::invalid_argument("network_cov_grid: need at least one option");

  const LinearNetwork& net = metric.network();
  const double diam = metric.diameter();
  if (!(diam > 0.0)) throw CalibrationError("network_cov_grid: degenerate network extent");

  std::vector<CovOption> grid;
  const double lo = std::log(diam / 50.0);
  const double hi = std::log(diam);
  for (int i = 0; i < n_options; ++i) {
    const double phi = std::exp(n_options == 1 ? hi : lo + (hi - lo) * i / (n_options - 1));
    const Eigen::MatrixXd corr = network_node_covariance(metric, kind, 1.0, a, phi);
    const double g = lgcp_delta_bound_network(net, corr, budget.alpha, budget.epsilon);
    if (!(g > 0.0)) {
      throw CalibrationError(
          "network_cov_grid: the neighbourhood census is degenerate (no distinct segment pairs "
          "within alpha), so the scale bound is vacuous");
    }
    const double sigma = std::sqrt(budget.delta / g);
    Eigen::MatrixXd cov = sigma * sigma * corr;
    try {
      CholeskyFactor chol(cov);
      const double ld = chol.log_det();
      grid.push_back(CovOption{phi, sigma, std::move(chol), ld});
    } catch (const NumericalError&) {
      cov.diagonal().array() += 1e-10 * sigma * sigma;
      try {
        CholeskyFactor chol(cov);
        const double ld = chol.log_det();
        grid.push_back(CovOption{phi, sigma, std::move(chol), ld});
      } catch (const NumericalError&) {
        // Drop options that are numerically singular at this range.
      }
    }
  }
  if (grid.empty()) {
    throw CalibrationError("network_cov_grid: no correlation option is positive definite");
  }
  return grid;
}

}  // namespace ppsynth
