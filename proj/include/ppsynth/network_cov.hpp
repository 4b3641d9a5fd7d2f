#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ppsynth/lgcp.hpp"
#include "ppsynth/network.hpp"
#include "ppsynth/privacy.hpp"

namespace ppsynth {

// Variance metric of the centered Gaussian free field on the network seen as
// a metric graph: node values have precision equal to the conductance
// Laplacian (conductance = 1 / segment length) anchored at one node, and
// values between nodes are the linear interpolation of the endpoint values
// plus an independent Brownian bridge on each segment.  The squared-
// difference variance
//
//   d(u, v) = Var(Z(u) - Z(v))
//
// is the electrical (effective-resistance) distance between u and v: on a
// single segment of length L it equals L at the endpoints, and it reduces to
// the shortest-path distance on trees.  It does not depend on the anchor.
class ResistanceMetric {
 public:
  explicit ResistanceMetric(const LinearNetwork& net, int anchor = 0);

  const LinearNetwork& network() const { return *net_; }
  const Eigen::MatrixXd& node_covariance() const { return node_cov_; }

  double node_distance(int a, int b) const {
    return node_cov_(a, a) + node_cov_(b, b) - 2.0 * node_cov_(a, b);
  }
  double distance(const NetworkLoc& u, const NetworkLoc& v) const;

  // Largest node-pair distance (scales correlation-range grids).
  double diameter() const;

 private:
  const LinearNetwork* net_;
  Eigen::MatrixXd node_cov_;
};

enum class NetCorrelation { exponential, matern };

// Isotropic correlation at distance t: exp(-t^a / phi) for the exponential
// family (a in (0, 1]), or the Matern form (2^{1-a}/Gamma(a)) (t/phi)^a
// K_a(t/phi) (a in (0, 1/2]).  These parameter ranges keep the correlation
// positive definite in the resistance metric; phi must be positive.
double net_correlation(NetCorrelation kind, double t, double a, double phi);

// sigma^2 * r(d(i, j)) over all node pairs of the metric's network.
Eigen::MatrixXd network_node_covariance(const ResistanceMetric& metric, NetCorrelation kind,
                                        double sigma, double a, double phi);

// Privacy-calibrated covariance options for log-Gaussian synthesis on a
// network.  The range parameter phi runs over a log-spaced grid on
// [diam/50, diam] in the resistance metric; at each phi the field scale is
// the largest sigma whose pairwise-variance bound stays within the budget:
// the unit-scale bound g(phi) = lgcp_delta_bound_network(correlation matrix)
// scales as sigma^2, so sigma_max = sqrt(delta / g(phi)).  Throws
// CalibrationError when the pair census is degenerate (g = 0) or no option
// factors.
std::vector<CovOption> network_cov_grid(const ResistanceMetric& metric,
                                        const PrivacyBudget& budget, NetCorrelation kind, double a,
                                        int n_options = 15);

}  // namespace ppsynth
