#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "ppsynth/geometry.hpp"
#include "ppsynth/network.hpp"

namespace ppsynth {

// Privacy budget for synthesis.  Two input patterns are neighbours when one
// can be turned into the other by relocating a single point by at most
// `alpha`; the synthesizers guarantee (epsilon, delta) indistinguishability
// of their outputs for all such neighbours.
struct PrivacyBudget {
  double epsilon = 1.0;
  double delta = 0.0;
  double alpha = 0.0;
};

// Smallest k with P(Poisson(n) <= k) >= 1 - delta.  The CDF is accumulated
// recursively in log space so large rates stay stable.
long long poisson_tail_quantile(double n, double delta);

// Upper bound on
//   max { |log c(x) - log c(y)| : x, y in the window, |x - y| <= alpha }
// where c is the Gaussian window coverage with bandwidth h.  The coverage
// factors over the axes and each axis maximum has a closed form (the log
// axis coverage is symmetric and unimodal), so the bound reduces to a
// maximization over displacement directions, evaluated rigorously on an
// angle grid with staggered per-bracket endpoints.
double edge_ratio_bound(const RectDomain& dom, double h, double alpha);

struct KernelCalibration {
  double h = 0.0;           // smallest admissible bandwidth
  long long k = 0;          // high-probability output count bound
  double per_point = 0.0;   // per-point budget epsilon / k
  double move_term = 0.0;   // (2 alpha B + alpha^2) / (2 h^2) at h
  double edge_term = 0.0;   // edge ratio bound at h
};

// Calibrate the Gaussian-kernel synthesizer for a pattern of size n: choose
// the smallest bandwidth h such that, with k = poisson_tail_quantile(n,
// delta),
//   (2 alpha B + alpha^2) / (2 h^2) + edge_ratio_bound(h, alpha) <= eps / k
// with B the window diameter.  Throws CalibrationError (naming the limiting
// term) when no h <= B works.
KernelCalibration calibrate_kernel(const PrivacyBudget& budget, const RectDomain& dom,
                                   std::size_t n);

// Power-family covariance sigma^2 * exp(-(d/l)^p) over a point set.
Eigen::MatrixXd power_covariance(const std::vector<Point2>& pts, double sigma,
                                 double length_scale, double p);

// Numeric delta bound for log-Gaussian synthesis on a tessellation:
//   (4 / eps^2) * sum over cell pairs within alpha of the largest
//   Var(beta_a - beta_b) over cross vertex pairs (a, b).
// The variance over locations inside the two cells is maximized at vertices
// because the interpolated field is linear in the vertex variables.
double lgcp_delta_bound(const Tessellation& tess, const Eigen::MatrixXd& cov, double alpha,
                        double epsilon);

// Same bound with network segments as cells and their endpoints as vertices;
// pair distance is the shortest-path set distance.
double lgcp_delta_bound_network(const LinearNetwork& net, const Eigen::MatrixXd& cov,
                                double alpha, double epsilon);

struct LgcpCalibration {
  double r_max = 0.0;       // admissible sigma / length-scale ratio
  double alpha_max = 0.0;   // largest neighbourhood radius the grid admits
  double coefficient = 0.0; // closed-form constant (544 triangular, 104 square)
};

// Closed-form ratio calibration for a regular grid over a square window with
// `cells_per_side` cells per axis and the squared-exponential (p = 2) power
// covariance: the field scale must satisfy sigma <= r_max * length_scale.
// Requires budget.alpha <= side / (cells_per_side * sqrt(2)).
LgcpCalibration calibrate_lgcp_ratio(const PrivacyBudget& budget, const RectDomain& dom,
                                     TessKind kind, int cells_per_side);

// L1 sensitivity of the measure-normalized cell histogram under single-point
// relocation: 1/m1 + 1/m2 for the two smallest cell measures.
double laplace_sensitivity(const std::vector<double>& cell_measures);

}  // namespace ppsynth
