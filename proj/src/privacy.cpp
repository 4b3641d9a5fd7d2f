#include "ppsynth/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "ppsynth/errors.hpp"

namespace ppsynth {

namespace {

double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

}  // namespace

long long poisson_tail_quantile(double n, double delta) {
  if (!(n >= 0.0)) throw std::invalid_argument("poisson_tail_quantile: rate must be >= 0");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("poisson_tail_quantile: delta must lie in (0, 1)");
  }
  if (n == 0.0) return 0;

  const double log_target = std::log1p(-delta);
  const double log_n = std::log(n);
  double log_pmf = -n;       // log P(X = 0)
  double log_cdf = log_pmf;  // log P(X <= 0)
  long long k = 0;
  // The quantile is near n + O(sqrt(n log(1/delta))); the cap is generous.
  const long long cap = static_cast<long long>(n + 20.0 * std::sqrt(n + 1.0) +
                                               20.0 * std::log(1.0 / delta) + 100.0);
  while (log_cdf < log_target) {
    ++k;
    if (k > cap) {
      throw NumericalError("poisson_tail_quantile: failed to converge");
    }
    log_pmf += log_n - std::log(static_cast<double>(k));
    log_cdf = log_add_exp(log_cdf, log_pmf);
  }
  return k;
}

namespace {

// log window coverage along one axis.
double log_axis_coverage(double lo, double hi, double t, double h) {
  const auto phi = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
  const double v = phi((hi - t) / h) - phi((lo - t) / h);
  return std::log(std::max(v, std::numeric_limits<double>::min()));
}

// Exact value of max { |F(u) - F(v)| : u, v in [lo, hi], |u - v| <= d } where
// F(t) is the log axis coverage.  F is symmetric about the midpoint and
// strictly increasing up to it, so the maximum pairs the interval end (the
// global minimum) with the point d inward, capped at the midpoint.
double axis_shift_max(double lo, double hi, double d, double h) {
  if (d <= 0.0) return 0.0;
  const double mid = 0.5 * (lo + hi);
  const double t = std::min(lo + d, mid);
  return log_axis_coverage(lo, hi, t, h) - log_axis_coverage(lo, hi, lo, h);
}

}  // namespace

double edge_ratio_bound(const RectDomain& dom, double h, double alpha) {
  if (!(h > 0.0)) throw std::invalid_argument("edge_ratio_bound: bandwidth must be positive");
  if (alpha < 0.0) throw std::invalid_argument("edge_ratio_bound: alpha must be >= 0");
  if (alpha == 0.0) return 0.0;

  // log coverage separates over axes, so for a displacement (dx, dy) the two
  // axis terms move independently and
  //   |log c(x) - log c(y)| <= Mx(|dx|) + My(|dy|)
  // with M the per-axis maximum above, which is nondecreasing.  Scaling the
  // displacement out to length alpha only grows both arguments, so the bound
  // over the quarter circle covers every admissible pair (reflection symmetry
  // handles the other quadrants).  Over each angle bracket, bounding dx by
  // the bracket's left end and dy by its right end keeps the result a true
  // upper bound of the circle maximum.
  const int n_angles = 129;
  double best = axis_shift_max(dom.x_min, dom.x_max, alpha, h);  // theta = 0 endpoint
  for (int i = 0; i + 1 < n_angles; ++i) {
    const double t0 = 0.5 * M_PI * i / (n_angles - 1);
    const double t1 = 0.5 * M_PI * (i + 1) / (n_angles - 1);
    const double dx = alpha * std::cos(t0);
    const double dy = alpha * std::sin(t1);
    const double mx = axis_shift_max(dom.x_min, dom.x_max, dx, h);
    const double my = axis_shift_max(dom.y_min, dom.y_max, dy, h);
    best = std::max(best, mx + my);
  }
  return best;
}

KernelCalibration calibrate_kernel(const PrivacyBudget& budget, const RectDomain& dom,
                                   std::size_t n) {
  const double B = dom.diameter();
  if (!(budget.epsilon > 0.0)) {
    throw std::invalid_argument("calibrate_kernel: epsilon must be positive");
  }
  if (!(budget.delta > 0.0 && budget.delta < 1.0)) {
    throw std::invalid_argument(
        "calibrate_kernel: the kernel synthesizer requires delta in (0, 1)");
  }
  if (!(budget.alpha > 0.0 && budget.alpha <= B)) {
    throw std::invalid_argument(
        "calibrate_kernel: alpha must lie in (0, B] for the window diameter B");
  }

  KernelCalibration out;
  out.k = poisson_tail_quantile(static_cast<double>(n), budget.delta);
  const double target = out.k == 0 ? std::numeric_limits<double>::infinity()
                                   : budget.epsilon / static_cast<double>(out.k);
  out.per_point = target;

  const double alpha = budget.alpha;
  const auto move_term = [&](double h) { return (2.0 * alpha * B + alpha * alpha) / (2.0 * h * h); };
  const auto condition = [&](double h) { return move_term(h) + edge_ratio_bound(dom, h, alpha); };

  const double h_lo =
      std::min(B, std::max(alpha * 1e-3 / std::sqrt(budget.epsilon), 1e-12 * B));
  if (out.k == 0) {
    // The count bound already absorbs the whole budget: any bandwidth works.
    out.h = h_lo;
    out.move_term = move_term(out.h);
    out.edge_term = edge_ratio_bound(dom, out.h, alpha);
    return out;
  }

  if (condition(B) > target) {
    const double mt = move_term(B);
    const double et = edge_ratio_bound(dom, B, alpha);
    throw CalibrationError(
        "calibrate_kernel: no bandwidth <= window diameter meets the budget; at h = B the " +
        std::string(mt >= et ? "relocation term " + std::to_string(mt)
                             : "edge-ratio term " + std::to_string(et)) +
        " exceeds the per-point budget " + std::to_string(target));
  }

  // Walk a geometric grid down from B to bracket the feasibility threshold;
  // the condition grows as h shrinks, so the feasible set is an up-set and
  // bisection applies.  The invariant kept throughout: `upper` is feasible.
  double upper = B;     // feasible
  double lower = h_lo;  // candidate infeasible end
  bool bracketed = false;
  for (double h = 0.5 * B; h >= h_lo; h *= 0.5) {
    if (condition(h) <= target) {
      upper = h;
    } else {
      lower = h;
      bracketed = true;
      break;
    }
  }
  if (!bracketed) lower = h_lo;

  if (condition(lower) <= target) {
    upper = lower;  // even the floor is feasible
  } else {
    while ((upper - lower) > 1e-6 * upper) {
      const double mid = 0.5 * (upper + lower);
      if (condition(mid) <= target) {
        upper = mid;
      } else {
        lower = mid;
      }
    }
  }

  out.h = upper;
  out.move_term = move_term(out.h);
  out.edge_term = edge_ratio_bound(dom, out.h, alpha);
  if (out.move_term + out.edge_term > target) {
    throw NumericalError("calibrate_kernel: final verification failed");
  }
  return out;
}

Eigen::MatrixXd power_covariance(const std::vector<Point2>& pts, double sigma,
                                 double length_scale, double p) {
  if (!(sigma > 0.0) || !(length_scale > 0.0)) {
    throw std::invalid_argument("power_covariance: sigma and length scale must be positive");
  }
  if (!(p > 0.0 && p <= 2.0)) {
    throw std::invalid_argument("power_covariance: exponent must lie in (0, 2]");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    cov(i, i) = sigma * sigma;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = dist(pts[i], pts[j]);
      cov(i, j) = cov(j, i) = sigma * sigma * std::exp(-std::pow(d / length_scale, p));
    }
  }
  return cov;
}

namespace {

double max_cross_pair_variance(const Eigen::MatrixXd& cov, const int* va, int na, const int* vb,
                               int nb) {
  double best = 0.0;
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < nb; ++j) {
      const int a = va[i], b = vb[j];
      best = std::max(best, cov(a, a) + cov(b, b) - 2.0 * cov(a, b));
    }
  }
  return best;
}

}  // namespace

double lgcp_delta_bound(const Tessellation& tess, const Eigen::MatrixXd& cov, double alpha,
                        double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("lgcp_delta_bound: epsilon must be positive");
  if (cov.rows() != tess.vertex_count() || cov.cols() != tess.vertex_count()) {
    throw std::invalid_argument("lgcp_delta_bound: covariance size must match vertex count");
  }
  double acc = 0.0;
  for (const auto& [i, j] : enumerate_cell_pairs(tess, alpha)) {
    const Cell& ci = tess.cells()[i];
    const Cell& cj = tess.cells()[j];
    acc += max_cross_pair_variance(cov, ci.v.data(), ci.size, cj.v.data(), cj.size);
  }
  return 4.0 * acc / (epsilon * epsilon);
}

double lgcp_delta_bound_network(const LinearNetwork& net, const Eigen::MatrixXd& cov, double alpha,
                                double epsilon) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("lgcp_delta_bound_network: epsilon must be positive");
  }
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("lgcp_delta_bound_network: alpha must be positive");
  }
  if (cov.rows() != net.node_count() || cov.cols() != net.node_count()) {
    throw std::invalid_argument("lgcp_delta_bound_network: covariance size must match node count");
  }

  // Set distance between two segments: zero when they share a node, else the
  // shortest path between endpoints (interior points always exit through an
  // endpoint).
  const int ns = net.segment_count();
  std::vector<std::vector<double>> node_dist(net.node_count());
  for (int v = 0; v < net.node_count(); ++v) node_dist[v] = net.node_distances_from(v);

  double acc = 0.0;
  for (int i = 0; i < ns; ++i) {
    const auto& si = net.segment(i);
    for (int j = i + 1; j < ns; ++j) {
      const auto& sj = net.segment(j);
      double d = 0.0;
      if (si.a != sj.a && si.a != sj.b && si.b != sj.a && si.b != sj.b) {
        d = std::min(std::min(node_dist[si.a][sj.a], node_dist[si.a][sj.b]),
                     std::min(node_dist[si.b][sj.a], node_dist[si.b][sj.b]));
      }
      if (d > alpha) continue;
      const int va[2] = {si.a, si.b};
      const int vb[2] = {sj.a, sj.b};
      acc += max_cross_pair_variance(cov, va, 2, vb, 2);
    }
  }
  return 4.0 * acc / (epsilon * epsilon);
}

LgcpCalibration calibrate_lgcp_ratio(const PrivacyBudget& budget, const RectDomain& dom,
                                     TessKind kind, int cells_per_side) {
  if (!(budget.epsilon > 0.0)) {
    throw std::invalid_argument("calibrate_lgcp_ratio: epsilon must be positive");
  }
  if (!(budget.delta > 0.0 && budget.delta < 1.0)) {
    throw std::invalid_argument(
        "calibrate_lgcp_ratio: the log-Gaussian synthesizer requires delta in (0, 1)");
  }
  if (cells_per_side < 1) {
    throw std::invalid_argument("calibrate_lgcp_ratio: need at least one cell per side");
  }

  LgcpCalibration out;
  // Conservative side for (near-)square windows.
  const double side = std::max(dom.width(), dom.height());
  out.alpha_max = side / (cells_per_side * std::sqrt(2.0));
  if (budget.alpha > out.alpha_max * (1.0 + 1e-12)) {
    throw CalibrationError("calibrate_lgcp_ratio: alpha " + std::to_string(budget.alpha) +
                           " exceeds the grid ceiling " + std::to_string(out.alpha_max));
  }
  out.coefficient = kind == TessKind::triangular ? 544.0 : 104.0;
  out.r_max = budget.epsilon / side * std::sqrt(budget.delta / out.coefficient);
  return out;
}

double laplace_sensitivity(const std::vector<double>& cell_measures) {
  if (cell_measures.size() < 2) {
    throw std::invalid_argument("laplace_sensitivity: need at least two cells");
  }
  double m1 = std::numeric_limits<double>::infinity();
  double m2 = std::numeric_limits<double>::infinity();
  for (double m : cell_measures) {
    if (!(m > 0.0)) {
      throw std::invalid_argument("laplace_sensitivity: cell measures must be positive");
    }
    if (m < m1) {
      m2 = m1;
      m1 = m;
    } else if (m < m2) {
      m2 = m;
    }
  }
  return 1.0 / m1 + 1.0 / m2;
}

}  // namespace ppsynth
