#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <ppsynth/errors.hpp>
#include <ppsynth/geometry.hpp>
#include <ppsynth/intensity.hpp>
#include <ppsynth/network.hpp>
#include <ppsynth/privacy.hpp>
#include <ppsynth/rng.hpp>

#include "test_util.hpp"

using namespace ppsynth;

TEST_CASE("Poisson tail quantile agrees with a direct CDF oracle") {
  // k = poisson_tail_quantile(n, delta) must be the smallest k with
  // P(X > k) <= delta, i.e. the upper tail at k is within delta but the tail
  // at k - 1 is not.
  const std::vector<std::pair<double, double>> cases{
      {0.5, 0.1},  {1.0, 0.5},   {5.0, 0.01}, {20.0, 1e-4},
      {100.0, 0.05}, {1000.0, 1e-6}, {3.0, 0.9},  {250.0, 1e-9}};
  for (const auto& [n, delta] : cases) {
    const long long k = poisson_tail_quantile(n, delta);
    CHECK(k >= 0);
    CHECK(testutil::poisson_upper_tail(n, k) <= delta * (1.0 + 1e-9));
    if (k > 0) {
      CHECK(testutil::poisson_upper_tail(n, k - 1) > delta * (1.0 - 1e-9));
    }
  }

  CHECK(poisson_tail_quantile(0.0, 0.5) == 0);
  // With delta close to one almost no headroom is needed.
  CHECK(poisson_tail_quantile(1.0, 0.99) <= 1);
  CHECK_THROWS_AS(poisson_tail_quantile(-1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(poisson_tail_quantile(5.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(poisson_tail_quantile(5.0, 1.0), std::invalid_argument);
}

TEST_CASE("edge ratio bound dominates sampled coverage log differences") {
  Rng rng(31337);
  const RectDomain dom(0.0, 0.0, 1.0, 1.0);
  for (const double h : {0.05, 0.15, 0.4}) {
    for (const double alpha : {0.02, 0.1, 0.3}) {
      const double bound = edge_ratio_bound(dom, h, alpha);
      CHECK(bound >= 0.0);
      double worst = 0.0;
      for (int i = 0; i < 4000; ++i) {
        // Random pair at displacement <= alpha, both inside the window.
        const Point2 x{rng.uniform01(), rng.uniform01()};
        const double theta = rng.uniform(0.0, 2.0 * M_PI);
        const double rad = alpha * std::sqrt(rng.uniform01());
        Point2 y{x.x + rad * std::cos(theta), x.y + rad * std::sin(theta)};
        y.x = std::min(std::max(y.x, dom.x_min), dom.x_max);
        y.y = std::min(std::max(y.y, dom.y_min), dom.y_max);
        const double lcx = std::log(gaussian_coverage(dom, x, h));
        const double lcy = std::log(gaussian_coverage(dom, y, h));
        worst = std::max(worst, std::fabs(lcx - lcy));
      }
      CHECK(worst <= bound * (1.0 + 1e-9));
      // The bound is attainable up to discretization: corner-to-diagonal
      // displacements should get reasonably close for small alpha.
      if (alpha <= 0.1) {
        const Point2 corner{dom.x_min, dom.y_min};
        const Point2 inward{dom.x_min + alpha / std::sqrt(2.0), dom.y_min + alpha / std::sqrt(2.0)};
        const double realized = std::log(gaussian_coverage(dom, inward, h)) -
                                std::log(gaussian_coverage(dom, corner, h));
        CHECK(realized <= bound * (1.0 + 1e-9));
        CHECK(realized >= 0.25 * bound);
      }
    }
  }
  CHECK(edge_ratio_bound(dom, 0.2, 0.0) == 0.0);
  CHECK_THROWS_AS(edge_ratio_bound(dom, 0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(edge_ratio_bound(dom, 0.2, -0.1), std::invalid_argument);
}

TEST_CASE("kernel calibration meets the budget with a near-minimal bandwidth") {
  const RectDomain dom(0.0, 0.0, 1.0, 1.0);
  const double B = dom.diameter();
  for (const auto& [eps, delta, alpha, n] :
       std::vector<std::tuple<double, double, double, std::size_t>>{
           {1.0, 0.01, 0.01, 50}, {0.5, 0.05, 0.002, 200}, {5.0, 1e-3, 0.1, 20}}) {
    const PrivacyBudget budget{eps, delta, alpha};
    const KernelCalibration cal = calibrate_kernel(budget, dom, n);

    CHECK(cal.k == poisson_tail_quantile(static_cast<double>(n), delta));
    const double target = eps / static_cast<double>(cal.k);
    CHECK(cal.per_point == doctest::Approx(target).epsilon(1e-12));
    CHECK(cal.move_term ==
          doctest::Approx((2.0 * alpha * B + alpha * alpha) / (2.0 * cal.h * cal.h))
              .epsilon(1e-12));
    CHECK(cal.edge_term == doctest::Approx(edge_ratio_bound(dom, cal.h, alpha)).epsilon(1e-12));
    // Feasible at the returned bandwidth...
    CHECK(cal.move_term + cal.edge_term <= target * (1.0 + 1e-12));
    // ...and the movement term alone breaks the budget a hair below it, so h
    // is minimal up to the bisection tolerance.
    const double h_less = cal.h * (1.0 - 1e-5);
    const double cond_less = (2.0 * alpha * B + alpha * alpha) / (2.0 * h_less * h_less) +
                             edge_ratio_bound(dom, h_less, alpha);
    CHECK(cond_less > target);
    CHECK(cal.h <= B);
  }

  // Validation and infeasibility.
  CHECK_THROWS_AS(calibrate_kernel({0.0, 0.01, 0.05}, dom, 10), std::invalid_argument);
  CHECK_THROWS_AS(calibrate_kernel({1.0, 0.0, 0.05}, dom, 10), std::invalid_argument);
  CHECK_THROWS_AS(calibrate_kernel({1.0, 1.5, 0.05}, dom, 10), std::invalid_argument);
  CHECK_THROWS_AS(calibrate_kernel({1.0, 0.01, 0.0}, dom, 10), std::invalid_argument);
  CHECK_THROWS_AS(calibrate_kernel({1.0, 0.01, 2.0 * B}, dom, 10), std::invalid_argument);
  // A huge relocation radius with a tiny budget cannot be met by any h <= B.
  CHECK_THROWS_AS(calibrate_kernel({1e-3, 1e-6, B}, dom, 1000), CalibrationError);
  try {
    calibrate_kernel({1e-3, 1e-6, B}, dom, 1000);
  } catch (const CalibrationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("term") != std::string::npos);
  }
}

TEST_CASE("power covariance has the advertised entries") {
  const std::vector<Point2> pts{{0.0, 0.0}, {1.0, 0.0}, {0.0, 2.0}};
  const double sigma = 1.5, l = 0.8;
  for (const double p : {0.5, 1.0, 2.0}) {
    const Eigen::MatrixXd cov = power_covariance(pts, sigma, l, p);
    CHECK(cov.rows() == 3);
    for (int i = 0; i < 3; ++i) CHECK(cov(i, i) == doctest::Approx(sigma * sigma).epsilon(1e-15));
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double d = dist(pts[i], pts[j]);
        CHECK(cov(i, j) ==
              doctest::Approx(sigma * sigma * std::exp(-std::pow(d / l, p))).epsilon(1e-15));
        CHECK(cov(i, j) == cov(j, i));
      }
    }
    // Positive definite at these scales: all eigenvalues positive.
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(cov).eigenvalues();
    CHECK(ev.minCoeff() > 0.0);
  }
  CHECK_THROWS_AS(power_covariance(pts, 0.0, 1.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(power_covariance(pts, 1.0, 0.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(power_covariance(pts, 1.0, 1.0, 2.5), std::invalid_argument);
  CHECK_THROWS_AS(power_covariance(pts, 1.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("numeric delta bound matches a direct pair-sum oracle") {
  Rng rng(2718);
  for (int trial = 0; trial < 8; ++trial) {
    Rng sub = rng.split(trial);
    const double side = sub.uniform(0.5, 3.0);
    const RectDomain dom(0.0, 0.0, side, side);
    const int n = 2 + static_cast<int>(sub.uniform_index(4));
    const bool tri = sub.uniform01() < 0.5;
    const Tessellation tess = tri ? Tessellation::triangular(dom, n + 1, n + 1)
                                  : Tessellation::square(dom, n + 1, n + 1);
    std::vector<Point2> verts;
    for (int v = 0; v < tess.vertex_count(); ++v) verts.push_back(tess.vertex(v));
    const Eigen::MatrixXd cov = power_covariance(verts, sub.uniform(0.2, 2.0),
                                                 sub.uniform(0.2, 2.0), 2.0);
    const double alpha = sub.uniform(0.05, 0.9) * side;
    const double eps = sub.uniform(0.1, 5.0);

    double acc = 0.0;
    const auto& cells = tess.cells();
    for (std::size_t a = 0; a < cells.size(); ++a) {
      for (std::size_t b = a + 1; b < cells.size(); ++b) {
        if (tess.cell_set_distance(static_cast<int>(a), static_cast<int>(b)) >=
            alpha * (1.0 - 1e-12)) {
          continue;
        }
        double worst = 0.0;
        for (int i = 0; i < cells[a].size; ++i) {
          for (int j = 0; j < cells[b].size; ++j) {
            const int u = cells[a].v[i], v = cells[b].v[j];
            worst = std::max(worst, cov(u, u) + cov(v, v) - 2.0 * cov(u, v));
          }
        }
        acc += worst;
      }
    }
    const double want = 4.0 * acc / (eps * eps);
    CHECK(lgcp_delta_bound(tess, cov, alpha, eps) == doctest::Approx(want).epsilon(1e-12));
  }

  // Validation.
  const RectDomain dom(0.0, 0.0, 1.0, 1.0);
  const Tessellation tess = Tessellation::triangular(dom, 3, 3);
  const Eigen::MatrixXd wrong = Eigen::MatrixXd::Identity(4, 4);
  CHECK_THROWS_AS(lgcp_delta_bound(tess, wrong, 0.1, 1.0), std::invalid_argument);
  const Eigen::MatrixXd ok = Eigen::MatrixXd::Identity(tess.vertex_count(), tess.vertex_count());
  CHECK_THROWS_AS(lgcp_delta_bound(tess, ok, 0.1, 0.0), std::invalid_argument);
}

TEST_CASE("ratio calibration carries the closed-form constants") {
  const RectDomain dom(0.0, 0.0, 1.0, 1.0);
  // With coefficient c, the admissible ratio is eps/side * sqrt(delta/c);
  // at eps = 1, delta = 0.0544, side = 1 the triangular constant gives
  // exactly 0.01.
  const int n = 10;
  const PrivacyBudget budget{1.0, 0.0544, 1.0 / (n * std::sqrt(2.0))};
  const LgcpCalibration cal = calibrate_lgcp_ratio(budget, dom, TessKind::triangular, n);
  CHECK(cal.coefficient == 544.0);
  CHECK(cal.r_max == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(cal.alpha_max == doctest::Approx(1.0 / (n * std::sqrt(2.0))).epsilon(1e-12));

  const LgcpCalibration sq = calibrate_lgcp_ratio(budget, dom, TessKind::square, n);
  CHECK(sq.coefficient == 104.0);
  CHECK(sq.r_max == doctest::Approx(std::sqrt(0.0544 / 104.0)).epsilon(1e-12));

  // Scaling laws: r_max is linear in eps, sqrt in delta, 1/side in the
  // window size.
  const LgcpCalibration cal2 =
      calibrate_lgcp_ratio({2.0, 0.0544, budget.alpha}, dom, TessKind::triangular, n);
  CHECK(cal2.r_max == doctest::Approx(2.0 * cal.r_max).epsilon(1e-12));
  const RectDomain big(0.0, 0.0, 5.0, 5.0);
  const LgcpCalibration cal3 =
      calibrate_lgcp_ratio({1.0, 0.0544, budget.alpha}, big, TessKind::triangular, n);
  CHECK(cal3.r_max == doctest::Approx(cal.r_max / 5.0).epsilon(1e-12));

  // alpha above the grid ceiling is rejected.
  CHECK_THROWS_AS(
      calibrate_lgcp_ratio({1.0, 0.0544, 1.0 / (n * std::sqrt(2.0)) * 1.01}, dom,
                           TessKind::triangular, n),
      CalibrationError);
  CHECK_THROWS_AS(calibrate_lgcp_ratio({0.0, 0.5, 0.01}, dom, TessKind::triangular, n),
                  std::invalid_argument);
  CHECK_THROWS_AS(calibrate_lgcp_ratio({1.0, 0.0, 0.01}, dom, TessKind::triangular, n),
                  std::invalid_argument);
  CHECK_THROWS_AS(calibrate_lgcp_ratio({1.0, 0.5, 0.01}, dom, TessKind::triangular, 0),
                  std::invalid_argument);
}

TEST_CASE("histogram sensitivity picks the two smallest cells") {
  CHECK(laplace_sensitivity({1.0, 2.0, 4.0}) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(laplace_sensitivity({2.0, 2.0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(laplace_sensitivity({0.25, 4.0, 0.5}) == doctest::Approx(4.0 + 2.0).epsilon(1e-15));
  // Order must not matter.
  CHECK(laplace_sensitivity({4.0, 1.0, 2.0}) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK_THROWS_AS(laplace_sensitivity({1.0}), std::invalid_argument);
  CHECK_THROWS_AS(laplace_sensitivity({1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(laplace_sensitivity({1.0, -2.0}), std::invalid_argument);
}

TEST_CASE("network delta bound matches a shortest-path pair oracle") {
  // Y-shaped network plus a loop closing edge.
  std::vector<Point2> nodes{{0.0, 0.0}, {2.0, 0.0}, {2.0, 2.0}, {4.0, 0.0}, {4.0, 2.0}};
  const std::vector<std::pair<int, int>> edges{{0, 1}, {1, 2}, {1, 3}, {3, 4}, {2, 4}};
  const LinearNetwork net(nodes, edges);

  std::vector<Point2> npts;
  for (int v = 0; v < net.node_count(); ++v) npts.push_back(net.node(v));
  const Eigen::MatrixXd cov = power_covariance(npts, 1.2, 1.5, 1.0);

  Rng rng(515);
  for (int trial = 0; trial < 10; ++trial) {
    const double alpha = rng.uniform(0.1, 3.0);
    const double eps = rng.uniform(0.2, 4.0);

    double acc = 0.0;
    for (int i = 0; i < net.segment_count(); ++i) {
      for (int j = i + 1; j < net.segment_count(); ++j) {
        const auto& si = net.segment(i);
        const auto& sj = net.segment(j);
        double d = 0.0;
        const bool share = si.a == sj.a || si.a == sj.b || si.b == sj.a || si.b == sj.b;
        if (!share) {
          const auto da = net.node_distances_from(si.a);
          const auto db = net.node_distances_from(si.b);
          d = std::min(std::min(da[sj.a], da[sj.b]), std::min(db[sj.a], db[sj.b]));
        }
        if (d > alpha) continue;  // inclusive rule: pairs at exactly alpha stay in
        double worst = 0.0;
        for (const int u : {si.a, si.b}) {
          for (const int v : {sj.a, sj.b}) {
            worst = std::max(worst, cov(u, u) + cov(v, v) - 2.0 * cov(u, v));
          }
        }
        acc += worst;
      }
    }
    const double want = 4.0 * acc / (eps * eps);
    CHECK(lgcp_delta_bound_network(net, cov, alpha, eps) == doctest::Approx(want).epsilon(1e-12));
  }

  // Monotone in alpha.
  const double d1 = lgcp_delta_bound_network(net, cov, 0.5, 1.0);
  const double d2 = lgcp_delta_bound_network(net, cov, 2.5, 1.0);
  CHECK(d1 <= d2);

  CHECK_THROWS_AS(lgcp_delta_bound_network(net, cov, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(lgcp_delta_bound_network(net, cov, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(lgcp_delta_bound_network(net, Eigen::MatrixXd::Identity(3, 3), 0.5, 1.0),
                  std::invalid_argument);
}
