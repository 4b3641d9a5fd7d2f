#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <ppsynth/errors.hpp>
#include <ppsynth/evaluation.hpp>
#include <ppsynth/geometry.hpp>
#include <ppsynth/network.hpp>
#include <ppsynth/rng.hpp>
#include <ppsynth/samplers.hpp>

#include "test_util.hpp"

using namespace ppsynth;

namespace {

// Dense angular sweep: fraction of directions whose circle point stays in the
// window.  Midpoint grid, so the error is bounded by the number of arc
// endpoints (at most 8) times the grid spacing.
double arc_fraction_oracle(const RectDomain& dom, const Point2& x, double d) {
  const int n = 200000;
  int in = 0;
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * M_PI * (i + 0.5) / n;
    const Point2 p{x.x + d * std::cos(t), x.y + d * std::sin(t)};
    if (dom.contains(p)) ++in;
  }
  return static_cast<double>(in) / n;
}

}  // namespace

TEST_CASE("circle arc fraction: exact anchors and a sweep oracle") {
  const RectDomain dom(0.0, 0.0, 1.0, 1.0);

  // Interior circle entirely inside: fraction one.
  CHECK(circle_arc_fraction(dom, {0.5, 0.5}, 0.4) == doctest::Approx(1.0).epsilon(1e-15));
  // Corner point with a small radius keeps exactly a quarter of the circle.
  CHECK(circle_arc_fraction(dom, {0.0, 0.0}, 0.3) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(circle_arc_fraction(dom, {1.0, 1.0}, 0.2) == doctest::Approx(0.25).epsilon(1e-12));
  // Edge midpoint with a small radius keeps half.
  CHECK(circle_arc_fraction(dom, {0.5, 0.0}, 0.3) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(circle_arc_fraction(dom, {0.0, 0.5}, 0.3) == doctest::Approx(0.5).epsilon(1e-12));
  // A radius beyond the diameter leaves nothing.
  CHECK(circle_arc_fraction(dom, {0.5, 0.5}, 5.0) == doctest::Approx(0.0).epsilon(1e-15));

  // Random centres and radii against the direction sweep; the sweep's
  // discretization error is below 4e-5.
  Rng rng(4242);
  for (int i = 0; i < 40; ++i) {
    const Point2 x{rng.uniform01(), rng.uniform01()};
    const double d = rng.uniform(0.02, 1.2);
    CHECK(std::abs(circle_arc_fraction(dom, x, d) - arc_fraction_oracle(dom, x, d)) < 5e-5);
  }

  // Rectangles that are not squares work the same way.
  const RectDomain wide(-1.0, 2.0, 5.0, 3.0);
  for (int i = 0; i < 15; ++i) {
    const Point2 x{wide.x_min + rng.uniform01() * wide.width(),
                   wide.y_min + rng.uniform01() * wide.height()};
    const double d = rng.uniform(0.05, 2.0);
    CHECK(std::abs(circle_arc_fraction(wide, x, d) - arc_fraction_oracle(wide, x, d)) < 5e-5);
  }

  CHECK_THROWS_AS(circle_arc_fraction(dom, {0.5, 0.5}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(circle_arc_fraction(dom, {1.5, 0.5}, 0.1), std::invalid_argument);
}

TEST_CASE("default radius grids span a quarter of the diameter") {
  const RectDomain dom(0.0, 0.0, 3.0, 4.0);  // diameter 5
  const auto r = default_r_grid(dom);
  REQUIRE(r.size() == 50);
  CHECK(r.front() == 0.0);
  CHECK(r.back() == doctest::Approx(1.25).epsilon(1e-12));
  for (std::size_t i = 1; i < r.size(); ++i) {
    CHECK(r[i] - r[i - 1] == doctest::Approx(1.25 / 49.0).epsilon(1e-9));
  }
  const auto r10 = default_r_grid(dom, 10);
  CHECK(r10.size() == 10);
  CHECK(r10.back() == doctest::Approx(1.25).epsilon(1e-12));

  std::vector<Point2> nodes{{0.0, 0.0}, {3.0, 0.0}, {3.0, 4.0}};
  const LinearNetwork net(nodes, {{0, 1}, {1, 2}});  // diameter 7
  const auto rn = default_r_grid(net);
  CHECK(rn.front() == 0.0);
  CHECK(rn.back() == doctest::Approx(7.0 / 4.0).epsilon(1e-12));
}

TEST_CASE("planar K function: exact two-point jump and zero at the origin") {
  const RectDomain dom(0.0, 0.0, 1.0, 1.0);
  // Two interior points whose correction circles stay inside the window.
  const std::vector<Point2> pts{{0.4, 0.5}, {0.6, 0.5}};  // distance 0.2
  const double lam = 2.0;
  const std::vector<double> lambda{lam, lam};
  const std::vector<double> r{0.0, 0.1, 0.19, 0.2, 0.3};

  const KCurve k = khat_inhom(dom, pts, lambda, r);
  REQUIRE(k.k.size() == 5);
  CHECK(k.k[0] == 0.0);   // K(0) = 0 exactly
  CHECK(k.k[1] == 0.0);   // below the pair distance
  CHECK(k.k[2] == 0.0);
  // Both ordered pairs enter at r = 0.2 with weight 1/lam^2 and correction 1.
  const double want = 2.0 / (dom.area() * lam * lam);
  CHECK(k.k[3] == doctest::Approx(want).epsilon(1e-12));
  CHECK(k.k[4] == doctest::Approx(want).epsilon(1e-12));

  // A pair near the edge gets up-weighted by the clipped circle.
  const std::vector<Point2> edge_pts{{0.0, 0.5}, {0.2, 0.5}};
  const KCurve ke = khat_inhom(dom, edge_pts, lambda, r);
  const double p0 = circle_arc_fraction(dom, edge_pts[0], 0.2);  // half circle
  const double p1 = circle_arc_fraction(dom, edge_pts[1], 0.2);  // full circle
  CHECK(p0 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(ke.k[3] ==
        doctest::Approx((1.0 / p0 + 1.0 / p1) / (dom.area() * lam * lam)).epsilon(1e-12));

  // Coincident points are skipped rather than counted at distance zero.
  const std::vector<Point2> dup{{0.5, 0.5}, {0.5, 0.5}};
  const KCurve kd = khat_inhom(dom, dup, lambda, r);
  for (const double v : kd.k) CHECK(v == 0.0);

  // Fewer than two points: a zero curve on the same grid.
  const KCurve k1 = khat_inhom(dom, {{0.5, 0.5}}, {1.0}, r);
  for (const double v : k1.k) CHECK(v == 0.0);

  // Validation.
  CHECK_THROWS_AS(khat_inhom(dom, pts, {1.0}, r), std::invalid_argument);
  CHECK_THROWS_AS(khat_inhom(dom, pts, {1.0, 0.0}, r), std::invalid_argument);
  try {
    khat_inhom(dom, pts, {1.0, 0.0}, r);
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("1") != std::string::npos);
  }
  CHECK_THROWS_AS(khat_inhom(dom, {{2.0, 0.5}, {0.5, 0.5}}, lambda, r), std::invalid_argument);
  CHECK_THROWS_AS(khat_inhom(dom, pts, lambda, {0.2, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(khat_inhom(dom, pts, lambda, {}), std::invalid_argument);
}

TEST_CASE("planar K function tracks pi r^2 under uniform randomness") {
  const RectDomain dom(0.0, 0.0, 1.0, 1.0);
  const double rate = 100.0;
  const std::vector<double> r{0.05, 0.1, 0.15, 0.2};
  Rng rng(987654);
  const int reps = 80;
  std::vector<double> acc(r.size(), 0.0);
  for (int rep = 0; rep < reps; ++rep) {
    Rng sub = rng.split(rep);
    const PointPattern p = sample_homogeneous(dom, rate, sub);
    if (p.size() < 2) continue;
    const std::vector<double> lambda(p.size(), rate);
    const KCurve k = khat_inhom(dom, p.points, lambda, r);
    for (std::size_t i = 0; i < r.size(); ++i) acc[i] += k.k[i];
  }
  for (std::size_t i = 0; i < r.size(); ++i) {
    CHECK(acc[i] / reps == doctest::Approx(M_PI * r[i] * r[i]).epsilon(0.08));
  }
}

TEST_CASE("perimeter counts follow the tent construction") {
  // Single segment of length 3, interior point at offset 1.
  std::vector<Point2> duo{{0.0, 0.0}, {3.0, 0.0}};
  const LinearNetwork seg(duo, {{0, 1}});
  const NetworkLoc u{0, 1.0};
  CHECK(perimeter_count(seg, u, 0.5) == 2);   // both directions inside
  CHECK(perimeter_count(seg, u, 1.0) == 2);   // node hit + interior point
  CHECK(perimeter_count(seg, u, 1.5) == 1);   // only the long side remains
  CHECK(perimeter_count(seg, u, 2.0) == 1);   // exactly the far end
  CHECK(perimeter_count(seg, u, 2.5) == 0);   // off the network

  // Y-shaped network: three unit legs from a centre.
  std::vector<Point2> ynodes{{0.0, 0.0}, {1.0, 0.0}, {-0.5, 0.8}, {-0.5, -0.8}};
  // Normalize legs 2 and 3 to unit length.
  ynodes[2] = {-std::sqrt(0.5), std::sqrt(0.5)};
  ynodes[3] = {-std::sqrt(0.5), -std::sqrt(0.5)};
  const LinearNetwork y(ynodes, {{0, 1}, {0, 2}, {0, 3}});
  const NetworkLoc leaf{0, 1.0};  // at the end of the first leg
  CHECK(perimeter_count(y, leaf, 0.5) == 1);   // inward only
  CHECK(perimeter_count(y, leaf, 1.5) == 2);   // half way down the other legs
  CHECK(perimeter_count(y, leaf, 2.5) == 0);

  // A point at the centre sees all three legs.
  const NetworkLoc centre{0, 0.0};
  CHECK(perimeter_count(y, centre, 0.5) == 3);

  CHECK_THROWS_AS(perimeter_count(seg, u, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(perimeter_count(seg, NetworkLoc{0, 9.0}, 0.5), std::invalid_argument);
}

TEST_CASE("network K function: exact two-point value and the intensity identity") {
  std::vector<Point2> duo{{0.0, 0.0}, {3.0, 0.0}};
  const LinearNetwork net(duo, {{0, 1}});
  const std::vector<NetworkLoc> pts{{0, 1.0}, {0, 2.0}};  // distance 1
  const std::vector<double> r{0.0, 0.5, 1.0, 1.4};

  const KCurve k = khat_network(net, pts, r);
  CHECK(k.k[0] == 0.0);
  CHECK(k.k[1] == 0.0);
  // Both perimeter counts at the pair distance are 2, so each ordered pair
  // contributes 1/2 and the normalization |L|/(n(n-1)) = 3/2 gives L/2.
  CHECK(k.k[2] == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(k.k[3] == doctest::Approx(1.5).epsilon(1e-12));

  // With the constant intensity (n-1)/|L| the inhomogeneous variant equals
  // the corrected one identically.
  const double lam = (2.0 - 1.0) / 3.0;
  const KCurve ki = khat_network_inhom(net, pts, {lam, lam}, r);
  for (std::size_t i = 0; i < r.size(); ++i) {
    CHECK(ki.k[i] == doctest::Approx(k.k[i]).epsilon(1e-12));
  }

  // The uncorrected variant counts the pair with weight one:
  // |L|/(n(n-1)) * 2 = 3.
  const KCurve ku = khat_network_uncorrected(net, pts, r);
  CHECK(ku.k[2] == doctest::Approx(3.0).epsilon(1e-12));

  // Coincident network points count once with unit weight.
  const std::vector<NetworkLoc> dup{{0, 1.0}, {0, 1.0}};
  const KCurve kd = khat_network(net, dup, r);
  CHECK(kd.k[0] == doctest::Approx(net.total_length() / 2.0).epsilon(1e-12));

  // Validation.
  CHECK_THROWS_AS(khat_network(net, {{0, 5.0}, {0, 1.0}}, r), std::invalid_argument);
  CHECK_THROWS_AS(khat_network_inhom(net, pts, {lam}, r), std::invalid_argument);
  CHECK_THROWS_AS(khat_network_inhom(net, pts, {lam, 0.0}, r), std::invalid_argument);
}

TEST_CASE("network K function is close to r for uniform points on a segment") {
  std::vector<Point2> duo{{0.0, 0.0}, {10.0, 0.0}};
  const LinearNetwork net(duo, {{0, 1}});
  const std::vector<double> r{0.25, 0.5, 1.0, 1.5};
  Rng rng(246810);
  const int reps = 150;
  std::vector<double> acc(r.size(), 0.0), acc_unc(r.size(), 0.0);
  int used = 0;
  for (int rep = 0; rep < reps; ++rep) {
    Rng sub = rng.split(rep);
    const PointPattern p = sample_homogeneous(net, 4.0, sub);
    if (p.size() < 2) continue;
    ++used;
    const KCurve k = khat_network(net, p.net_locs, r);
    const KCurve ku = khat_network_uncorrected(net, p.net_locs, r);
    for (std::size_t i = 0; i < r.size(); ++i) {
      acc[i] += k.k[i];
      acc_unc[i] += ku.k[i];
    }
  }
  REQUIRE(used > 100);
  for (std::size_t i = 0; i < r.size(); ++i) {
    // Corrected: unbiased for r.  Uncorrected on a single long segment:
    // roughly twice that.
    CHECK(acc[i] / used == doctest::Approx(r[i]).epsilon(0.06));
    CHECK(acc_unc[i] / used == doctest::Approx(2.0 * r[i]).epsilon(0.12));
  }
}

TEST_CASE("propensity score error: exact anchors and invariances") {
  // Identical normalized densities: every propensity is 1/2 and with equal
  // counts the baseline is 1/2 too, so the score is exactly zero.
  const std::vector<double> a{2.0, 3.0, 4.0, 5.0};
  const std::vector<double> b{4.0, 6.0, 8.0, 10.0};  // same shape, double mass
  CHECK(pmse(a, b, 7.0, 14.0, 2) == doctest::Approx(0.0).epsilon(1e-15));

  // Disjoint supports with equal counts: propensities are 0 or 1, each term
  // (1/2)^2, so the mean is exactly 1/4.
  const std::vector<double> ori{1.0, 1.0, 0.0, 0.0};
  const std::vector<double> syn{0.0, 0.0, 1.0, 1.0};
  CHECK(pmse(ori, syn, 2.0, 2.0, 2) == doctest::Approx(0.25).epsilon(1e-15));

  // Hand-computed asymmetric case: three pooled points, one original.
  // Normalized densities are equal, so p = 1/2 and c = 2/3: each term is
  // 1/36.
  CHECK(pmse({4.0, 4.0, 4.0}, {2.0, 2.0, 2.0}, 8.0, 4.0, 1) ==
        doctest::Approx(1.0 / 36.0).epsilon(1e-15));

  // Invariance to rescaling one intensity together with its mass.
  const double base = pmse({1.0, 2.0, 3.0}, {3.0, 1.0, 2.0}, 6.0, 6.0, 1);
  CHECK(pmse({1.0, 2.0, 3.0}, {21.0, 7.0, 14.0}, 6.0, 42.0, 1) ==
        doctest::Approx(base).epsilon(1e-12));

  // Where both normalized densities vanish the propensity defaults to 1/2.
  CHECK(pmse({0.0, 1.0}, {0.0, 1.0}, 1.0, 1.0, 1) == doctest::Approx(0.0).epsilon(1e-15));

  // Zero-mass synthetic intensity: f_syn = 0 everywhere, p = 0, c = 1/2.
  CHECK(pmse({1.0, 1.0}, {0.0, 0.0}, 2.0, 0.0, 1) == doctest::Approx(0.25).epsilon(1e-15));

  // Empty pooled set scores zero.
  CHECK(pmse({}, {}, 0.0, 0.0, 0) == 0.0);

  // Validation.
  CHECK_THROWS_AS(pmse({1.0}, {1.0, 2.0}, 1.0, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(pmse({1.0}, {1.0}, 1.0, 1.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(pmse({-1.0}, {1.0}, 1.0, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(pmse({1.0}, {1.0}, -1.0, 1.0, 1), std::invalid_argument);
}

TEST_CASE("integrated relative K error: exact anchors and a closed form") {
  KCurve ori;
  ori.r = {0.0, 0.5, 1.0, 1.5, 2.0};
  ori.k = {0.0, 0.3, 0.9, 1.8, 3.1};

  // Identical curve: zero.
  CHECK(mise(ori, {ori}) == doctest::Approx(0.0).epsilon(1e-15));

  // Doubling the curve makes the relative error one everywhere, so the
  // integral is the covered radius range (positive part of the grid only).
  KCurve twice = ori;
  for (double& v : twice.k) v *= 2.0;
  CHECK(mise(ori, {twice}) == doctest::Approx(1.5).epsilon(1e-12));

  // Mean over synthetic curves.
  CHECK(mise(ori, {ori, twice}) == doctest::Approx(0.75).epsilon(1e-12));

  // Ratio offset linear in r: relative error g = 0.2 r, trapezoid evaluated
  // independently over the positive subgrid {0.5, 1, 1.5, 2}.
  KCurve ramp = ori;
  for (std::size_t i = 0; i < ramp.k.size(); ++i) ramp.k[i] *= 1.0 + 0.2 * ramp.r[i];
  double want = 0.0;
  for (std::size_t i = 1; i + 1 < ori.r.size(); ++i) {
    const double gi = 0.2 * ori.r[i], gj = 0.2 * ori.r[i + 1];
    want += 0.5 * (gi * gi + gj * gj) * (ori.r[i + 1] - ori.r[i]);
  }
  CHECK(mise(ori, {ramp}) == doctest::Approx(want).epsilon(1e-12));

  // Validation: zero curve, too-short positive part, grid mismatch.
  KCurve flat;
  flat.r = ori.r;
  flat.k = {0.0, 0.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(mise(flat, {ori}), NumericalError);
  KCurve tiny;
  tiny.r = ori.r;
  tiny.k = {0.0, 0.0, 0.0, 0.0, 1.0};
  CHECK_THROWS_AS(mise(tiny, {ori}), NumericalError);
  KCurve other = ori;
  other.r[2] += 0.1;
  CHECK_THROWS_AS(mise(ori, {other}), std::invalid_argument);
  CHECK_THROWS_AS(mise(ori, {}), std::invalid_argument);
  KCurve shorter;
  shorter.r = {0.0, 0.5};
  shorter.k = {0.0, 0.3};
  CHECK_THROWS_AS(mise(ori, {shorter}), std::invalid_argument);
}
