#include "ppsynth/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "ppsynth/errors.hpp"

namespace ppsynth {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

// Append the angular interval [a, b] (possibly wrapping) split into
// non-wrapping pieces on [0, 2pi).
void push_arc(std::vector<std::pair<double, double>>& arcs, double a, double b) {
  const double w = b - a;
  if (w <= 0.0) return;
  double start = std::fmod(a, kTwoPi);
  if (start < 0.0) start += kTwoPi;
  const double stop = start + w;
  if (stop <= kTwoPi) {
    arcs.emplace_back(start, stop);
  } else {
    arcs.emplace_back(start, kTwoPi);
    arcs.emplace_back(0.0, stop - kTwoPi);
  }
}

double merged_length(std::vector<std::pair<double, double>>& arcs) {
  if (arcs.empty()) return 0.0;
  std::sort(arcs.begin(), arcs.end());
  double total = 0.0;
  double cur_a = arcs[0].first, cur_b = arcs[0].second;
  for (std::size_t i = 1; i < arcs.size(); ++i) {
    if (arcs[i].first <= cur_b) {
      cur_b = std::max(cur_b, arcs[i].second);
    } else {
      total += cur_b - cur_a;
      cur_a = arcs[i].first;
      cur_b = arcs[i].second;
    }
  }
  total += cur_b - cur_a;
  return total;
}

}  // namespace

double circle_arc_fraction(const RectDomain& dom, const Point2& x, double d) {
  if (!(d > 0.0)) throw std::invalid_argument("circle_arc_fraction: radius must be positive");
  if (!dom.contains(x)) {
    throw std::invalid_argument("circle_arc_fraction: centre must lie in the window");
  }
  std::vector<std::pair<double, double>> arcs;
  arcs.reserve(8);

  // Right side: excluded where cos(theta) > (x_max - x) / d.
  const double ur = (dom.x_max - x.x) / d;
  if (ur < 1.0) {
    const double a = std::acos(std::max(-1.0, ur));
    push_arc(arcs, -a, a);
  }
  // Left side: excluded where cos(theta) < -(x - x_min) / d.
  const double ul = (x.x - dom.x_min) / d;
  if (ul < 1.0) {
    const double a = std::acos(std::max(-1.0, ul));  // acos of the magnitude
    push_arc(arcs, M_PI - a, M_PI + a);
  }
  // Top side: excluded where sin(theta) > (y_max - y) / d.
  const double ut = (dom.y_max - x.y) / d;
  if (ut < 1.0) {
    const double a = std::asin(std::min(1.0, std::max(-1.0, ut)));
    push_arc(arcs, a, M_PI - a);
  }
  // Bottom side: excluded where sin(theta) < -(y - y_min) / d.
  const double ub = (x.y - dom.y_min) / d;
  if (ub < 1.0) {
    const double a = std::asin(std::min(1.0, std::max(-1.0, ub)));
    push_arc(arcs, M_PI + a, kTwoPi - a);
  }

  const double excluded = merged_length(arcs);
  const double frac = 1.0 - excluded / kTwoPi;
  return std::min(1.0, std::max(0.0, frac));
}

std::vector<double> default_r_grid(const RectDomain& dom, int n) {
  std::vector<double> r(static_cast<std::size_t>(n));
  const double hi = dom.diameter() / 4.0;
  for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = hi * i / (n - 1);
  return r;
}

std::vector<double> default_r_grid(const LinearNetwork& net, int n) {
  std::vector<double> r(static_cast<std::size_t>(n));
  const double hi = net.diameter() / 4.0;
  for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = hi * i / (n - 1);
  return r;
}

namespace {

void check_r_grid(const std::vector<double>& r_grid) {
  if (r_grid.empty()) throw std::invalid_argument("K function: empty radius grid");
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    if (r_grid[i] < 0.0 || (i > 0 && r_grid[i] <= r_grid[i - 1])) {
      throw std::invalid_argument("K function: radius grid must be increasing and nonnegative");
    }
  }
}

// Accumulate sorted (distance, weight) contributions onto the radius grid.
KCurve sweep_pairs(std::vector<std::pair<double, double>>& contrib,
                   const std::vector<double>& r_grid, double norm) {
  std::sort(contrib.begin(), contrib.end());
  KCurve out;
  out.r = r_grid;
  out.k.resize(r_grid.size(), 0.0);
  double acc = 0.0;
  std::size_t p = 0;
  for (std::size_t g = 0; g < r_grid.size(); ++g) {
    while (p < contrib.size() && contrib[p].first <= r_grid[g]) {
      acc += contrib[p].second;
      ++p;
    }
    out.k[g] = acc * norm;
  }
  return out;
}

}  // namespace

KCurve khat_inhom(const RectDomain& dom, const std::vector<Point2>& pts,
                  const std::vector<double>& lambda, const std::vector<double>& r_grid) {
  check_r_grid(r_grid);
  if (lambda.size() != pts.size()) {
    throw std::invalid_argument("khat_inhom: need one intensity value per point");
  }
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!dom.contains(pts[i])) {
      throw std::invalid_argument("khat_inhom: point " + std::to_string(i) +
                                  " lies outside the window");
    }
    if (!(lambda[i] > 0.0)) {
      throw std::invalid_argument("khat_inhom: intensity vanishes at point " + std::to_string(i));
    }
  }
  if (n < 2) {
    KCurve out;
    out.r = r_grid;
    out.k.assign(r_grid.size(), 0.0);
    return out;
  }

  const double r_max = r_grid.back();
  std::vector<std::pair<double, double>> contrib;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = dist(pts[i], pts[j]);
      if (d > r_max || d <= 0.0) continue;
      const double p = circle_arc_fraction(dom, pts[i], d);
      if (p <= 0.0) continue;  // degenerate sliver: excluded pair
      contrib.emplace_back(d, 1.0 / (lambda[i] * lambda[j] * p));
    }
  }
  return sweep_pairs(contrib, r_grid, 1.0 / dom.area());
}

namespace {

// Step representation of r -> #{v : d(u, v) = r}: each tent side is one
// half-open interval [entry distance, apex), and exact apex hits add the
// apex point once.
struct PerimeterSteps {
  std::vector<double> starts;
  std::vector<double> ends;
  std::vector<double> apexes;

  void finish() {
    std::sort(starts.begin(), starts.end());
    std::sort(ends.begin(), ends.end());
    std::sort(apexes.begin(), apexes.end());
  }

  int count(double r) const {
    const auto leq = [r](const std::vector<double>& v) {
      return std::upper_bound(v.begin(), v.end(), r) - v.begin();
    };
    const auto exact = std::equal_range(apexes.begin(), apexes.end(), r);
    return static_cast<int>(leq(starts) - leq(ends) + (exact.second - exact.first));
  }

  void add_tent(double da, double db, double len) {
    if (len <= 0.0) return;
    const double apex = 0.5 * (da + db + len);
    if (apex > da) {
      starts.push_back(da);
      ends.push_back(apex);
    }
    if (apex > db) {
      starts.push_back(db);
      ends.push_back(apex);
    }
    apexes.push_back(apex);
  }
};

PerimeterSteps build_perimeter_steps(const LinearNetwork& net, const NetworkLoc& u,
                                     const std::vector<double>& node_dist) {
  PerimeterSteps steps;
  for (int s = 0; s < net.segment_count(); ++s) {
    const auto& seg = net.segment(s);
    if (s == u.seg) {
      // Split the containing segment at u; each side is its own tent with u
      // at distance zero.
      steps.add_tent(0.0, node_dist[seg.a], u.offset);
      steps.add_tent(0.0, node_dist[seg.b], seg.length - u.offset);
    } else {
      steps.add_tent(node_dist[seg.a], node_dist[seg.b], seg.length);
    }
  }
  steps.finish();
  return steps;
}

double pair_distance(const LinearNetwork& net, const std::vector<double>& node_dist,
                     const NetworkLoc& from, const NetworkLoc& to) {
  const auto& seg = net.segment(to.seg);
  double d = std::min(node_dist[seg.a] + to.offset, node_dist[seg.b] + seg.length - to.offset);
  if (from.seg == to.seg) d = std::min(d, std::abs(from.offset - to.offset));
  return d;
}

enum class NetKKind { corrected, inhom, uncorrected };

KCurve khat_network_core(const LinearNetwork& net, const std::vector<NetworkLoc>& pts,
                         const std::vector<double>* lambda, const std::vector<double>& r_grid,
                         NetKKind kind) {
  check_r_grid(r_grid);
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!net.valid_loc(pts[i])) {
      throw std::invalid_argument("khat_network: point " + std::to_string(i) +
                                  " lies off the network");
    }
  }
  if (kind == NetKKind::inhom) {
    if (!lambda || lambda->size() != n) {
      throw std::invalid_argument("khat_network: need one intensity value per point");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!((*lambda)[i] > 0.0)) {
        throw std::invalid_argument("khat_network: intensity vanishes at point " +
                                    std::to_string(i));
      }
    }
  }
  KCurve zero;
  zero.r = r_grid;
  zero.k.assign(r_grid.size(), 0.0);
  if (n < 2) return zero;

  const double r_max = r_grid.back();
  std::vector<std::pair<double, double>> contrib;
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> nd = net.distances_from(pts[i]);
    PerimeterSteps steps;
    if (kind != NetKKind::uncorrected) steps = build_perimeter_steps(net, pts[i], nd);
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = pair_distance(net, nd, pts[i], pts[j]);
      if (d > r_max) continue;
      double w = 1.0;
      if (kind != NetKKind::uncorrected) {
        int m = steps.count(d);
        if (m <= 0 && d == 0.0) m = 1;  // coincident points
        if (m <= 0) {
          throw NumericalError("khat_network: perimeter count vanished at a realized distance");
        }
        w = 1.0 / m;
      }
      if (kind == NetKKind::inhom) w /= (*lambda)[i] * (*lambda)[j];
      contrib.emplace_back(d, w);
    }
  }

  double norm = 0.0;
  if (kind == NetKKind::inhom) {
    double denom = 0.0;
    for (double l : *lambda) denom += 1.0 / l;
    norm = 1.0 / denom;
  } else {
    norm = net.total_length() / (static_cast<double>(n) * (static_cast<double>(n) - 1.0));
  }
  return sweep_pairs(contrib, r_grid, norm);
}

}  // namespace

int perimeter_count(const LinearNetwork& net, const NetworkLoc& u, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("perimeter_count: radius must be positive");
  if (!net.valid_loc(u)) throw std::invalid_argument("perimeter_count: location off the network");
  const std::vector<double> nd = net.distances_from(u);
  return build_perimeter_steps(net, u, nd).count(r);
}

KCurve khat_network(const LinearNetwork& net, const std::vector<NetworkLoc>& pts,
                    const std::vector<double>& r_grid) {
  return khat_network_core(net, pts, nullptr, r_grid, NetKKind::corrected);
}

KCurve khat_network_inhom(const LinearNetwork& net, const std::vector<NetworkLoc>& pts,
                          const std::vector<double>& lambda, const std::vector<double>& r_grid) {
  return khat_network_core(net, pts, &lambda, r_grid, NetKKind::inhom);
}

KCurve khat_network_uncorrected(const LinearNetwork& net, const std::vector<NetworkLoc>& pts,
                                const std::vector<double>& r_grid) {
  return khat_network_core(net, pts, nullptr, r_grid, NetKKind::uncorrected);
}

double pmse(const std::vector<double>& lam_ori, const std::vector<double>& lam_syn,
            double mass_ori, double mass_syn, std::size_t n_ori) {
  if (lam_ori.size() != lam_syn.size()) {
    throw std::invalid_argument("pmse: intensity vectors must cover the same pooled points");
  }
  if (n_ori > lam_ori.size()) {
    throw std::invalid_argument("pmse: original count exceeds the pooled size");
  }
  if (mass_ori < 0.0 || mass_syn < 0.0) {
    throw std::invalid_argument("pmse: masses must be nonnegative");
  }
  const std::size_t total = lam_ori.size();
  if (total == 0) return 0.0;
  const double c = static_cast<double>(total - n_ori) / static_cast<double>(total);

  double acc = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    if (!(lam_ori[i] >= 0.0) || !(lam_syn[i] >= 0.0)) {
      throw std::invalid_argument("pmse: intensities must be nonnegative and finite");
    }
    const double f_ori = mass_ori > 0.0 ? lam_ori[i] / mass_ori : 0.0;
    const double f_syn = mass_syn > 0.0 ? lam_syn[i] / mass_syn : 0.0;
    const double denom = f_ori + f_syn;
    const double p = denom > 0.0 ? f_syn / denom : 0.5;
    acc += (p - c) * (p - c);
  }
  return acc / static_cast<double>(total);
}

double mise(const KCurve& k_ori, const std::vector<KCurve>& k_syn) {
  if (k_ori.r.size() != k_ori.k.size() || k_ori.r.empty()) {
    throw std::invalid_argument("mise: malformed original curve");
  }
  if (k_syn.empty()) throw std::invalid_argument("mise: need at least one synthetic curve");
  for (const auto& c : k_syn) {
    if (c.r.size() != k_ori.r.size() || c.k.size() != c.r.size()) {
      throw std::invalid_argument("mise: curves must share the radius grid");
    }
    for (std::size_t i = 0; i < c.r.size(); ++i) {
      if (std::abs(c.r[i] - k_ori.r[i]) > 1e-12 * std::max(1.0, std::abs(k_ori.r[i]))) {
        throw std::invalid_argument("mise: curves must share the radius grid");
      }
    }
  }

  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < k_ori.k.size(); ++i) {
    if (k_ori.k[i] > 0.0) idx.push_back(i);
  }
  if (idx.size() < 2) {
    throw NumericalError("mise: the original K function is zero on the whole grid");
  }

  double acc = 0.0;
  for (const auto& c : k_syn) {
    double integral = 0.0;
    for (std::size_t t = 0; t + 1 < idx.size(); ++t) {
      const std::size_t i = idx[t], j = idx[t + 1];
      const double gi = c.k[i] / k_ori.k[i] - 1.0;
      const double gj = c.k[j] / k_ori.k[j] - 1.0;
      integral += 0.5 * (gi * gi + gj * gj) * (k_ori.r[j] - k_ori.r[i]);
    }
    acc += integral;
  }
  return acc / static_cast<double>(k_syn.size());
}

}  // namespace ppsynth
