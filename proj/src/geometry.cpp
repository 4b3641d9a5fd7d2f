#include "ppsynth/geometry.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ppsynth {

RectDomain::RectDomain(double x0, double y0, double x1, double y1)
    : x_min(x0), y_min(y0), x_max(x1), y_max(y1) {
  if (!(x_max > x_min) || !(y_max > y_min)) {
    throw std::invalid_argument("RectDomain: extents must be positive in both axes");
  }
  if (!std::isfinite(x_min) || !std::isfinite(y_min) || !std::isfinite(x_max) ||
      !std::isfinite(y_max)) {
    throw std::invalid_argument("RectDomain: coordinates must be finite");
  }
}

Tessellation::Tessellation(TessKind kind, const RectDomain& dom, int knots_x, int knots_y)
    : kind_(kind), dom_(dom), nx_(knots_x - 1), ny_(knots_y - 1) {
  if (knots_x < 2 || knots_y < 2) {
    throw std::invalid_argument("Tessellation: need at least 2 knots per axis");
  }
  sx_ = dom.width() / nx_;
  sy_ = dom.height() / ny_;

  cells_.reserve(static_cast<std::size_t>(nx_) * ny_ * (kind == TessKind::triangular ? 2 : 1));
  auto vid = [this](int ix, int iy) { return iy * (nx_ + 1) + ix; };
  for (int iy = 0; iy < ny_; ++iy) {
    for (int ix = 0; ix < nx_; ++ix) {
      const int bl = vid(ix, iy), br = vid(ix + 1, iy);
      const int tr = vid(ix + 1, iy + 1), tl = vid(ix, iy + 1);
      if (kind == TessKind::triangular) {
        // Lower-left -> upper-right diagonal: lower/right triangle first.
        cells_.push_back(Cell{{bl, br, tr, 0}, 3});
        cells_.push_back(Cell{{bl, tr, tl, 0}, 3});
      } else {
        cells_.push_back(Cell{{bl, br, tr, tl}, 4});
      }
    }
  }
  build_dual_areas();
}

Tessellation Tessellation::triangular(const RectDomain& dom, int knots_x, int knots_y) {
  return Tessellation(TessKind::triangular, dom, knots_x, knots_y);
}

Tessellation Tessellation::square(const RectDomain& dom, int knots_x, int knots_y) {
  return Tessellation(TessKind::square, dom, knots_x, knots_y);
}

Point2 Tessellation::vertex(int i) const {
  const int ix = i % (nx_ + 1);
  const int iy = i / (nx_ + 1);
  return {dom_.x_min + sx_ * ix, dom_.y_min + sy_ * iy};
}

double Tessellation::cell_measure(int /*cell*/) const {
  const double sq = sx_ * sy_;
  return kind_ == TessKind::triangular ? 0.5 * sq : sq;
}

namespace {

double quad_area(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  return polygon_area({a, b, c, d});
}

Point2 midpoint(const Point2& a, const Point2& b) { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }

// Circumcenter of a triangle; for the right triangles used here this is the
// midpoint of the hypotenuse, so the corner pieces below tile each cell.
Point2 circumcenter(const Point2& a, const Point2& b, const Point2& c) {
  const double d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
  const double a2 = a.x * a.x + a.y * a.y;
  const double b2 = b.x * b.x + b.y * b.y;
  const double c2 = c.x * c.x + c.y * c.y;
  return {(a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d,
          (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d};
}

}  // namespace

void Tessellation::build_dual_areas() {
  dual_areas_.assign(vertex_count(), 0.0);
  for (const Cell& c : cells_) {
    if (c.size == 3) {
      const Point2 p0 = vertex(c.v[0]), p1 = vertex(c.v[1]), p2 = vertex(c.v[2]);
      const Point2 cc = circumcenter(p0, p1, p2);
      dual_areas_[c.v[0]] += quad_area(p0, midpoint(p0, p1), cc, midpoint(p0, p2));
      dual_areas_[c.v[1]] += quad_area(p1, midpoint(p1, p2), cc, midpoint(p1, p0));
      dual_areas_[c.v[2]] += quad_area(p2, midpoint(p2, p0), cc, midpoint(p2, p1));
    } else {
      const Point2 p0 = vertex(c.v[0]), p1 = vertex(c.v[1]);
      const Point2 p2 = vertex(c.v[2]), p3 = vertex(c.v[3]);
      const Point2 ctr{0.25 * (p0.x + p1.x + p2.x + p3.x), 0.25 * (p0.y + p1.y + p2.y + p3.y)};
      dual_areas_[c.v[0]] += quad_area(p0, midpoint(p0, p1), ctr, midpoint(p0, p3));
      dual_areas_[c.v[1]] += quad_area(p1, midpoint(p1, p2), ctr, midpoint(p1, p0));
      dual_areas_[c.v[2]] += quad_area(p2, midpoint(p2, p3), ctr, midpoint(p2, p1));
      dual_areas_[c.v[3]] += quad_area(p3, midpoint(p3, p0), ctr, midpoint(p3, p2));
    }
  }
}

int Tessellation::locate(const Point2& p) const {
  if (!dom_.contains(p)) {
    throw std::invalid_argument("Tessellation::locate: point (" + std::to_string(p.x) + "," +
                                std::to_string(p.y) + ") outside domain");
  }
  int ix = static_cast<int>((p.x - dom_.x_min) / sx_);
  int iy = static_cast<int>((p.y - dom_.y_min) / sy_);
  ix = std::clamp(ix, 0, nx_ - 1);
  iy = std::clamp(iy, 0, ny_ - 1);
  const int square_idx = iy * nx_ + ix;
  if (kind_ == TessKind::square) return square_idx;
  const double u = (p.x - dom_.x_min) / sx_ - ix;
  const double v = (p.y - dom_.y_min) / sy_ - iy;
  return 2 * square_idx + (u >= v ? 0 : 1);
}

BasisEval Tessellation::eval_basis(const Point2& p) const {
  BasisEval out;
  out.cell = locate(p);
  const Cell& c = cells_[out.cell];
  out.count = c.size;
  for (int i = 0; i < c.size; ++i) out.vertex[i] = c.v[i];

  if (c.size == 3) {
    const Point2 a = vertex(c.v[0]), b = vertex(c.v[1]), d = vertex(c.v[2]);
    const double det = (b.x - a.x) * (d.y - a.y) - (d.x - a.x) * (b.y - a.y);
    const double w1 = ((p.x - a.x) * (d.y - a.y) - (d.x - a.x) * (p.y - a.y)) / det;
    const double w2 = ((b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y)) / det;
    out.weight = {1.0 - w1 - w2, w1, w2, 0.0};
  } else {
    const Point2 a = vertex(c.v[0]);
    const double u = std::clamp((p.x - a.x) / sx_, 0.0, 1.0);
    const double v = std::clamp((p.y - a.y) / sy_, 0.0, 1.0);
    out.weight = {(1.0 - u) * (1.0 - v), u * (1.0 - v), u * v, (1.0 - u) * v};
  }
  // Clip tiny negatives from floating-point roundoff at cell boundaries.
  double sum = 0.0;
  for (int i = 0; i < out.count; ++i) {
    out.weight[i] = std::max(out.weight[i], 0.0);
    sum += out.weight[i];
  }
  for (int i = 0; i < out.count; ++i) out.weight[i] /= sum;
  return out;
}

Point2 Tessellation::sample_uniform_in_cell(int cell, Rng& rng) const {
  const Cell& c = cells_[cell];
  const Point2 a = vertex(c.v[0]), b = vertex(c.v[1]), d = vertex(c.v[c.size == 3 ? 2 : 3]);
  if (c.size == 4) {
    return {a.x + rng.uniform01() * (b.x - a.x), a.y + rng.uniform01() * (d.y - a.y)};
  }
  // Uniform in a triangle via folded barycentric coordinates.
  double u = rng.uniform01(), v = rng.uniform01();
  if (u + v > 1.0) {
    u = 1.0 - u;
    v = 1.0 - v;
  }
  const Point2 t = vertex(c.v[2]);
  return {a.x + u * (b.x - a.x) + v * (t.x - a.x), a.y + u * (b.y - a.y) + v * (t.y - a.y)};
}

namespace {

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

bool on_segment(const Point2& a, const Point2& b, const Point2& p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_intersect(const Point2& p1, const Point2& p2, const Point2& q1, const Point2& q2) {
  const double d1 = cross(q1, q2, p1), d2 = cross(q1, q2, p2);
  const double d3 = cross(p1, p2, q1), d4 = cross(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

}  // namespace

double segment_segment_distance(const Point2& p1, const Point2& p2, const Point2& q1,
                                const Point2& q2) {
  if (segments_intersect(p1, p2, q1, q2)) return 0.0;
  return std::min(std::min(point_segment_distance(p1, q1, q2), point_segment_distance(p2, q1, q2)),
                  std::min(point_segment_distance(q1, p1, p2), point_segment_distance(q2, p1, p2)));
}

double polygon_area(const std::vector<Point2>& poly) {
  double s = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point2& a = poly[i];
    const Point2& b = poly[(i + 1) % poly.size()];
    s += a.x * b.y - b.x * a.y;
  }
  return std::abs(0.5 * s);
}

double Tessellation::cell_set_distance(int a, int b) const {
  const Cell& ca = cells_[a];
  const Cell& cb = cells_[b];
  // Cells have disjoint interiors, so the set distance is attained between
  // boundary segments (it is 0 exactly when they touch).
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < ca.size; ++i) {
    const Point2 a1 = vertex(ca.v[i]), a2 = vertex(ca.v[(i + 1) % ca.size]);
    for (int j = 0; j < cb.size; ++j) {
      const Point2 b1 = vertex(cb.v[j]), b2 = vertex(cb.v[(j + 1) % cb.size]);
      best = std::min(best, segment_segment_distance(a1, a2, b1, b2));
      if (best == 0.0) return 0.0;
    }
  }
  return best;
}

std::vector<std::pair<int, int>> enumerate_cell_pairs(const Tessellation& tess, double alpha) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("enumerate_cell_pairs: alpha must be positive");
  }
  const auto& cells = tess.cells();
  const int n = static_cast<int>(cells.size());

  // Bounding-box prefilter to keep the quadratic scan cheap.
  struct Box {
    double x0, y0, x1, y1;
  };
  std::vector<Box> boxes(n);
  for (int i = 0; i < n; ++i) {
    Box b{1e300, 1e300, -1e300, -1e300};
    for (int k = 0; k < cells[i].size; ++k) {
      const Point2 p = tess.vertex(cells[i].v[k]);
      b.x0 = std::min(b.x0, p.x);
      b.y0 = std::min(b.y0, p.y);
      b.x1 = std::max(b.x1, p.x);
      b.y1 = std::max(b.y1, p.y);
    }
    boxes[i] = b;
  }

  // Separations within one part in 1e12 of alpha count as exactly alpha and
  // stay out: the closed-form privacy constants assume knife-edge pairs are
  // excluded, and rounding in the distance computation must not let a pair
  // whose true separation equals alpha slip under a naive strict comparison.
  const double threshold = alpha * (1.0 - 1e-12);
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double gx = std::max({0.0, boxes[j].x0 - boxes[i].x1, boxes[i].x0 - boxes[j].x1});
      const double gy = std::max({0.0, boxes[j].y0 - boxes[i].y1, boxes[i].y0 - boxes[j].y1});
      if (std::hypot(gx, gy) > alpha) continue;
      if (tess.cell_set_distance(i, j) < threshold) out.emplace_back(i, j);
    }
  }
  return out;
}

}  // namespace ppsynth
