#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "ppsynth/rng.hpp"

namespace ppsynth {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline double dist(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Axis-aligned rectangular observation window.
struct RectDomain {
  double x_min, y_min, x_max, y_max;

  RectDomain(double x0, double y0, double x1, double y1);

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  // Largest distance between two points of the window (the diagonal).
  double diameter() const { return std::hypot(width(), height()); }
  bool contains(const Point2& p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
};

enum class TessKind { triangular, square };

// One tessellation cell: 3 vertices (triangle) or 4 (square, CCW order).
struct Cell {
  std::array<int, 4> v{};
  int size = 0;
};

// Basis weights of a point: barycentric on triangles, bilinear on squares.
// Weights are nonnegative, sum to one and attach to the containing cell's
// vertices only.
struct BasisEval {
  int cell = -1;
  std::array<int, 4> vertex{};
  std::array<double, 4> weight{};
  int count = 0;
};

// Regular grid tessellation of a rectangle into right triangles (each grid
// square split along its lower-left -> upper-right diagonal) or into the grid
// squares themselves.  Vertices are the grid knots, row-major.  Each vertex
// carries the area of its Voronoi dual cell (clipped to the domain), built by
// connecting edge midpoints and cell circumcenters; the dual areas partition
// the window exactly.
class Tessellation {
 public:
  static Tessellation triangular(const RectDomain& dom, int knots_x, int knots_y);
  static Tessellation square(const RectDomain& dom, int knots_x, int knots_y);

  TessKind kind() const { return kind_; }
  const RectDomain& domain() const { return dom_; }
  int knots_x() const { return nx_ + 1; }
  int knots_y() const { return ny_ + 1; }
  int cells_x() const { return nx_; }
  int cells_y() const { return ny_; }

  int vertex_count() const { return (nx_ + 1) * (ny_ + 1); }
  Point2 vertex(int i) const;
  const std::vector<Cell>& cells() const { return cells_; }
  const std::vector<double>& dual_areas() const { return dual_areas_; }

  double cell_measure(int cell) const;
  // Index of the cell containing p (points on shared edges resolve to the
  // lexicographically first cell).  p must lie in the domain.
  int locate(const Point2& p) const;
  BasisEval eval_basis(const Point2& p) const;
  Point2 sample_uniform_in_cell(int cell, Rng& rng) const;

  // Smallest Euclidean distance between the two cells as point sets
  // (0 when they share a vertex or an edge).
  double cell_set_distance(int a, int b) const;

 private:
  Tessellation(TessKind kind, const RectDomain& dom, int knots_x, int knots_y);

  void build_dual_areas();

  TessKind kind_;
  RectDomain dom_;
  int nx_, ny_;        // cells per axis
  double sx_, sy_;     // cell spacing per axis
  std::vector<Cell> cells_;
  std::vector<double> dual_areas_;
};

// Unordered pairs (i < j) of cells whose set distance is strictly below
// alpha; touching cells have distance zero and are always included.  The
// strict comparison keeps knife-edge pairs (separation exactly alpha) out,
// matching the pair census the closed-form privacy constants assume.  alpha
// must be positive.
std::vector<std::pair<int, int>> enumerate_cell_pairs(const Tessellation& tess, double alpha);

// Exact minimum distance between two segments (0 when they intersect).
double segment_segment_distance(const Point2& p1, const Point2& p2, const Point2& q1,
                                const Point2& q2);

// Shoelace area of a simple polygon.
double polygon_area(const std::vector<Point2>& poly);

}  // namespace ppsynth
