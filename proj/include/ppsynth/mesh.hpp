#pragma once

#include <utility>
#include <vector>

#include "ppsynth/geometry.hpp"
#include "ppsynth/network.hpp"
#include "ppsynth/point_pattern.hpp"

namespace ppsynth {

// PlanarMesh and NetworkMesh expose the same compile-time interface so that
// piecewise-linear log-intensity machinery (likelihoods, samplers,
// synthesizers) can be written once:
//
//   using Loc = ...;
//   int vertex_count() / int cell_count()
//   double cell_measure(int) / double total_measure()
//   const std::vector<double>& dual_measures()   // partition of the measure
//   std::pair<const int*, int> cell_vertices(int)
//   BasisEval eval_basis(const Loc&)
//   Loc sample_uniform_in_cell(int, Rng&)
//   double integrate_exp_linear(int cell, double base, const double* beta)
//   void append_point(PointPattern&, const Loc&)
//
// Both hold references; the underlying geometry must outlive the mesh.

class PlanarMesh {
 public:
  using Loc = Point2;

  explicit PlanarMesh(const Tessellation& tess) : tess_(&tess) {}

  const Tessellation& tessellation() const { return *tess_; }
  int vertex_count() const { return tess_->vertex_count(); }
  int cell_count() const { return static_cast<int>(tess_->cells().size()); }
  double cell_measure(int c) const { return tess_->cell_measure(c); }
  double total_measure() const { return tess_->domain().area(); }
  const std::vector<double>& dual_measures() const { return tess_->dual_areas(); }

  std::pair<const int*, int> cell_vertices(int c) const {
    const Cell& cell = tess_->cells()[c];
    return {cell.v.data(), cell.size};
  }

  BasisEval eval_basis(const Loc& p) const { return tess_->eval_basis(p); }
  Loc sample_uniform_in_cell(int c, Rng& rng) const { return tess_->sample_uniform_in_cell(c, rng); }

  // Integral over one cell of exp(base + linear interpolant of beta), by
  // high-order Gauss-Legendre quadrature (triangles via a Duffy map).
  double integrate_exp_linear(int cell, double base, const double* beta) const;

  void append_point(PointPattern& p, const Loc& loc) const { p.push_planar(loc); }

 private:
  const Tessellation* tess_;
};

// Every network segment is one cell; vertex values interpolate linearly along
// segments.  Dual measures are the summed half-lengths of incident segments.
class NetworkMesh {
 public:
  using Loc = NetworkLoc;

  explicit NetworkMesh(const LinearNetwork& net);

  const LinearNetwork& network() const { return *net_; }
  int vertex_count() const { return net_->node_count(); }
  int cell_count() const { return net_->segment_count(); }
  double cell_measure(int c) const { return net_->segment(c).length; }
  double total_measure() const { return net_->total_length(); }
  const std::vector<double>& dual_measures() const { return dual_; }

  std::pair<const int*, int> cell_vertices(int c) const {
    return {cell_nodes_[c].data(), 2};
  }

  BasisEval eval_basis(const Loc& loc) const;
  Loc sample_uniform_in_cell(int c, Rng& rng) const {
    return Loc{c, rng.uniform01() * net_->segment(c).length};
  }

  double integrate_exp_linear(int cell, double base, const double* beta) const;

  void append_point(PointPattern& p, const Loc& loc) const { p.push_network(*net_, loc); }

 private:
  const LinearNetwork* net_;
  std::vector<double> dual_;
  std::vector<std::array<int, 2>> cell_nodes_;
};

}  // namespace ppsynth
