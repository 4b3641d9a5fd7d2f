#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ppsynth/geometry.hpp"
#include "ppsynth/mesh.hpp"

namespace ppsynth {

// Window coverage of an isotropic Gaussian bump centred at x: the integral of
// the Gaussian density with scale h over the rectangle.  Closed form as a
// product of one-dimensional normal CDF differences.
double gaussian_coverage(const RectDomain& dom, const Point2& x, double h);

// Mixture intensity with one unit-mass Gaussian component per data point,
// each renormalized by its window coverage so the total mass over the window
// is exactly the number of data points.
class KernelMixtureIntensity {
 public:
  KernelMixtureIntensity(const RectDomain& dom, std::vector<Point2> data, double h);

  const RectDomain& domain() const { return dom_; }
  const std::vector<Point2>& data() const { return data_; }
  double bandwidth() const { return h_; }
  double coverage(std::size_t i) const { return coverage_[i]; }

  double value(const Point2& s) const;
  double mass() const { return static_cast<double>(data_.size()); }

 private:
  RectDomain dom_;
  std::vector<Point2> data_;
  double h_;
  std::vector<double> coverage_;
};

// Log-linear field over a mesh: log intensity = base + piecewise-linear
// interpolant of per-vertex values.
template <class Mesh>
struct LogLinearField {
  const Mesh* mesh;
  double base;           // log-scale offset
  Eigen::VectorXd beta;  // one value per mesh vertex

  double value(const typename Mesh::Loc& loc) const {
    const BasisEval e = mesh->eval_basis(loc);
    double g = base;
    for (int i = 0; i < e.count; ++i) g += e.weight[i] * beta[e.vertex[i]];
    return std::exp(g);
  }

  // Exact integral of the intensity over the mesh.
  double mass() const {
    double m = 0.0;
    for (int c = 0; c < mesh->cell_count(); ++c) {
      m += mesh->integrate_exp_linear(c, base, beta.data());
    }
    return m;
  }

  // Quadrature of the integral on the dual mesh (the likelihood's convention).
  double mass_dual_quadrature() const {
    const auto& dual = mesh->dual_measures();
    double m = 0.0;
    for (int v = 0; v < mesh->vertex_count(); ++v) m += dual[v] * std::exp(base + beta[v]);
    return m;
  }
};

// Piecewise-constant field: gamma[c] is the total mass of cell c, spread
// uniformly over the cell.
template <class Mesh>
struct PiecewiseConstantField {
  const Mesh* mesh;
  Eigen::VectorXd gamma;  // one nonnegative mass per cell

  double value(const typename Mesh::Loc& loc) const {
    const int c = mesh->eval_basis(loc).cell;
    return gamma[c] / mesh->cell_measure(c);
  }

  double mass() const { return gamma.sum(); }
};

}  // namespace ppsynth
