#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "ppsynth/cholesky.hpp"
#include "ppsynth/intensity.hpp"
#include "ppsynth/mesh.hpp"
#include "ppsynth/point_pattern.hpp"
#include "ppsynth/rng.hpp"

namespace ppsynth {

// Homogeneous Poisson pattern: Poisson(rate * measure) points placed
// uniformly (by area on rectangles, by length on networks).
PointPattern sample_homogeneous(const RectDomain& dom, double rate, Rng& rng);
PointPattern sample_homogeneous(const LinearNetwork& net, double rate, Rng& rng);

// Exact draw from a Poisson process with the kernel-mixture intensity: the
// count is Poisson(n); each point picks a mixture component uniformly over
// the data and rejects Gaussian deviates until one lands in the window.
PointPattern sample_kernel_mixture(const KernelMixtureIntensity& intensity, Rng& rng);

// Draw a mean-zero Gaussian vector with covariance factor `chol`.
Eigen::VectorXd sample_gaussian_vector(const CholeskyFactor& chol, Rng& rng);
Eigen::VectorXd sample_gaussian_vector(const Eigen::MatrixXd& cov, Rng& rng);

// Exact draw from a Poisson process whose log intensity is piecewise linear
// on the mesh, by per-cell thinning.  The proposal bound exp(base + max
// vertex value) dominates the cell exactly because the interpolant attains
// its maximum at a vertex, so no rejection loop is needed.
template <class Mesh>
PointPattern sample_loglinear(const LogLinearField<Mesh>& field, Rng& rng) {
  const Mesh& mesh = *field.mesh;
  PointPattern out;
  for (int c = 0; c < mesh.cell_count(); ++c) {
    const auto [verts, nv] = mesh.cell_vertices(c);
    double log_bound = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < nv; ++i) log_bound = std::max(log_bound, field.beta[verts[i]]);
    log_bound += field.base;
    const double mean = std::exp(log_bound) * mesh.cell_measure(c);
    const long long m = rng.poisson(mean);
    for (long long k = 0; k < m; ++k) {
      const auto loc = mesh.sample_uniform_in_cell(c, rng);
      const BasisEval e = mesh.eval_basis(loc);
      double g = field.base;
      for (int i = 0; i < e.count; ++i) g += e.weight[i] * field.beta[e.vertex[i]];
      if (rng.uniform01() < std::exp(g - log_bound)) mesh.append_point(out, loc);
    }
  }
  return out;
}

// Poisson(gamma[c]) points per cell, placed uniformly within the cell.
// gamma must be nonnegative; clamping negative inputs is the caller's job.
template <class Mesh>
PointPattern sample_piecewise_constant(const PiecewiseConstantField<Mesh>& field, Rng& rng) {
  const Mesh& mesh = *field.mesh;
  if (field.gamma.size() != mesh.cell_count()) {
    throw std::invalid_argument("sample_piecewise_constant: gamma size != cell count");
  }
  PointPattern out;
  for (int c = 0; c < mesh.cell_count(); ++c) {
    const double g = field.gamma[c];
    if (g < 0.0) {
      throw std::invalid_argument("sample_piecewise_constant: negative cell mass");
    }
    const long long m = rng.poisson(g);
    for (long long k = 0; k < m; ++k) {
      mesh.append_point(out, mesh.sample_uniform_in_cell(c, rng));
    }
  }
  return out;
}

}  // namespace ppsynth
