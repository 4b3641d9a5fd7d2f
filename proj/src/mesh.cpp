#include "ppsynth/mesh.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace ppsynth {

namespace {

// 8-point Gauss-Legendre nodes/weights on [0, 1].
constexpr int kGlN = 8;
constexpr std::array<double, kGlN> kGlX = {
    0.019855071751231884, 0.10166676129318664, 0.2372337950418355, 0.40828267875217505,
    0.59171732124782495,  0.7627662049581645,  0.89833323870681336, 0.980144928248768116};
constexpr std::array<double, kGlN> kGlW = {
    0.05061426814518813, 0.11119051722668724, 0.15685332293894364, 0.18134189168918099,
    0.18134189168918099, 0.15685332293894364, 0.11119051722668724, 0.05061426814518813};

}  // namespace

double PlanarMesh::integrate_exp_linear(int cell, double base, const double* beta) const {
  const Cell& c = tess_->cells()[cell];
  const Point2 p0 = tess_->vertex(c.v[0]);
  const Point2 p1 = tess_->vertex(c.v[1]);
  const double g0 = beta[c.v[0]], g1 = beta[c.v[1]], g2 = beta[c.v[2]];

  double acc = 0.0;
  if (c.size == 3) {
    // Duffy map from the unit square onto the triangle (p0, p1, p2).
    const Point2 p2 = tess_->vertex(c.v[2]);
    const double area2 = std::abs((p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y));
    for (int i = 0; i < kGlN; ++i) {
      for (int j = 0; j < kGlN; ++j) {
        const double u = kGlX[i];
        const double v = kGlX[j] * (1.0 - u);
        const double w0 = 1.0 - u - v;
        const double val = std::exp(base + w0 * g0 + u * g1 + v * g2);
        acc += kGlW[i] * kGlW[j] * (1.0 - u) * val;
      }
    }
    return acc * area2;
  }
  // Square cell: tensor quadrature of the bilinear interpolant's exponential.
  const double g3 = beta[c.v[3]];
  const double sx = p1.x - p0.x;
  const Point2 p3 = tess_->vertex(c.v[3]);
  const double sy = p3.y - p0.y;
  for (int i = 0; i < kGlN; ++i) {
    for (int j = 0; j < kGlN; ++j) {
      const double u = kGlX[i], v = kGlX[j];
      const double g = (1 - u) * (1 - v) * g0 + u * (1 - v) * g1 + u * v * g2 + (1 - u) * v * g3;
      acc += kGlW[i] * kGlW[j] * std::exp(base + g);
    }
  }
  return acc * sx * sy;
}

NetworkMesh::NetworkMesh(const LinearNetwork& net) : net_(&net) {
  dual_.assign(net.node_count(), 0.0);
  cell_nodes_.reserve(net.segment_count());
  for (int i = 0; i < net.segment_count(); ++i) {
    const auto& s = net.segment(i);
    dual_[s.a] += 0.5 * s.length;
    dual_[s.b] += 0.5 * s.length;
    cell_nodes_.push_back({s.a, s.b});
  }
}

BasisEval NetworkMesh::eval_basis(const Loc& loc) const {
  if (!net_->valid_loc(loc)) {
    throw std::invalid_argument("NetworkMesh::eval_basis: location outside the network");
  }
  const auto& s = net_->segment(loc.seg);
  const double t = loc.offset / s.length;
  BasisEval out;
  out.cell = loc.seg;
  out.count = 2;
  out.vertex = {s.a, s.b, 0, 0};
  out.weight = {1.0 - t, t, 0.0, 0.0};
  return out;
}

double NetworkMesh::integrate_exp_linear(int cell, double base, const double* beta) const {
  const auto& s = net_->segment(cell);
  const double ga = base + beta[s.a];
  const double gb = base + beta[s.b];
  // len * (e^gb - e^ga) / (gb - ga), stable near ga == gb.
  const double d = gb - ga;
  if (std::abs(d) < 1e-12) return s.length * std::exp(0.5 * (ga + gb));
  return s.length * std::exp(ga) * std::expm1(d) / d;
}

}  // namespace ppsynth
