#include "ppsynth/samplers.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ppsynth/errors.hpp"

namespace ppsynth {

PointPattern sample_homogeneous(const RectDomain& dom, double rate, Rng& rng) {
  if (rate < 0.0) throw std::invalid_argument("sample_homogeneous: negative rate");
  PointPattern out;
  const long long n = rng.poisson(rate * dom.area());
  out.points.reserve(n);
  for (long long i = 0; i < n; ++i) {
    out.push_planar({rng.uniform(dom.x_min, dom.x_max), rng.uniform(dom.y_min, dom.y_max)});
  }
  return out;
}

PointPattern sample_homogeneous(const LinearNetwork& net, double rate, Rng& rng) {
  if (rate < 0.0) throw std::invalid_argument("sample_homogeneous: negative rate");
  PointPattern out;
  const long long n = rng.poisson(rate * net.total_length());
  for (long long i = 0; i < n; ++i) {
    // Length-weighted segment choice, then a uniform offset.
    double u = rng.uniform01() * net.total_length();
    int seg = 0;
    while (seg + 1 < net.segment_count() && u > net.segment(seg).length) {
      u -= net.segment(seg).length;
      ++seg;
    }
    u = std::min(u, net.segment(seg).length);
    out.push_network(net, NetworkLoc{seg, u});
  }
  return out;
}

PointPattern sample_kernel_mixture(const KernelMixtureIntensity& intensity, Rng& rng) {
  const auto& data = intensity.data();
  const RectDomain& dom = intensity.domain();
  const double h = intensity.bandwidth();
  PointPattern out;
  if (data.empty()) return out;

  const long long n = rng.poisson(static_cast<double>(data.size()));
  out.points.reserve(n);
  for (long long i = 0; i < n; ++i) {
    const std::size_t j = static_cast<std::size_t>(rng.uniform_index(data.size()));
    if (intensity.coverage(j) < 1e-6) {
      throw NumericalError(
          "sample_kernel_mixture: component coverage below 1e-6; "
          "the truncated component at data index " + std::to_string(j) +
          " cannot be sampled reliably");
    }
    // Rejection against the window: exact draw from the truncated component.
    for (long long attempt = 0;; ++attempt) {
      if (attempt >= 1000000) {
        throw NumericalError("sample_kernel_mixture: rejection cap reached");
      }
      const Point2 cand{data[j].x + h * rng.normal(), data[j].y + h * rng.normal()};
      if (dom.contains(cand)) {
        out.push_planar(cand);
        break;
      }
    }
  }
  return out;
}

Eigen::VectorXd sample_gaussian_vector(const CholeskyFactor& chol, Rng& rng) {
  Eigen::VectorXd z(chol.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return chol.unwhiten(z);
}

Eigen::VectorXd sample_gaussian_vector(const Eigen::MatrixXd& cov, Rng& rng) {
  return sample_gaussian_vector(CholeskyFactor(cov), rng);
}

}  // namespace ppsynth
