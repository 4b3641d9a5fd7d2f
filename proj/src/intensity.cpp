#include "ppsynth/intensity.hpp"

#include <cmath>
#include <stdexcept>

namespace ppsynth {

namespace {

// Standard normal CDF.
double phi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

double gaussian_coverage(const RectDomain& dom, const Point2& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("gaussian_coverage: bandwidth must be positive");
  const double gx = phi((dom.x_max - x.x) / h) - phi((dom.x_min - x.x) / h);
  const double gy = phi((dom.y_max - x.y) / h) - phi((dom.y_min - x.y) / h);
  return gx * gy;
}

KernelMixtureIntensity::KernelMixtureIntensity(const RectDomain& dom, std::vector<Point2> data,
                                               double h)
    : dom_(dom), data_(std::move(data)), h_(h) {
  if (!(h > 0.0)) {
    throw std::invalid_argument("KernelMixtureIntensity: bandwidth must be positive");
  }
  coverage_.reserve(data_.size());
  for (const Point2& p : data_) {
    if (!dom.contains(p)) {
      throw std::invalid_argument("KernelMixtureIntensity: data point outside the window");
    }
    coverage_.push_back(gaussian_coverage(dom, p, h));
  }
}

double KernelMixtureIntensity::value(const Point2& s) const {
  const double inv2h2 = 1.0 / (2.0 * h_ * h_);
  const double norm = 1.0 / (2.0 * M_PI * h_ * h_);
  double acc = 0.0;
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const double dx = s.x - data_[i].x;
    const double dy = s.y - data_[i].y;
    acc += norm * std::exp(-(dx * dx + dy * dy) * inv2h2) / coverage_[i];
  }
  return acc;
}

}  // namespace ppsynth
