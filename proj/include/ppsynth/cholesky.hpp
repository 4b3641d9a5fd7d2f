#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "ppsynth/errors.hpp"

namespace ppsynth {

// Dense lower-triangular Cholesky factor of a symmetric positive-definite
// matrix.  Unlike library black boxes this reports the index of the leading
// minor that fails, which calibration error messages need.
class CholeskyFactor {
 public:
  explicit CholeskyFactor(const Eigen::MatrixXd& a) : l_(a) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n) throw NumericalError("CholeskyFactor: matrix must be square");
    for (Eigen::Index j = 0; j < n; ++j) {
      double d = l_(j, j);
      for (Eigen::Index k = 0; k < j; ++k) d -= l_(j, k) * l_(j, k);
      if (!(d > 0.0)) {
        throw NumericalError("CholeskyFactor: matrix not positive definite (leading minor " +
                             std::to_string(j + 1) + ")");
      }
      const double s = std::sqrt(d);
      l_(j, j) = s;
      for (Eigen::Index i = j + 1; i < n; ++i) {
        double v = l_(i, j);
        for (Eigen::Index k = 0; k < j; ++k) v -= l_(i, k) * l_(j, k);
        l_(i, j) = v / s;
      }
    }
    l_.triangularView<Eigen::StrictlyUpper>().setZero();
  }

  Eigen::Index size() const { return l_.rows(); }
  const Eigen::MatrixXd& lower() const { return l_; }

  // Solve A x = b.
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    Eigen::VectorXd y = l_.triangularView<Eigen::Lower>().solve(b);
    return l_.transpose().triangularView<Eigen::Upper>().solve(y);
  }

  // log det A
  double log_det() const {
    double s = 0.0;
    for (Eigen::Index i = 0; i < l_.rows(); ++i) s += std::log(l_(i, i));
    return 2.0 * s;
  }

  // x' A^{-1} x
  double inv_quadratic_form(const Eigen::VectorXd& x) const {
    return l_.triangularView<Eigen::Lower>().solve(x).squaredNorm();
  }

  // L z for standard-normal z: a draw scale for N(0, A).
  Eigen::VectorXd unwhiten(const Eigen::VectorXd& z) const {
    return l_.triangularView<Eigen::Lower>() * z;
  }

  // L^{-1} x
  Eigen::VectorXd whiten(const Eigen::VectorXd& x) const {
    return l_.triangularView<Eigen::Lower>().solve(x);
  }

 private:
  Eigen::MatrixXd l_;
};

}  // namespace ppsynth
