#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "ppsynth/cholesky.hpp"
#include "ppsynth/geometry.hpp"
#include "ppsynth/rng.hpp"

namespace ppsynth {

// Poisson process log likelihood for a log-linear intensity
// exp(base + interpolated beta), with the intensity integral approximated by
// vertex quadrature on the dual mesh:
//
//   loglik(beta) = - sum_v dual_v exp(base + beta_v)
//                  + n * base + sum_v colsum_v beta_v
//
// where colsum_v is the total interpolation weight vertex v receives from
// the data.  Both the value and the gradient are O(#vertices).
struct VoronoiLikelihood {
  std::vector<double> dual;  // per-vertex dual measure
  Eigen::VectorXd colsum;    // per-vertex total data basis weight
  std::size_t n = 0;         // number of data points
  double base = 0.0;         // log baseline intensity

  template <class Mesh>
  static VoronoiLikelihood build(const Mesh& mesh, const std::vector<typename Mesh::Loc>& data,
                                 double base) {
    VoronoiLikelihood lik;
    lik.dual = mesh.dual_measures();
    lik.colsum = Eigen::VectorXd::Zero(mesh.vertex_count());
    lik.n = data.size();
    lik.base = base;
    for (const auto& loc : data) {
      const BasisEval e = mesh.eval_basis(loc);
      for (int i = 0; i < e.count; ++i) lik.colsum[e.vertex[i]] += e.weight[i];
    }
    return lik;
  }

  double value(const Eigen::VectorXd& beta) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& beta) const;
};

// One admissible field prior: a range parameter value together with the
// field scale the privacy calibration allows there, and the Cholesky factor
// of the implied vertex covariance.
struct CovOption {
  double param = 0.0;
  double sigma = 0.0;
  CholeskyFactor chol;
  double log_det = 0.0;
};

// Log-spaced grid of squared-exponential length scales on [b/50, b] with
// sigma = ratio * length scale at each option.  Options whose covariance
// fails to factor even after one small diagonal jitter are dropped; an empty
// result throws.
std::vector<CovOption> power_cov_grid(const std::vector<Point2>& vertices, double b, double ratio,
                                      int n_options = 15);

struct HmcOptions {
  int warmup = 500;
  int draws = 500;  // post-warmup draws per chain
  int chains = 4;
  int leapfrog_steps = 32;      // jittered by +-20% per iteration
  double target_accept = 0.8;   // dual-averaging target
  double divergence_threshold = 1000.0;
};

struct PosteriorDraw {
  Eigen::VectorXd beta;
  int option = 0;        // covariance grid index
  double log_post = 0.0; // log likelihood + field log prior (up to a constant)
};

struct PosteriorSummary {
  std::vector<PosteriorDraw> draws;  // post-warmup, chain-major order
  int chains = 0;
  int per_chain = 0;
  long long divergences = 0;
  double accept_rate = 0.0;          // mean post-warmup acceptance probability
  double max_rhat = 0.0;             // largest split scale-reduction factor
  double min_ess = 0.0;              // smallest effective sample size
  std::vector<double> option_freq;   // posterior mass of each grid option
  std::vector<std::string> warnings; // e.g. high divergence rate
};

// Markov chain Monte Carlo over (beta, grid option): Hamiltonian updates of
// beta in prior-whitened coordinates with dual-averaged step size, and
// Metropolis moves of the grid option to neighbouring indices under a
// uniform option prior.  Chains run from independent substreams of `rng` and
// the result is deterministic given its state.
PosteriorSummary sample_posterior(const VoronoiLikelihood& lik, const std::vector<CovOption>& grid,
                                  const HmcOptions& opt, Rng& rng);

// Split potential-scale-reduction over 2x split chains of a scalar sequence
// set; `series[c]` is chain c.  Exposed for testing.
double split_rhat(const std::vector<std::vector<double>>& series);

// Multi-chain effective sample size (initial monotone positive sequence).
double effective_sample_size(const std::vector<std::vector<double>>& series);

}  // namespace ppsynth
