#include "ppsynth/lgcp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ppsynth/errors.hpp"
#include "ppsynth/privacy.hpp"

namespace ppsynth {

double VoronoiLikelihood::value(const Eigen::VectorXd& beta) const {
  double acc = static_cast<double>(n) * base;
  for (Eigen::Index v = 0; v < beta.size(); ++v) {
    acc -= dual[v] * std::exp(base + beta[v]);
    acc += colsum[v] * beta[v];
  }
  return acc;
}

Eigen::VectorXd VoronoiLikelihood::gradient(const Eigen::VectorXd& beta) const {
  Eigen::VectorXd g(beta.size());
  for (Eigen::Index v = 0; v < beta.size(); ++v) {
    g[v] = colsum[v] - dual[v] * std::exp(base + beta[v]);
  }
  return g;
}

std::vector<CovOption> power_cov_grid(const std::vector<Point2>& vertices, double b, double ratio,
                                      int n_options) {
  if (!(b > 0.0)) throw std::invalid_argument("power_cov_grid: scale bound must be positive");
  if (!(ratio > 0.0)) throw std::invalid_argument("power_cov_grid: ratio must be positive");
  if (n_options < 1) throw std::invalid_argument("power_cov_grid: need at least one option");

  std::vector<CovOption> grid;
  const double lo = std::log(b / 50.0);
  const double hi = std::log(b);
  for (int i = 0; i < n_options; ++i) {
    const double l =
        std::exp(n_options == 1 ? hi : lo + (hi - lo) * i / (n_options - 1));
    const double sigma = ratio * l;
    Eigen::MatrixXd cov = power_covariance(vertices, sigma, l, 2.0);
    try {
      CholeskyFactor chol(cov);
      const double ld = chol.log_det();
      grid.push_back(CovOption{l, sigma, std::move(chol), ld});
    } catch (const NumericalError&) {
      cov.diagonal().array() += 1e-10 * sigma * sigma;
      try {
        CholeskyFactor chol(cov);
        const double ld = chol.log_det();
        grid.push_back(CovOption{l, sigma, std::move(chol), ld});
      } catch (const NumericalError&) {
        // Long length scales can make the covariance numerically singular;
        // drop the option rather than fail the whole grid.
      }
    }
  }
  if (grid.empty()) {
    throw NumericalError("power_cov_grid: no covariance option is positive definite");
  }
  return grid;
}

namespace {

// log N(x; 0, Sigma) up to the dimension constant (which cancels in ratios).
double log_gauss_prior(const CovOption& opt, const Eigen::VectorXd& beta) {
  return -0.5 * opt.chol.inv_quadratic_form(beta) - 0.5 * opt.log_det;
}

struct HmcResult {
  double accept_prob = 0.0;
  bool divergent = false;
};

// One Hamiltonian update of beta in coordinates whitened by the prior factor
// of the current grid option.
HmcResult hmc_update(const VoronoiLikelihood& lik, const CovOption& opt, Eigen::VectorXd& beta,
                     double eps, int steps, double div_threshold, Rng& rng) {
  const Eigen::Index d = beta.size();
  const auto potential = [&](const Eigen::VectorXd& z, Eigen::VectorXd* grad) {
    const Eigen::VectorXd b = opt.chol.unwhiten(z);
    if (grad) {
      *grad = -opt.chol.lower().transpose() * lik.gradient(b) + z;
    }
    return -lik.value(b) + 0.5 * z.squaredNorm();
  };

  Eigen::VectorXd z = opt.chol.whiten(beta);
  Eigen::VectorXd p(d);
  for (Eigen::Index i = 0; i < d; ++i) p[i] = rng.normal();

  Eigen::VectorXd grad(d);
  const double h0 = potential(z, &grad) + 0.5 * p.squaredNorm();

  Eigen::VectorXd z_new = z;
  p -= 0.5 * eps * grad;
  for (int s = 0; s < steps; ++s) {
    z_new += eps * p;
    potential(z_new, &grad);
    if (!grad.allFinite()) {
      return {0.0, true};
    }
    p -= (s + 1 < steps ? eps : 0.5 * eps) * grad;
  }
  const double h1 = potential(z_new, nullptr) + 0.5 * p.squaredNorm();

  HmcResult res;
  if (!std::isfinite(h1) || std::abs(h1 - h0) > div_threshold) {
    res.divergent = true;
    return res;
  }
  res.accept_prob = std::min(1.0, std::exp(h0 - h1));
  if (rng.uniform01() < res.accept_prob) {
    beta = opt.chol.unwhiten(z_new);
  }
  return res;
}

// Initial step size: double or halve until a single step's acceptance ratio
// crosses one half.
double find_initial_step(const VoronoiLikelihood& lik, const CovOption& opt,
                         const Eigen::VectorXd& beta, Rng& rng) {
  const Eigen::Index d = beta.size();
  const auto joint = [&](const Eigen::VectorXd& z, const Eigen::VectorXd& p,
                         Eigen::VectorXd* grad) {
    const Eigen::VectorXd b = opt.chol.unwhiten(z);
    if (grad) *grad = -opt.chol.lower().transpose() * lik.gradient(b) + z;
    return -lik.value(b) + 0.5 * z.squaredNorm() + 0.5 * p.squaredNorm();
  };

  double eps = 1.0;
  const Eigen::VectorXd z0 = opt.chol.whiten(beta);
  Eigen::VectorXd p0(d);
  for (Eigen::Index i = 0; i < d; ++i) p0[i] = rng.normal();

  Eigen::VectorXd grad(d);
  const double h0 = joint(z0, p0, &grad);
  const auto ratio_at = [&](double e) {
    Eigen::VectorXd p = p0 - 0.5 * e * grad;
    Eigen::VectorXd z = z0 + e * p;
    Eigen::VectorXd g(d);
    const double pen = joint(z, p, &g);
    (void)pen;
    p -= 0.5 * e * g;
    const double h1 = joint(z, p, nullptr);
    if (!std::isfinite(h1)) return 0.0;
    return std::exp(h0 - h1);
  };

  double r = ratio_at(eps);
  const double dir = r > 0.5 ? 1.0 : -1.0;
  for (int it = 0; it < 50; ++it) {
    if ((dir > 0 && r <= 0.5) || (dir < 0 && r > 0.5)) break;
    eps *= dir > 0 ? 2.0 : 0.5;
    r = ratio_at(eps);
  }
  return std::max(eps, 1e-10);
}

// Metropolis move of the covariance option to a neighbouring grid index
// (uniform option prior, symmetric proposal; off-grid proposals reject).
void grid_update(const std::vector<CovOption>& grid, const Eigen::VectorXd& beta, int& j,
                 Rng& rng) {
  if (grid.size() < 2) return;
  const int jp = j + (rng.uniform01() < 0.5 ? -1 : 1);
  if (jp < 0 || jp >= static_cast<int>(grid.size())) return;
  const double log_a = log_gauss_prior(grid[jp], beta) - log_gauss_prior(grid[j], beta);
  if (std::log(rng.uniform01() + std::numeric_limits<double>::min()) < log_a) j = jp;
}

double sample_variance(const std::vector<double>& x, double mean) {
  double acc = 0.0;
  for (double v : x) acc += (v - mean) * (v - mean);
  return acc / (static_cast<double>(x.size()) - 1.0);
}

// Split every chain into halves; report per-sequence means/variances and the
// pooled within/total variance estimates.
struct SplitStats {
  std::vector<std::vector<double>> seq;
  double w = 0.0;         // mean within-sequence variance
  double var_plus = 0.0;  // pooled variance estimate
};

SplitStats split_stats(const std::vector<std::vector<double>>& series) {
  std::size_t t_min = std::numeric_limits<std::size_t>::max();
  for (const auto& s : series) t_min = std::min(t_min, s.size());
  const std::size_t half = t_min / 2;
  SplitStats st;
  if (half < 2) return st;
  for (const auto& s : series) {
    st.seq.emplace_back(s.begin(), s.begin() + half);
    st.seq.emplace_back(s.begin() + half, s.begin() + 2 * half);
  }
  const double tn = static_cast<double>(half);
  std::vector<double> means;
  double w = 0.0;
  for (const auto& s : st.seq) {
    const double m = std::accumulate(s.begin(), s.end(), 0.0) / tn;
    means.push_back(m);
    w += sample_variance(s, m);
  }
  w /= static_cast<double>(st.seq.size());
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) /
                       static_cast<double>(means.size());
  const double b_over_t = sample_variance(means, grand);  // B / T'
  st.w = w;
  st.var_plus = (tn - 1.0) / tn * w + b_over_t;
  return st;
}

}  // namespace

double split_rhat(const std::vector<std::vector<double>>& series) {
  const SplitStats st = split_stats(series);
  if (st.seq.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (st.w <= 0.0) {
    return st.var_plus <= 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  }
  return std::sqrt(st.var_plus / st.w);
}

double effective_sample_size(const std::vector<std::vector<double>>& series) {
  const SplitStats st = split_stats(series);
  if (st.seq.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t m = st.seq.size();
  const std::size_t t = st.seq[0].size();
  const double total = static_cast<double>(m * t);
  if (st.var_plus <= 0.0 || st.w <= 0.0) return total;

  std::vector<double> means(m);
  for (std::size_t c = 0; c < m; ++c) {
    means[c] = std::accumulate(st.seq[c].begin(), st.seq[c].end(), 0.0) / static_cast<double>(t);
  }
  const auto mean_autocov = [&](std::size_t lag) {
    double acc = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      double a = 0.0;
      for (std::size_t i = 0; i + lag < t; ++i) {
        a += (st.seq[c][i] - means[c]) * (st.seq[c][i + lag] - means[c]);
      }
      acc += a / static_cast<double>(t);
    }
    return acc / static_cast<double>(m);
  };
  const auto rho = [&](std::size_t lag) {
    return 1.0 - (st.w - mean_autocov(lag)) / st.var_plus;
  };

  // Initial monotone positive sequence over lag pairs.
  double tau = 1.0;
  double prev_pair = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k + 1 < t; k += 2) {
    double pair = rho(k) + rho(k + 1);
    if (!(pair > 0.0)) break;
    pair = std::min(pair, prev_pair);
    prev_pair = pair;
    tau += 2.0 * pair;
  }
  return total / tau;
}

PosteriorSummary sample_posterior(const VoronoiLikelihood& lik, const std::vector<CovOption>& grid,
                                  const HmcOptions& opt, Rng& rng) {
  if (grid.empty()) throw std::invalid_argument("sample_posterior: covariance grid is empty");
  if (opt.chains < 1 || opt.draws < 1 || opt.warmup < 0 || opt.leapfrog_steps < 1) {
    throw std::invalid_argument("sample_posterior: invalid chain configuration");
  }
  const Eigen::Index d = lik.colsum.size();

  PosteriorSummary out;
  out.chains = opt.chains;
  out.per_chain = opt.draws;
  out.draws.reserve(static_cast<std::size_t>(opt.chains) * opt.draws);
  out.option_freq.assign(grid.size(), 0.0);

  double accept_acc = 0.0;
  long long accept_count = 0;

  for (int chain = 0; chain < opt.chains; ++chain) {
    Rng crng = rng.split(static_cast<std::uint64_t>(chain) + 1);

    int j = static_cast<int>(grid.size()) / 2;
    Eigen::VectorXd z0(d);
    for (Eigen::Index i = 0; i < d; ++i) z0[i] = 0.2 * crng.normal();
    Eigen::VectorXd beta = grid[j].chol.unwhiten(z0);

    // Dual averaging of the step size toward the target acceptance rate.
    double eps = find_initial_step(lik, grid[j], beta, crng);
    const double mu = std::log(10.0 * eps);
    double h_bar = 0.0;
    double log_eps_bar = 0.0;
    const double gamma = 0.05, t0 = 10.0, kappa = 0.75;

    const auto jitter_steps = [&]() {
      const double f = crng.uniform(0.8, 1.2);
      return std::max(1, static_cast<int>(std::lround(opt.leapfrog_steps * f)));
    };

    for (int m = 1; m <= opt.warmup; ++m) {
      const HmcResult res = hmc_update(lik, grid[j], beta, eps, jitter_steps(),
                                       opt.divergence_threshold, crng);
      grid_update(grid, beta, j, crng);
      const double eta = 1.0 / (m + t0);
      h_bar = (1.0 - eta) * h_bar + eta * (opt.target_accept - res.accept_prob);
      const double log_eps = mu - std::sqrt(static_cast<double>(m)) / gamma * h_bar;
      eps = std::exp(log_eps);
      const double w = std::pow(static_cast<double>(m), -kappa);
      log_eps_bar = w * log_eps + (1.0 - w) * log_eps_bar;
    }
    if (opt.warmup > 0) eps = std::exp(log_eps_bar);

    for (int m = 0; m < opt.draws; ++m) {
      const HmcResult res = hmc_update(lik, grid[j], beta, eps, jitter_steps(),
                                       opt.divergence_threshold, crng);
      grid_update(grid, beta, j, crng);
      if (res.divergent) ++out.divergences;
      accept_acc += res.accept_prob;
      ++accept_count;
      const double lp = lik.value(beta) + log_gauss_prior(grid[static_cast<std::size_t>(j)], beta);
      out.draws.push_back(PosteriorDraw{beta, j, lp});
      out.option_freq[static_cast<std::size_t>(j)] += 1.0;
    }
  }

  out.accept_rate = accept_count > 0 ? accept_acc / static_cast<double>(accept_count) : 0.0;
  for (double& f : out.option_freq) f /= static_cast<double>(out.draws.size());
  if (accept_count > 0 &&
      static_cast<double>(out.divergences) > 0.1 * static_cast<double>(accept_count)) {
    out.warnings.push_back("divergence rate above 10%: " + std::to_string(out.divergences) +
                           " of " + std::to_string(accept_count) + " transitions");
  }

  // Convergence diagnostics per field component.
  out.max_rhat = 0.0;
  out.min_ess = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> series(opt.chains, std::vector<double>(opt.draws));
  for (Eigen::Index comp = 0; comp < d; ++comp) {
    for (int c = 0; c < opt.chains; ++c) {
      for (int i = 0; i < opt.draws; ++i) {
        series[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)] =
            out.draws[static_cast<std::size_t>(c) * opt.draws + i].beta[comp];
      }
    }
    const double r = split_rhat(series);
    if (std::isfinite(r)) {
      out.max_rhat = std::max(out.max_rhat, r);
    } else if (!std::isnan(r)) {
      out.max_rhat = std::numeric_limits<double>::infinity();
    }
    out.min_ess = std::min(out.min_ess, effective_sample_size(series));
  }
  if (!std::isfinite(out.min_ess)) out.min_ess = 0.0;
  return out;
}

}  // namespace ppsynth
