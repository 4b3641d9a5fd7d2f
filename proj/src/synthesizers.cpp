#include "ppsynth/synthesizers.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "ppsynth/errors.hpp"
#include "ppsynth/intensity.hpp"
#include "ppsynth/mesh.hpp"
#include "ppsynth/samplers.hpp"

namespace ppsynth {
namespace {

void require_planar(const PointPattern& data, const RectDomain& dom, const char* who) {
  if (data.on_network() && data.size() > 0) {
    throw std::invalid_argument(std::string(who) + ": expected a planar pattern");
  }
  for (const Point2& p : data.points) {
    if (!dom.contains(p)) {
      throw std::invalid_argument(std::string(who) + ": data point outside the window");
    }
  }
}

void require_network(const PointPattern& data, const LinearNetwork& net, const char* who) {
  if (!data.on_network() && data.size() > 0) {
    throw std::invalid_argument(std::string(who) + ": expected a pattern on the network");
  }
  for (const NetworkLoc& loc : data.net_locs) {
    if (!net.valid_loc(loc)) {
      throw std::invalid_argument(std::string(who) + ": data location off the network");
    }
  }
}

void require_discretization(const DiscretizedNetwork& dnet, const LinearNetwork& original,
                            const char* who) {
  if (static_cast<int>(dnet.first_piece.size()) != original.segment_count()) {
    throw std::invalid_argument(std::string(who) + ": discretization does not match the network");
  }
}

// Indices of every ceil(total / n_syn)-th draw, clamped to the last draw.
std::vector<std::size_t> thinned_indices(std::size_t total, int n_syn,
                                         std::vector<std::string>& warnings) {
  std::vector<std::size_t> idx;
  if (total == 0) return idx;
  const std::size_t stride = (total + static_cast<std::size_t>(n_syn) - 1) / n_syn;
  for (int j = 0; j < n_syn; ++j) {
    idx.push_back(std::min(static_cast<std::size_t>(j) * stride + stride - 1, total - 1));
  }
  if (static_cast<std::size_t>(n_syn) > total) {
    warnings.push_back("more synthetic patterns requested than posterior draws; draws reused");
  }
  return idx;
}

// Shared tail of the log-Gaussian synthesizers once the covariance grid is
// calibrated: numeric budget audit, posterior sampling, thinned-draw
// synthesis.  `delta_at` evaluates the numeric budget bound at one option.
template <class Mesh, class DeltaFn>
void run_lgcp(SynthesisReport& rep, const Mesh& mesh,
              const std::vector<typename Mesh::Loc>& locs, std::vector<CovOption> grid,
              const LgcpConfig& config, DeltaFn&& delta_at, Rng& rng,
              PosteriorSummary* posterior) {
  if (config.n_syn <= 0) {
    throw std::invalid_argument(rep.kind + ": n_syn must be positive");
  }
  if (static_cast<int>(grid.size()) < config.n_range_options) {
    rep.warnings.push_back(
        "dropped " + std::to_string(config.n_range_options - static_cast<int>(grid.size())) +
        " covariance options that failed to factor");
  }
  double delta_max = 0.0;
  for (const CovOption& o : grid) {
    rep.option_params.push_back(o.param);
    rep.option_sigmas.push_back(o.sigma);
    delta_max = std::max(delta_max, delta_at(o));
  }
  rep.delta_bound = delta_max;
  if (delta_max > rep.budget.delta * (1.0 + 1e-9)) {
    rep.warnings.push_back("numeric budget bound exceeds delta; calibration slack is negative");
  }

  if (locs.empty()) {
    rep.patterns.assign(config.n_syn, PointPattern{});
    rep.warnings.push_back("empty input: baseline intensity is zero, synthetic patterns are empty");
    return;
  }
  const double base = std::log(static_cast<double>(locs.size()) / mesh.total_measure());
  rep.base_log_intensity = base;
  const VoronoiLikelihood lik = VoronoiLikelihood::build(mesh, locs, base);
  const PosteriorSummary post = sample_posterior(lik, grid, config.hmc, rng);
  rep.accept_rate = post.accept_rate;
  rep.max_rhat = post.max_rhat;
  rep.min_ess = post.min_ess;
  rep.divergences = post.divergences;
  rep.option_freq = post.option_freq;
  rep.warnings.insert(rep.warnings.end(), post.warnings.begin(), post.warnings.end());
  for (const std::size_t i : thinned_indices(post.draws.size(), config.n_syn, rep.warnings)) {
    const LogLinearField<Mesh> field{&mesh, base, post.draws[i].beta};
    rep.pattern_beta.push_back(post.draws[i].beta);
    rep.patterns.push_back(sample_loglinear(field, rng));
  }
  if (posterior != nullptr) *posterior = post;
}

// Shared tail of the Laplace synthesizers: noisy clamped per-cell masses,
// then one uniform-per-cell sample.
template <class Mesh>
void run_laplace(SynthesisReport& rep, const Mesh& mesh, const std::vector<int>& cell_of_point,
                 Rng& rng, LaplaceScaling scaling) {
  if (!(rep.budget.epsilon > 0.0)) {
    throw std::invalid_argument(rep.kind + ": epsilon must be positive");
  }
  const int nc = mesh.cell_count();
  Eigen::VectorXd stat = Eigen::VectorXd::Zero(nc);
  for (const int c : cell_of_point) stat[c] += 1.0;
  double sens = 2.0;
  if (scaling == LaplaceScaling::density) {
    std::vector<double> measures(nc);
    for (int c = 0; c < nc; ++c) measures[c] = mesh.cell_measure(c);
    for (int c = 0; c < nc; ++c) stat[c] /= measures[c];
    sens = laplace_sensitivity(measures);
  }
  const double scale = sens / rep.budget.epsilon;
  Eigen::VectorXd gamma(nc);
  for (int c = 0; c < nc; ++c) gamma[c] = std::max(0.0, stat[c] + rng.laplace(scale));
  rep.sensitivity = sens;
  rep.noise_scale = scale;
  rep.cell_mass.assign(gamma.data(), gamma.data() + nc);
  const PiecewiseConstantField<Mesh> field{&mesh, std::move(gamma)};
  rep.patterns.push_back(sample_piecewise_constant(field, rng));
}

}  // namespace

nlohmann::json SynthesisReport::manifest() const {
  nlohmann::json j;
  j["kind"] = kind;
  j["budget"] = {{"epsilon", budget.epsilon}, {"delta", budget.delta}, {"alpha", budget.alpha}};
  j["seed"] = seed;
  j["input_size"] = input_size;
  nlohmann::json counts = nlohmann::json::array();
  for (const PointPattern& p : patterns) counts.push_back(p.size());
  j["output_counts"] = std::move(counts);
  j["warnings"] = warnings;
  if (kind == "kernel") {
    j["calibration"] = {{"bandwidth", kernel.h},
                        {"count_bound", kernel.k},
                        {"per_point_budget", kernel.per_point},
                        {"move_term", kernel.move_term},
                        {"edge_term", kernel.edge_term}};
  } else if (kind == "lgcp" || kind == "lgcp-network") {
    j["calibration"] = {{"sigma_ratio", sigma_ratio},
                        {"alpha_max", alpha_max},
                        {"base_log_intensity", base_log_intensity},
                        {"range_options", option_params},
                        {"sigma_options", option_sigmas},
                        {"delta_bound", delta_bound}};
    j["mcmc"] = {{"accept_rate", accept_rate},
                 {"max_rhat", max_rhat},
                 {"min_ess", min_ess},
                 {"divergences", divergences},
                 {"option_freq", option_freq}};
  } else if (kind == "laplace" || kind == "laplace-network") {
    j["calibration"] = {{"sensitivity", sensitivity}, {"noise_scale", noise_scale}};
    j["cell_mass"] = cell_mass;
  }
  return j;
}

SynthesisReport synth_kernel(const PointPattern& data, const RectDomain& dom,
                             const PrivacyBudget& budget, Rng& rng, KernelShape shape) {
  if (shape != KernelShape::gaussian) {
    throw CalibrationError(
        "synth_kernel: bounded-support kernels can leave zero intensity where a neighbouring "
        "dataset places mass; only the Gaussian kernel is admissible");
  }
  require_planar(data, dom, "synth_kernel");
  SynthesisReport rep;
  rep.kind = "kernel";
  rep.budget = budget;
  rep.input_size = data.size();
  rep.kernel = calibrate_kernel(budget, dom, data.size());
  const KernelMixtureIntensity intensity(dom, data.points, rep.kernel.h);
  rep.patterns.push_back(sample_kernel_mixture(intensity, rng));
  return rep;
}

SynthesisReport synth_lgcp(const PointPattern& data, const Tessellation& tess,
                           const PrivacyBudget& budget, const LgcpConfig& config, Rng& rng,
                           PosteriorSummary* posterior) {
  require_planar(data, tess.domain(), "synth_lgcp");
  if (tess.cells_x() != tess.cells_y()) {
    throw std::invalid_argument("synth_lgcp: ratio calibration needs equal cell counts per axis");
  }
  SynthesisReport rep;
  rep.kind = "lgcp";
  rep.budget = budget;
  rep.input_size = data.size();
  const LgcpCalibration cal =
      calibrate_lgcp_ratio(budget, tess.domain(), tess.kind(), tess.cells_x());
  rep.sigma_ratio = cal.r_max;
  rep.alpha_max = cal.alpha_max;
  std::vector<Point2> vertices(tess.vertex_count());
  for (int i = 0; i < tess.vertex_count(); ++i) vertices[i] = tess.vertex(i);
  std::vector<CovOption> grid =
      power_cov_grid(vertices, tess.domain().diameter(), cal.r_max, config.n_range_options);
  const PlanarMesh mesh(tess);
  run_lgcp(rep, mesh, data.points, std::move(grid), config,
           [&](const CovOption& o) {
             const Eigen::MatrixXd cov = power_covariance(vertices, o.sigma, o.param, 2.0);
             return lgcp_delta_bound(tess, cov, budget.alpha, budget.epsilon);
           },
           rng, posterior);
  return rep;
}

SynthesisReport synth_laplace(const PointPattern& data, const Tessellation& grid,
                              const PrivacyBudget& budget, Rng& rng, LaplaceScaling scaling) {
  require_planar(data, grid.domain(), "synth_laplace");
  SynthesisReport rep;
  rep.kind = "laplace";
  rep.budget = budget;
  rep.input_size = data.size();
  const PlanarMesh mesh(grid);
  std::vector<int> cell_of(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) cell_of[i] = grid.locate(data.points[i]);
  run_laplace(rep, mesh, cell_of, rng, scaling);
  return rep;
}

SynthesisReport synth_lgcp_network(const PointPattern& data, const LinearNetwork& original,
                                   const DiscretizedNetwork& dnet, const PrivacyBudget& budget,
                                   const LgcpConfig& config, Rng& rng,
                                   PosteriorSummary* posterior) {
  require_network(data, original, "synth_lgcp_network");
  require_discretization(dnet, original, "synth_lgcp_network");
  if (!(budget.epsilon > 0.0)) {
    throw std::invalid_argument("synth_lgcp_network: epsilon must be positive");
  }
  if (!(budget.delta > 0.0 && budget.delta < 1.0)) {
    throw CalibrationError("synth_lgcp_network: delta must lie in (0, 1)");
  }
  if (!(budget.alpha > 0.0)) {
    throw std::invalid_argument("synth_lgcp_network: alpha must be positive");
  }
  SynthesisReport rep;
  rep.kind = "lgcp-network";
  rep.budget = budget;
  rep.input_size = data.size();
  const NetworkMesh mesh(dnet.net);
  const ResistanceMetric metric(dnet.net);
  std::vector<CovOption> grid =
      network_cov_grid(metric, budget, config.correlation, config.corr_exponent,
                       config.n_range_options);
  std::vector<NetworkLoc> locs(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) locs[i] = dnet.map(original, data.net_locs[i]);
  run_lgcp(rep, mesh, locs, std::move(grid), config,
           [&](const CovOption& o) {
             const Eigen::MatrixXd cov = network_node_covariance(
                 metric, config.correlation, o.sigma, config.corr_exponent, o.param);
             return lgcp_delta_bound_network(dnet.net, cov, budget.alpha, budget.epsilon);
           },
           rng, posterior);
  return rep;
}

SynthesisReport synth_laplace_network(const PointPattern& data, const LinearNetwork& original,
                                      const DiscretizedNetwork& dnet, const PrivacyBudget& budget,
                                      Rng& rng, LaplaceScaling scaling) {
  require_network(data, original, "synth_laplace_network");
  require_discretization(dnet, original, "synth_laplace_network");
  SynthesisReport rep;
  rep.kind = "laplace-network";
  rep.budget = budget;
  rep.input_size = data.size();
  const NetworkMesh mesh(dnet.net);
  std::vector<int> cell_of(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    cell_of[i] = dnet.map(original, data.net_locs[i]).seg;
  }
  run_laplace(rep, mesh, cell_of, rng, scaling);
  return rep;
}

}  // namespace ppsynth
