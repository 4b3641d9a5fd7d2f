#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ppsynth/evaluation.hpp"
#include "ppsynth/geometry.hpp"
#include "ppsynth/network.hpp"
#include "ppsynth/point_pattern.hpp"
#include "ppsynth/synthesizers.hpp"

namespace ppsynth {

// One of the built-in study intensities: a nonnegative surface over a square
// window together with its supremum, so patterns can be drawn exactly by
// thinning a dominating homogeneous process.
struct StudyIntensity {
  std::string name;
  RectDomain domain;
  std::function<double(double, double)> value;
  double max_value = 0.0;
};

// The four built-in surfaces: a constant, one central bump, a diagonal
// ridge, and two off-center bumps, each on its own square window.
const std::vector<StudyIntensity>& builtin_intensities();
const StudyIntensity& builtin_intensity(const std::string& name);

// Exact draw from an inhomogeneous Poisson process with the given surface.
PointPattern sample_study_pattern(const StudyIntensity& f, Rng& rng);

enum class Method { kernel, lgcp, laplace };
std::string method_name(Method m);
Method method_from_name(const std::string& name);

// Scott-rule bandwidth sigma_hat * n^(-1/6) with sigma_hat the root mean
// marginal variance; falls back to a quarter of the window diameter for
// patterns too small to estimate a spread.
double scott_bandwidth(const std::vector<Point2>& pts, const RectDomain& dom);

// Per-method default relocation radius.  The log-Gaussian and Laplace
// methods use the tessellation ceiling side / ((knots - 1) * sqrt(2)); the
// kernel method scales alpha so its calibrated bandwidth lands near the
// Scott rule: 0.9 * eps * h_scott^2 / (k * diameter), capped at the ceiling.
double default_alpha(Method m, const RectDomain& dom, int knots, double epsilon, double delta,
                     const std::vector<Point2>& pts);

// Shared study knobs.
struct StudyOptions {
  std::vector<double> epsilons{0.1, 1.0, 10.0};
  double delta = 0.0;   // <= 0 means 1 / n, resolved per dataset
  double alpha = 0.0;   // <= 0 means the per-method default
  int knots = 11;       // knot points per axis (planar)
  TessKind tess = TessKind::triangular;
  int n_ori = 10;       // original datasets per intensity (planar study)
  int n_syn = 10;       // synthetic patterns per dataset
  double resolution = 50.0;  // discretization pitch (network study)
  LgcpConfig lgcp{};
  LaplaceScaling laplace_scaling = LaplaceScaling::count;
  std::uint64_t seed = 1;
  int r_points = 50;    // K-function grid size
  int threads = 0;      // 0 = one worker per hardware thread
};

// One (intensity, epsilon, method) cell of a sweep.
struct SweepCell {
  std::string intensity;
  double epsilon = 0.0;
  Method method = Method::kernel;
  bool feasible = true;
  std::string error;          // set when infeasible
  double pmse_mean = 0.0;     // planar study only
  double pmse_std = 0.0;
  double npoints_mean = 0.0;
  double npoints_ori = 0.0;
  double mise = 0.0;
  KCurve k_ori_mean;          // original curve averaged over datasets
  KCurve k_syn_mean;          // synthetic curve averaged over all replicates
  std::vector<nlohmann::json> manifests;  // one synthesis manifest per dataset
};

struct SweepResult {
  std::vector<SweepCell> cells;
  std::vector<std::string> warnings;
  bool any_infeasible = false;
};

// Planar study: draws n_ori datasets per named intensity (empty `which`
// means all four), synthesizes n_syn patterns per dataset per method per
// epsilon, and scores propensity error, output counts, and K-curve error.
// Original datasets are shared across methods and epsilons; every cell runs
// from its own deterministic substream, so results are reproducible and
// independent of scheduling.  Infeasible calibrations mark their cell
// instead of aborting the sweep.
SweepResult run_planar_study(const StudyOptions& opt, const std::vector<std::string>& which,
                             const std::vector<Method>& methods);

// Network study on one observed pattern: log-Gaussian and Laplace variants
// over the epsilon sweep, scored by the homogeneous network K function
// (n_syn patterns per epsilon; pMSE columns are left empty as in the
// planar Ori rows).
SweepResult run_network_study(const LinearNetwork& net, const PointPattern& data,
                              const StudyOptions& opt, const std::vector<Method>& methods);

// Built-in street-grid fixture: a connected network of roughly five
// kilometres of segments inside a 550 x 420 window, carrying 85 points
// clustered around two hotspots.
struct NetworkFixture {
  LinearNetwork net;
  PointPattern pattern;
};
const NetworkFixture& street_grid_fixture();

// results table serialization: header
//   intensity,method,epsilon,pmse_mean,pmse_std,npoints_mean,npoints_ori,mise,status
// with empty pmse fields where the metric is undefined and status either
// "ok" or "infeasible: <reason>".
std::string results_csv(const SweepResult& result);

// K curve as "r,khat" rows.
std::string kcurve_csv(const KCurve& curve);

// Posterior draw archive, one CSV per chain: columns draw,range,sigma,
// beta_1..beta_N,log_post.  Returns one CSV string per chain.
std::vector<std::string> draw_archive_csv(const PosteriorSummary& posterior,
                                          const std::vector<double>& option_params,
                                          const std::vector<double>& option_sigmas);

}  // namespace ppsynth
