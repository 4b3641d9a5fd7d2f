#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ppsynth/geometry.hpp"
#include "ppsynth/lgcp.hpp"
#include "ppsynth/network.hpp"
#include "ppsynth/network_cov.hpp"
#include "ppsynth/point_pattern.hpp"
#include "ppsynth/privacy.hpp"
#include "ppsynth/rng.hpp"

namespace ppsynth {

// Kernel family of the kernel-mixture synthesizer.  Only the Gaussian kernel
// is admissible: a bounded-support kernel can leave zero intensity where a
// neighbouring dataset places mass, so no bandwidth makes the output
// likelihood ratio bounded.
enum class KernelShape { gaussian, epanechnikov };

// Statistic fed to the per-cell Laplace noise.
//   count:   raw per-cell point counts; one relocation changes the histogram
//            by at most 2 in L1, so the noise scale is 2 / epsilon.
//   density: counts divided by cell measure, with the matching worst-pair
//            sensitivity.  The clamped noisy value is still used as the cell
//            mass, so cells of measure != 1 inflate or deflate the released
//            total accordingly.
enum class LaplaceScaling { count, density };

// Options for the log-Gaussian synthesizers.
struct LgcpConfig {
  int n_syn = 10;            // synthetic patterns, drawn from thinned posterior draws
  int n_range_options = 15;  // size of the correlation range grid
  HmcOptions hmc{};
  // Network variant only: correlation family and its exponent.
  NetCorrelation correlation = NetCorrelation::exponential;
  double corr_exponent = 1.0;
};

// Everything a synthesis run produced: the synthetic pattern(s) plus the
// calibrated parameters and diagnostics needed to audit or reproduce it.
// Only the fields matching `kind` are populated.
struct SynthesisReport {
  std::string kind;  // kernel | lgcp | laplace | lgcp-network | laplace-network
  PrivacyBudget budget{};
  std::uint64_t seed = 0;  // caller-recorded seed of the rng handed in
  std::size_t input_size = 0;
  std::vector<PointPattern> patterns;
  std::vector<std::string> warnings;

  // kind == kernel
  KernelCalibration kernel{};

  // kind == lgcp / lgcp-network
  double sigma_ratio = 0.0;         // planar: admissible sigma / range ratio
  double alpha_max = 0.0;           // planar: neighbourhood ceiling of the grid
  double base_log_intensity = 0.0;  // log(n / window measure)
  std::vector<double> option_params;  // retained correlation ranges
  std::vector<double> option_sigmas;  // field scale per retained option
  std::vector<double> option_freq;    // posterior mass per retained option
  double delta_bound = 0.0;           // numeric bound, max over options
  double accept_rate = 0.0;
  double max_rhat = 0.0;
  double min_ess = 0.0;
  long long divergences = 0;
  // Field values of the thinned draw behind each synthetic pattern, so the
  // fitted intensity of pattern i can be rebuilt for scoring.
  std::vector<Eigen::VectorXd> pattern_beta;

  // kind == laplace / laplace-network
  double sensitivity = 0.0;
  double noise_scale = 0.0;
  std::vector<double> cell_mass;  // released per-cell masses, after clamping

  // Manifest body; callers may splice in file paths before writing.
  nlohmann::json manifest() const;
};

// Gaussian-kernel synthesizer on a rectangular window: calibrates the
// bandwidth against the budget, builds the edge-corrected mixture intensity
// on the data, and samples one synthetic pattern.  Requires delta > 0.
SynthesisReport synth_kernel(const PointPattern& data, const RectDomain& dom,
                             const PrivacyBudget& budget, Rng& rng,
                             KernelShape shape = KernelShape::gaussian);

// Log-Gaussian synthesizer on a regular tessellation of a square window:
// calibrates the field-scale ratio, runs posterior sampling of the latent
// field, and emits one synthetic pattern per thinned posterior draw.
// Requires delta > 0 and alpha within the grid ceiling.  When `posterior`
// is given it receives the full draw set for archiving.
SynthesisReport synth_lgcp(const PointPattern& data, const Tessellation& tess,
                           const PrivacyBudget& budget, const LgcpConfig& config, Rng& rng,
                           PosteriorSummary* posterior = nullptr);

// Laplace-histogram synthesizer: adds Laplace noise to the per-cell
// statistic, clamps at zero, and samples points uniformly per cell with the
// clamped values as cell masses.  delta may be zero; alpha is immaterial
// because the sensitivity already covers arbitrary relocations.
SynthesisReport synth_laplace(const PointPattern& data, const Tessellation& grid,
                              const PrivacyBudget& budget, Rng& rng,
                              LaplaceScaling scaling = LaplaceScaling::count);

// Log-Gaussian synthesizer on a discretized linear network.  `data` holds
// locations on `original`; they are mapped onto `dnet.net`, whose pieces act
// as cells and whose nodes carry the latent field under the resistance
// metric.  Output patterns live on `dnet.net`.
SynthesisReport synth_lgcp_network(const PointPattern& data, const LinearNetwork& original,
                                   const DiscretizedNetwork& dnet, const PrivacyBudget& budget,
                                   const LgcpConfig& config, Rng& rng,
                                   PosteriorSummary* posterior = nullptr);

// Laplace-histogram synthesizer on a discretized linear network: cells are
// the pieces of `dnet.net`, with lengths as measures and length-uniform
// placement.  Output patterns live on `dnet.net`.
SynthesisReport synth_laplace_network(const PointPattern& data, const LinearNetwork& original,
                                      const DiscretizedNetwork& dnet, const PrivacyBudget& budget,
                                      Rng& rng, LaplaceScaling scaling = LaplaceScaling::count);

}  // namespace ppsynth
