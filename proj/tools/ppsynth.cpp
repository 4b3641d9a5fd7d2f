// Command-line driver: simulate point patterns, run the private synthesizers
// on ingested data, evaluate utility between patterns, and reproduce the
// built-in sweep studies.  Exit codes: 0 full success, 2 partial success
// (some sweep cells infeasible), 1 configuration or input error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ppsynth/errors.hpp"
#include "ppsynth/evaluation.hpp"
#include "ppsynth/experiment.hpp"
#include "ppsynth/ingest.hpp"
#include "ppsynth/intensity.hpp"
#include "ppsynth/lgcp.hpp"
#include "ppsynth/point_pattern.hpp"
#include "ppsynth/privacy.hpp"
#include "ppsynth/synthesizers.hpp"

namespace {

using namespace ppsynth;
namespace fs = std::filesystem;

struct Cli {
  std::string mode;
  std::vector<std::string> methods;
  std::vector<double> epsilons{0.1, 1.0, 10.0};
  std::string delta = "1/n";
  std::string alpha = "auto";
  int knots = 11;
  double resolution = 50.0;
  std::string tess = "tri";
  std::uint64_t seed = 1;
  std::string out = "out";
  int n_ori = 10;
  int n_syn = 0;  // 0 = mode default
  std::vector<std::string> intensities;
  std::string points_path;
  std::vector<std::string> syn_paths;
  std::string network_path;
  bool network_fixture = false;
  std::string format = "auto";
  std::string domain;
  double snap_tolerance = 100.0;
  bool project_lonlat = false;
  bool largest_component = false;
  int chains = 4, warmup = 500, draws = 500;
  int threads = 0;
  int r_points = 50;
  std::string laplace_scaling = "count";
};

double parse_positive(const std::string& s, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParseError(std::string(what) + ": expected a number, got '" + s + "'");
  }
  if (used != s.size() || !(v > 0.0)) {
    throw ParseError(std::string(what) + ": expected a positive number, got '" + s + "'");
  }
  return v;
}

// "1/n" resolves to 0, meaning "derive from the data size downstream".
double parse_delta(const std::string& s) {
  if (s == "1/n") return 0.0;
  const double v = parse_positive(s, "--delta");
  if (v >= 1.0) throw ParseError("--delta must lie in (0,1) or be '1/n'");
  return v;
}

// "auto" resolves to 0, meaning "per-method default downstream".
double parse_alpha(const std::string& s) {
  if (s == "auto") return 0.0;
  return parse_positive(s, "--alpha");
}

RectDomain parse_domain(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
  if (v.size() != 4 || !(v[0] < v[2]) || !(v[1] < v[3])) {
    throw ParseError("--domain expects x_min,y_min,x_max,y_max with positive extent");
  }
  return RectDomain(v[0], v[1], v[2], v[3]);
}

FileFormat resolve_format(const std::string& flag, const std::string& path) {
  if (flag == "csv") return FileFormat::csv;
  if (flag == "geojson") return FileFormat::geojson;
  return format_from_path(path);
}

TessKind parse_tess(const std::string& s) {
  if (s == "tri") return TessKind::triangular;
  if (s == "sqr") return TessKind::square;
  throw ParseError("--tess must be tri or sqr");
}

LaplaceScaling parse_scaling(const std::string& s) {
  if (s == "count") return LaplaceScaling::count;
  if (s == "density") return LaplaceScaling::density;
  throw ParseError("--laplace-scaling must be count or density");
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream os(path);
  if (!os) throw ParseError("cannot write " + path.string());
  os << content;
}

std::string num_token(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
}

double resolve_delta_for(double requested, std::size_t n) {
  if (requested > 0.0) return requested;
  const double d = n > 0 ? 1.0 / static_cast<double>(n) : 0.5;
  return std::clamp(d, 1e-12, 1.0 - 1e-9);
}

struct LoadedNetwork {
  LinearNetwork net;
  PointPattern pattern;
  std::vector<std::string> warnings;
};

// Ingests --network plus --points, with optional lon/lat projection shared
// between the two files.
LoadedNetwork load_network_data(const Cli& cli, bool need_points) {
  RawPolylines lines =
      read_polylines_file(cli.network_path, resolve_format(cli.format, cli.network_path));
  RawPoints raw;
  if (!cli.points_path.empty()) {
    raw = read_points_file(cli.points_path, resolve_format(cli.format, cli.points_path));
  } else if (need_points) {
    throw ParseError("--points is required with --network in this mode");
  }
  if (cli.project_lonlat) {
    const LonLatProjection proj = projection_about(merge(bbox_of(lines.lines), bbox_of(raw.pts)));
    project_in_place(lines.lines, proj);
    project_in_place(raw.pts, proj);
  }
  NetworkIngestResult net = build_network(lines, cli.largest_component);
  PointIngestResult pts = ingest_points_network(raw, net.net, cli.snap_tolerance);
  LoadedNetwork out{std::move(net.net), std::move(pts.pattern), {}};
  out.warnings = net.warnings;  // already includes the polyline-file warnings
  out.warnings.insert(out.warnings.end(), pts.warnings.begin(), pts.warnings.end());
  return out;
}

PointPattern load_planar_points(const Cli& cli, const RectDomain& dom,
                                std::vector<std::string>& warnings) {
  const RawPoints raw =
      read_points_file(cli.points_path, resolve_format(cli.format, cli.points_path));
  PointIngestResult res = ingest_points_planar(raw, &dom);
  warnings.insert(warnings.end(), res.warnings.begin(), res.warnings.end());
  return std::move(res.pattern);
}

std::vector<Method> resolve_methods(const Cli& cli, bool network) {
  std::vector<Method> out;
  if (cli.methods.empty()) {
    if (network) return {Method::lgcp, Method::laplace};
    return {Method::kernel, Method::lgcp, Method::laplace};
  }
  for (const std::string& m : cli.methods) out.push_back(method_from_name(m));
  return out;
}

int run_simulate(const Cli& cli) {
  const StudyIntensity& f =
      builtin_intensity(cli.intensities.empty() ? "lambda1" : cli.intensities.front());
  Rng rng(cli.seed);
  const int reps = std::max(1, cli.n_ori);
  fs::create_directories(cli.out);
  for (int j = 0; j < reps; ++j) {
    const PointPattern pat = sample_study_pattern(f, rng);
    const fs::path path = fs::path(cli.out) / (f.name + "_" + std::to_string(j) + ".csv");
    write_pattern_csv(path.string(), pat);
    std::cout << path.string() << ": " << pat.size() << " points\n";
  }
  return 0;
}

int run_synthesize(const Cli& cli) {
  if (cli.methods.size() != 1) {
    throw ParseError("synthesize mode needs exactly one --method");
  }
  const Method method = method_from_name(cli.methods.front());
  if (cli.epsilons.size() != 1) {
    throw ParseError("synthesize mode needs exactly one --eps");
  }
  const double eps = cli.epsilons.front();
  const int n_syn = cli.n_syn > 0 ? cli.n_syn : 1;
  if (cli.points_path.empty()) throw ParseError("--points is required in synthesize mode");

  std::vector<std::string> warnings;
  nlohmann::json manifest;
  std::vector<PointPattern> patterns;
  Rng rng(cli.seed);

  if (!cli.network_path.empty() || cli.network_fixture) {
    if (method == Method::kernel) {
      throw ParseError("the kernel synthesizer is planar-only; use lgcp or lap with --network");
    }
    std::optional<LoadedNetwork> loaded;
    const LinearNetwork* net = nullptr;
    const PointPattern* data = nullptr;
    if (cli.network_fixture && cli.network_path.empty()) {
      const NetworkFixture& fx = street_grid_fixture();
      net = &fx.net;
      data = &fx.pattern;
    } else {
      loaded = load_network_data(cli, true);
      net = &loaded->net;
      data = &loaded->pattern;
      warnings = loaded->warnings;
    }
    const DiscretizedNetwork dnet = discretize_network(*net, cli.resolution);
    const PrivacyBudget budget{eps, resolve_delta_for(parse_delta(cli.delta), data->size()),
                               parse_alpha(cli.alpha) > 0.0 ? parse_alpha(cli.alpha)
                                                            : cli.resolution / std::sqrt(2.0)};
    if (method == Method::lgcp) {
      LgcpConfig cfg;
      cfg.n_syn = n_syn;
      cfg.hmc.chains = cli.chains;
      cfg.hmc.warmup = cli.warmup;
      cfg.hmc.draws = cli.draws;
      PosteriorSummary post;
      SynthesisReport rep = synth_lgcp_network(*data, *net, dnet, budget, cfg, rng, &post);
      manifest = rep.manifest();
      patterns = std::move(rep.patterns);
      warnings.insert(warnings.end(), rep.warnings.begin(), rep.warnings.end());
      const std::vector<std::string> archives =
          draw_archive_csv(post, rep.option_params, rep.option_sigmas);
      for (std::size_t c = 0; c < archives.size(); ++c) {
        write_file(fs::path(cli.out) / ("draws_chain" + std::to_string(c + 1) + ".csv"),
                   archives[c]);
      }
    } else {
      for (int k = 0; k < n_syn; ++k) {
        SynthesisReport rep = synth_laplace_network(*data, *net, dnet, budget, rng,
                                                    parse_scaling(cli.laplace_scaling));
        if (k == 0) manifest = rep.manifest();
        patterns.push_back(std::move(rep.patterns.front()));
        warnings.insert(warnings.end(), rep.warnings.begin(), rep.warnings.end());
      }
    }
  } else {
    if (cli.domain.empty()) throw ParseError("--domain is required for planar synthesis");
    const RectDomain dom = parse_domain(cli.domain);
    const PointPattern data = load_planar_points(cli, dom, warnings);
    const double delta = resolve_delta_for(parse_delta(cli.delta), data.size());
    const double alpha_flag = parse_alpha(cli.alpha);
    const PrivacyBudget budget{
        eps, delta,
        alpha_flag > 0.0 ? alpha_flag
                         : default_alpha(method, dom, cli.knots, eps, delta, data.points)};
    if (method == Method::kernel) {
      for (int k = 0; k < n_syn; ++k) {
        SynthesisReport rep = synth_kernel(data, dom, budget, rng);
        if (k == 0) manifest = rep.manifest();
        patterns.push_back(std::move(rep.patterns.front()));
        warnings.insert(warnings.end(), rep.warnings.begin(), rep.warnings.end());
      }
    } else if (method == Method::lgcp) {
      const Tessellation tess = parse_tess(cli.tess) == TessKind::triangular
                                    ? Tessellation::triangular(dom, cli.knots, cli.knots)
                                    : Tessellation::square(dom, cli.knots, cli.knots);
      LgcpConfig cfg;
      cfg.n_syn = n_syn;
      cfg.hmc.chains = cli.chains;
      cfg.hmc.warmup = cli.warmup;
      cfg.hmc.draws = cli.draws;
      PosteriorSummary post;
      SynthesisReport rep = synth_lgcp(data, tess, budget, cfg, rng, &post);
      manifest = rep.manifest();
      patterns = std::move(rep.patterns);
      warnings.insert(warnings.end(), rep.warnings.begin(), rep.warnings.end());
      const std::vector<std::string> archives =
          draw_archive_csv(post, rep.option_params, rep.option_sigmas);
      for (std::size_t c = 0; c < archives.size(); ++c) {
        write_file(fs::path(cli.out) / ("draws_chain" + std::to_string(c + 1) + ".csv"),
                   archives[c]);
      }
    } else {
      const Tessellation grid = parse_tess(cli.tess) == TessKind::triangular
                                    ? Tessellation::triangular(dom, cli.knots, cli.knots)
                                    : Tessellation::square(dom, cli.knots, cli.knots);
      for (int k = 0; k < n_syn; ++k) {
        SynthesisReport rep =
            synth_laplace(data, grid, budget, rng, parse_scaling(cli.laplace_scaling));
        if (k == 0) manifest = rep.manifest();
        patterns.push_back(std::move(rep.patterns.front()));
        warnings.insert(warnings.end(), rep.warnings.begin(), rep.warnings.end());
      }
    }
  }

  fs::create_directories(cli.out);
  for (std::size_t k = 0; k < patterns.size(); ++k) {
    write_pattern_csv((fs::path(cli.out) / ("synthetic_" + std::to_string(k) + ".csv")).string(),
                      patterns[k]);
  }
  manifest["ingest_warnings"] = warnings;
  manifest["seed"] = cli.seed;
  write_file(fs::path(cli.out) / "manifest.json", manifest.dump(2) + "\n");
  print_warnings(warnings);
  std::cout << "wrote " << patterns.size() << " synthetic patterns to " << cli.out << "\n";
  return 0;
}

int run_evaluate(const Cli& cli) {
  if (cli.points_path.empty() || cli.syn_paths.empty()) {
    throw ParseError("evaluate mode needs --points and at least one --syn-points");
  }
  std::vector<std::string> warnings;
  nlohmann::json metrics;
  fs::create_directories(cli.out);

  if (!cli.network_path.empty()) {
    LoadedNetwork loaded = load_network_data(cli, true);
    warnings = loaded.warnings;
    const std::vector<double> r_grid = default_r_grid(loaded.net, cli.r_points);
    if (loaded.pattern.size() < 2) throw ParseError("need at least two original points");
    const KCurve k_ori = khat_network(loaded.net, loaded.pattern.net_locs, r_grid);
    write_file(fs::path(cli.out) / "kcurve_ori.csv", kcurve_csv(k_ori));
    std::vector<KCurve> syn_curves;
    for (std::size_t i = 0; i < cli.syn_paths.size(); ++i) {
      const RawPoints raw =
          read_points_file(cli.syn_paths[i], resolve_format(cli.format, cli.syn_paths[i]));
      PointIngestResult res = ingest_points_network(raw, loaded.net, cli.snap_tolerance);
      warnings.insert(warnings.end(), res.warnings.begin(), res.warnings.end());
      if (res.pattern.size() < 2) {
        warnings.push_back(cli.syn_paths[i] + ": fewer than two points; curve is zero");
        KCurve zero;
        zero.r = r_grid;
        zero.k.assign(r_grid.size(), 0.0);
        syn_curves.push_back(std::move(zero));
      } else {
        syn_curves.push_back(khat_network(loaded.net, res.pattern.net_locs, r_grid));
      }
      write_file(fs::path(cli.out) / ("kcurve_syn_" + std::to_string(i) + ".csv"),
                 kcurve_csv(syn_curves.back()));
    }
    metrics["mise"] = mise(k_ori, syn_curves);
    metrics["n_ori"] = loaded.pattern.size();
  } else {
    if (cli.domain.empty()) throw ParseError("--domain is required for planar evaluation");
    const RectDomain dom = parse_domain(cli.domain);
    const PointPattern ori = load_planar_points(cli, dom, warnings);
    if (ori.size() < 2) throw ParseError("need at least two original points");
    const double h_ori = scott_bandwidth(ori.points, dom);
    const KernelMixtureIntensity f_ori(dom, ori.points, h_ori);
    const std::vector<double> r_grid = default_r_grid(dom, cli.r_points);
    std::vector<double> lam_ori_own(ori.size());
    for (std::size_t i = 0; i < ori.size(); ++i) lam_ori_own[i] = f_ori.value(ori.points[i]);
    const KCurve k_ori = khat_inhom(dom, ori.points, lam_ori_own, r_grid);
    write_file(fs::path(cli.out) / "kcurve_ori.csv", kcurve_csv(k_ori));

    std::vector<KCurve> syn_curves;
    std::vector<double> pmses;
    for (std::size_t i = 0; i < cli.syn_paths.size(); ++i) {
      const RawPoints raw =
          read_points_file(cli.syn_paths[i], resolve_format(cli.format, cli.syn_paths[i]));
      Cli sub = cli;
      sub.points_path = cli.syn_paths[i];
      PointIngestResult res = ingest_points_planar(raw, &dom);
      warnings.insert(warnings.end(), res.warnings.begin(), res.warnings.end());
      const PointPattern& syn = res.pattern;
      if (syn.size() < 2) {
        warnings.push_back(cli.syn_paths[i] + ": fewer than two points; curve is zero");
        KCurve zero;
        zero.r = r_grid;
        zero.k.assign(r_grid.size(), 0.0);
        syn_curves.push_back(std::move(zero));
      } else {
        const double h_syn = scott_bandwidth(syn.points, dom);
        const KernelMixtureIntensity f_syn(dom, syn.points, h_syn);
        std::vector<double> lam(syn.size());
        for (std::size_t j = 0; j < syn.size(); ++j) lam[j] = f_syn.value(syn.points[j]);
        syn_curves.push_back(khat_inhom(dom, syn.points, lam, r_grid));
        const std::size_t n = ori.size(), m = syn.size();
        std::vector<double> lam_ori(n + m), lam_syn(n + m);
        for (std::size_t j = 0; j < n; ++j) {
          lam_ori[j] = lam_ori_own[j];
          lam_syn[j] = f_syn.value(ori.points[j]);
        }
        for (std::size_t j = 0; j < m; ++j) {
          lam_ori[n + j] = f_ori.value(syn.points[j]);
          lam_syn[n + j] = lam[j];
        }
        pmses.push_back(pmse(lam_ori, lam_syn, f_ori.mass(), f_syn.mass(), n));
      }
      write_file(fs::path(cli.out) / ("kcurve_syn_" + std::to_string(i) + ".csv"),
                 kcurve_csv(syn_curves.back()));
    }
    metrics["mise"] = mise(k_ori, syn_curves);
    if (!pmses.empty()) {
      double s = 0.0;
      for (const double v : pmses) s += v;
      metrics["pmse_mean"] = s / static_cast<double>(pmses.size());
      metrics["pmse"] = pmses;
    }
    metrics["n_ori"] = ori.size();
  }
  metrics["warnings"] = warnings;
  write_file(fs::path(cli.out) / "metrics.json", metrics.dump(2) + "\n");
  print_warnings(warnings);
  std::cout << metrics.dump(2) << "\n";
  return 0;
}

StudyOptions study_options_from(const Cli& cli, bool network) {
  StudyOptions opt;
  opt.epsilons = cli.epsilons;
  opt.delta = parse_delta(cli.delta);
  opt.alpha = parse_alpha(cli.alpha);
  opt.knots = cli.knots;
  opt.tess = parse_tess(cli.tess);
  opt.n_ori = cli.n_ori;
  opt.n_syn = cli.n_syn > 0 ? cli.n_syn : (network ? 30 : 10);
  opt.resolution = cli.resolution;
  opt.lgcp.hmc.chains = cli.chains;
  opt.lgcp.hmc.warmup = cli.warmup;
  opt.lgcp.hmc.draws = cli.draws;
  opt.laplace_scaling = parse_scaling(cli.laplace_scaling);
  opt.seed = cli.seed;
  opt.r_points = cli.r_points;
  opt.threads = cli.threads;
  return opt;
}

void write_sweep_artifacts(const Cli& cli, const SweepResult& result) {
  fs::create_directories(cli.out);
  write_file(fs::path(cli.out) / "results.csv", results_csv(result));

  // One original curve per intensity, one synthetic curve per cell.
  std::vector<std::string> seen;
  for (const SweepCell& cell : result.cells) {
    if (!cell.feasible) continue;
    const std::string tag =
        cell.intensity + "_" + method_name(cell.method) + "_eps" + num_token(cell.epsilon);
    if (!cell.k_syn_mean.r.empty()) {
      write_file(fs::path(cli.out) / ("kcurve_" + tag + ".csv"), kcurve_csv(cell.k_syn_mean));
    }
    if (!cell.k_ori_mean.r.empty() &&
        std::find(seen.begin(), seen.end(), cell.intensity) == seen.end()) {
      seen.push_back(cell.intensity);
      write_file(fs::path(cli.out) / ("kcurve_" + cell.intensity + "_ori.csv"),
                 kcurve_csv(cell.k_ori_mean));
    }
    nlohmann::json cell_manifest;
    cell_manifest["intensity"] = cell.intensity;
    cell_manifest["method"] = method_name(cell.method);
    cell_manifest["epsilon"] = cell.epsilon;
    cell_manifest["seed"] = cli.seed;
    cell_manifest["datasets"] = cell.manifests;
    write_file(fs::path(cli.out) / "manifests" / (tag + ".json"), cell_manifest.dump(2) + "\n");
  }

  nlohmann::json run;
  run["seed"] = cli.seed;
  run["epsilons"] = cli.epsilons;
  run["delta"] = cli.delta;
  run["alpha"] = cli.alpha;
  run["knots"] = cli.knots;
  run["tess"] = cli.tess;
  run["warnings"] = result.warnings;
  nlohmann::json cells = nlohmann::json::array();
  for (const SweepCell& c : result.cells) {
    cells.push_back({{"intensity", c.intensity},
                     {"method", method_name(c.method)},
                     {"epsilon", c.epsilon},
                     {"status", c.feasible ? "ok" : c.error}});
  }
  run["cells"] = cells;
  write_file(fs::path(cli.out) / "run_manifest.json", run.dump(2) + "\n");
}

int run_experiment(const Cli& cli) {
  const bool network = !cli.network_path.empty() || cli.network_fixture;
  const StudyOptions opt = study_options_from(cli, network);
  SweepResult result;
  if (network) {
    if (!cli.network_path.empty()) {
      LoadedNetwork loaded = load_network_data(cli, true);
      print_warnings(loaded.warnings);
      result = run_network_study(loaded.net, loaded.pattern, opt, resolve_methods(cli, true));
    } else {
      const NetworkFixture& fx = street_grid_fixture();
      result = run_network_study(fx.net, fx.pattern, opt, resolve_methods(cli, true));
    }
  } else {
    result = run_planar_study(opt, cli.intensities, resolve_methods(cli, false));
  }
  write_sweep_artifacts(cli, result);
  print_warnings(result.warnings);
  std::cout << results_csv(result);
  if (result.any_infeasible) {
    std::cerr << "some cells were infeasible; see results.csv\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Cli cli;
  CLI::App app{"differentially private synthetic spatial point patterns"};
  app.set_config("--config", "", "declarative config file (ini format) mirroring the flags");
  app.add_option("--mode", cli.mode, "simulate | synthesize | evaluate | experiment")
      ->required()
      ->check(CLI::IsMember({"simulate", "synthesize", "evaluate", "experiment"}));
  app.add_option("--method", cli.methods,
                 "synthesizer: kernel, lgcp, or lap (repeatable in experiment mode)");
  app.add_option("--eps", cli.epsilons, "privacy budget epsilon (repeatable in experiment mode)");
  app.add_option("--delta", cli.delta, "privacy budget delta: a number in (0,1) or '1/n'");
  app.add_option("--alpha", cli.alpha, "neighborhood radius: a positive number or 'auto'");
  app.add_option("--knots", cli.knots, "knot points per axis for planar grids")
      ->check(CLI::Range(2, 200));
  app.add_option("--resolution", cli.resolution, "network discretization pitch")
      ->check(CLI::PositiveNumber);
  app.add_option("--tess", cli.tess, "tessellation type: tri or sqr")
      ->check(CLI::IsMember({"tri", "sqr"}));
  app.add_option("--seed", cli.seed, "random seed");
  app.add_option("--out", cli.out, "output directory");
  app.add_option("--n-ori", cli.n_ori, "original datasets per intensity (experiment/simulate)")
      ->check(CLI::PositiveNumber);
  app.add_option("--n-syn", cli.n_syn,
                 "synthetic patterns per dataset (default: 10 planar, 30 network, 1 synthesize)");
  app.add_option("--intensity", cli.intensities,
                 "built-in intensity names (lambda1..lambda4; repeatable)");
  app.add_option("--points", cli.points_path, "point data file (CSV or GeoJSON)");
  app.add_option("--syn-points", cli.syn_paths, "synthetic point files for evaluate mode");
  app.add_option("--network", cli.network_path, "network file (GeoJSON lines or CSV x1,y1,x2,y2)");
  app.add_flag("--network-fixture", cli.network_fixture,
               "use the built-in street-grid fixture instead of --network");
  app.add_option("--format", cli.format, "input format override: auto, csv, geojson")
      ->check(CLI::IsMember({"auto", "csv", "geojson"}));
  app.add_option("--domain", cli.domain, "planar window as x_min,y_min,x_max,y_max");
  app.add_option("--snap-tolerance", cli.snap_tolerance,
                 "maximum snapping distance for network points")
      ->check(CLI::PositiveNumber);
  app.add_flag("--project-lonlat", cli.project_lonlat,
               "treat coordinates as lon/lat degrees and project to local meters");
  app.add_flag("--largest-component", cli.largest_component,
               "keep only the largest connected network component");
  app.add_option("--chains", cli.chains, "posterior sampling chains")->check(CLI::PositiveNumber);
  app.add_option("--warmup", cli.warmup, "posterior warmup iterations per chain")
      ->check(CLI::PositiveNumber);
  app.add_option("--draws", cli.draws, "posterior draws per chain")->check(CLI::PositiveNumber);
  app.add_option("--threads", cli.threads, "worker threads (0 = hardware)");
  app.add_option("--r-points", cli.r_points, "K-function grid size")->check(CLI::Range(2, 10000));
  app.add_option("--laplace-scaling", cli.laplace_scaling,
                 "per-cell statistic for the Laplace synthesizer: count or density")
      ->check(CLI::IsMember({"count", "density"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (cli.mode == "simulate") return run_simulate(cli);
    if (cli.mode == "synthesize") return run_synthesize(cli);
    if (cli.mode == "evaluate") return run_evaluate(cli);
    return run_experiment(cli);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
