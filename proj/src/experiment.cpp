#include "ppsynth/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include "ppsynth/errors.hpp"
#include "ppsynth/intensity.hpp"
#include "ppsynth/mesh.hpp"
#include "ppsynth/privacy.hpp"
#include "ppsynth/samplers.hpp"

namespace ppsynth {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (const double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (const double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

KCurve mean_curve(const std::vector<KCurve>& curves) {
  KCurve out;
  if (curves.empty()) return out;
  out.r = curves.front().r;
  out.k.assign(out.r.size(), 0.0);
  for (const KCurve& c : curves) {
    for (std::size_t i = 0; i < out.k.size(); ++i) out.k[i] += c.k[i];
  }
  for (double& v : out.k) v /= static_cast<double>(curves.size());
  return out;
}

double resolve_delta(double requested, std::size_t n) {
  if (requested > 0.0) return requested;
  const double d = n > 0 ? 1.0 / static_cast<double>(n) : 0.5;
  return std::clamp(d, 1e-12, 1.0 - 1e-9);
}

// Fitted synthetic intensity of one pattern: pointwise value and total mass.
struct FittedIntensity {
  std::function<double(const Point2&)> value;
  double mass = 0.0;
};

// Everything reusable about one original dataset.
struct DatasetScore {
  PointPattern data;
  double delta = 0.0;
  double scott_h = 0.0;
  KernelMixtureIntensity reference;  // Scott-bandwidth estimate of the data
  std::vector<double> lam_ori_at_own;
  KCurve k_ori;
};

struct PlanarContext {
  const StudyIntensity* f = nullptr;
  Tessellation tess;      // basis for the log-Gaussian synthesizer
  Tessellation lap_grid;  // square histogram grid for the Laplace synthesizer
  std::vector<double> r_grid;
  std::vector<DatasetScore> datasets;
};

PlanarContext build_planar_context(const StudyIntensity& f, const StudyOptions& opt, Rng data_rng,
                                   std::vector<std::string>& warnings) {
  PlanarContext ctx{&f,
                    opt.tess == TessKind::triangular
                        ? Tessellation::triangular(f.domain, opt.knots, opt.knots)
                        : Tessellation::square(f.domain, opt.knots, opt.knots),
                    Tessellation::square(f.domain, opt.knots, opt.knots),
                    default_r_grid(f.domain, opt.r_points),
                    {}};
  ctx.datasets.reserve(opt.n_ori);
  for (int j = 0; j < opt.n_ori; ++j) {
    PointPattern data = sample_study_pattern(f, data_rng);
    const double delta = resolve_delta(opt.delta, data.size());
    const double h = scott_bandwidth(data.points, f.domain);
    KernelMixtureIntensity ref(f.domain, data.points, h);
    std::vector<double> lam(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) lam[i] = ref.value(data.points[i]);
    KCurve k_ori;
    if (data.size() >= 2) {
      k_ori = khat_inhom(f.domain, data.points, lam, ctx.r_grid);
    } else {
      warnings.push_back(f.name + ": dataset " + std::to_string(j) +
                         " has fewer than two points; its K curve is empty");
    }
    ctx.datasets.push_back(DatasetScore{std::move(data), delta, h, std::move(ref),
                                        std::move(lam), std::move(k_ori)});
  }
  return ctx;
}

// Synthesizes n_syn patterns for one dataset with the cell's method and
// returns them with their fitted intensities and the audit manifest.
struct CellSynthesis {
  std::vector<PointPattern> patterns;
  std::vector<FittedIntensity> fitted;
  nlohmann::json manifest;
  std::vector<std::string> warnings;
};

CellSynthesis synthesize_planar(const PlanarContext& ctx, const DatasetScore& ds, Method method,
                                const PrivacyBudget& budget, const StudyOptions& opt, Rng& rng) {
  CellSynthesis out;
  switch (method) {
    case Method::kernel: {
      nlohmann::json first;
      std::vector<std::size_t> counts;
      // The calibration is deterministic, so all replicates share one
      // mixture intensity.
      KernelCalibration cal{};
      for (int k = 0; k < opt.n_syn; ++k) {
        SynthesisReport rep = synth_kernel(ds.data, ctx.f->domain, budget, rng);
        cal = rep.kernel;
        if (k == 0) first = rep.manifest();
        counts.push_back(rep.patterns.front().size());
        out.patterns.push_back(std::move(rep.patterns.front()));
        out.warnings.insert(out.warnings.end(), rep.warnings.begin(), rep.warnings.end());
      }
      auto intens = std::make_shared<KernelMixtureIntensity>(ctx.f->domain, ds.data.points, cal.h);
      for (int k = 0; k < opt.n_syn; ++k) {
        out.fitted.push_back(FittedIntensity{
            [intens](const Point2& p) { return intens->value(p); }, intens->mass()});
      }
      first["replicate_counts"] = counts;
      out.manifest = std::move(first);
      break;
    }
    case Method::lgcp: {
      LgcpConfig cfg = opt.lgcp;
      cfg.n_syn = opt.n_syn;
      SynthesisReport rep = synth_lgcp(ds.data, ctx.tess, budget, cfg, rng);
      out.manifest = rep.manifest();
      out.warnings = rep.warnings;
      auto mesh = std::make_shared<PlanarMesh>(ctx.tess);
      const double base = rep.base_log_intensity;
      for (std::size_t k = 0; k < rep.patterns.size(); ++k) {
        if (ds.data.size() == 0) {
          out.fitted.push_back(FittedIntensity{[](const Point2&) { return 0.0; }, 0.0});
        } else {
          auto field = std::make_shared<LogLinearField<PlanarMesh>>(
              LogLinearField<PlanarMesh>{mesh.get(), base, rep.pattern_beta[k]});
          const double mass = field->mass();
          out.fitted.push_back(FittedIntensity{
              [mesh, field](const Point2& p) { return field->value(p); }, mass});
        }
        out.patterns.push_back(std::move(rep.patterns[k]));
      }
      break;
    }
    case Method::laplace: {
      nlohmann::json first;
      std::vector<std::size_t> counts;
      auto mesh = std::make_shared<PlanarMesh>(ctx.lap_grid);
      for (int k = 0; k < opt.n_syn; ++k) {
        SynthesisReport rep =
            synth_laplace(ds.data, ctx.lap_grid, budget, rng, opt.laplace_scaling);
        if (k == 0) first = rep.manifest();
        counts.push_back(rep.patterns.front().size());
        auto gamma = std::make_shared<Eigen::VectorXd>(
            Eigen::Map<const Eigen::VectorXd>(rep.cell_mass.data(),
                                              static_cast<Eigen::Index>(rep.cell_mass.size())));
        const Tessellation* grid = &ctx.lap_grid;
        const double mass = gamma->sum();
        out.fitted.push_back(FittedIntensity{
            [mesh, gamma, grid](const Point2& p) {
              const int c = grid->locate(p);
              return (*gamma)[c] / grid->cell_measure(c);
            },
            mass});
        out.patterns.push_back(std::move(rep.patterns.front()));
        out.warnings.insert(out.warnings.end(), rep.warnings.begin(), rep.warnings.end());
      }
      first["replicate_counts"] = counts;
      out.manifest = std::move(first);
      break;
    }
  }
  return out;
}

void score_planar_cell(SweepCell& cell, const PlanarContext& ctx, const StudyOptions& opt,
                       Rng rng, std::vector<std::string>& cell_warnings) {
  const RectDomain& dom = ctx.f->domain;
  std::vector<double> pmses, counts, mises;
  std::vector<KCurve> all_syn_curves;
  std::vector<KCurve> ori_curves;
  for (std::size_t j = 0; j < ctx.datasets.size(); ++j) {
    const DatasetScore& ds = ctx.datasets[j];
    PrivacyBudget budget{cell.epsilon, ds.delta,
                         opt.alpha > 0.0
                             ? opt.alpha
                             : default_alpha(cell.method, dom, opt.knots, cell.epsilon, ds.delta,
                                             ds.data.points)};
    CellSynthesis syn = synthesize_planar(ctx, ds, cell.method, budget, opt, rng);
    for (const std::string& w : syn.warnings) {
      cell_warnings.push_back(cell.intensity + "/" + method_name(cell.method) + "/eps=" +
                              fmt_num(cell.epsilon) + ": " + w);
    }
    syn.manifest["dataset"] = j;
    syn.manifest["alpha"] = budget.alpha;
    cell.manifests.push_back(std::move(syn.manifest));

    std::vector<KCurve> syn_curves;
    for (std::size_t k = 0; k < syn.patterns.size(); ++k) {
      const PointPattern& pat = syn.patterns[k];
      const FittedIntensity& fit = syn.fitted[k];
      counts.push_back(static_cast<double>(pat.size()));

      // Propensity error over the pooled points.
      const std::size_t n = ds.data.size(), m = pat.size();
      std::vector<double> lam_ori(n + m), lam_syn(n + m);
      for (std::size_t i = 0; i < n; ++i) {
        lam_ori[i] = ds.lam_ori_at_own[i];
        lam_syn[i] = fit.value(ds.data.points[i]);
      }
      for (std::size_t i = 0; i < m; ++i) {
        lam_ori[n + i] = ds.reference.value(pat.points[i]);
        lam_syn[n + i] = fit.value(pat.points[i]);
      }
      pmses.push_back(pmse(lam_ori, lam_syn, ds.reference.mass(), fit.mass, n));

      // Synthetic K curve under the synthesizer's own intensity.
      if (pat.size() >= 2) {
        std::vector<double> lam(pat.size());
        for (std::size_t i = 0; i < pat.size(); ++i) lam[i] = fit.value(pat.points[i]);
        syn_curves.push_back(khat_inhom(dom, pat.points, lam, ctx.r_grid));
      } else {
        KCurve zero;
        zero.r = ctx.r_grid;
        zero.k.assign(ctx.r_grid.size(), 0.0);
        syn_curves.push_back(std::move(zero));
      }
    }
    if (!ds.k_ori.r.empty()) {
      try {
        mises.push_back(mise(ds.k_ori, syn_curves));
        ori_curves.push_back(ds.k_ori);
      } catch (const NumericalError& e) {
        cell_warnings.push_back(cell.intensity + " dataset " + std::to_string(j) +
                                ": K-curve error skipped (" + e.what() + ")");
      }
    }
    all_syn_curves.insert(all_syn_curves.end(), syn_curves.begin(), syn_curves.end());
  }
  cell.pmse_mean = mean_of(pmses);
  cell.pmse_std = std_of(pmses);
  cell.npoints_mean = mean_of(counts);
  cell.mise = mises.empty() ? kNaN : mean_of(mises);
  cell.k_ori_mean = mean_curve(ori_curves);
  cell.k_syn_mean = mean_curve(all_syn_curves);
}

void finish_infeasible(SweepCell& cell, const std::string& why) {
  cell.feasible = false;
  cell.error = why;
  cell.pmse_mean = cell.pmse_std = cell.npoints_mean = cell.mise = kNaN;
}

void run_jobs(std::vector<std::function<void()>>& jobs, int threads) {
  const unsigned hw = std::thread::hardware_concurrency();
  const int want = threads > 0 ? threads : static_cast<int>(hw > 0 ? hw : 2);
  const int nt = std::max(1, std::min<int>(want, static_cast<int>(jobs.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) break;
      jobs[i]();
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
}

}  // namespace

const std::vector<StudyIntensity>& builtin_intensities() {
  static const std::vector<StudyIntensity> fns = [] {
    std::vector<StudyIntensity> v;
    v.push_back(StudyIntensity{"lambda1", RectDomain(0.0, 0.0, 1.0, 1.0),
                               [](double, double) { return 10.0; }, 10.0});
    v.push_back(StudyIntensity{"lambda2", RectDomain(-10.0, -10.0, 10.0, 10.0),
                               [](double x, double y) { return std::exp(-(x * x + y * y) / 25.0); },
                               1.0});
    v.push_back(StudyIntensity{
        "lambda3", RectDomain(0.0, 0.0, 10.0, 10.0),
        [](double x, double y) { return 0.5 + 5.0 * std::exp(-(x - y) * (x - y)); }, 5.5});
    v.push_back(StudyIntensity{
        "lambda4", RectDomain(-5.0, -5.0, 5.0, 5.0),
        [](double x, double y) {
          return 5.0 * std::exp(-((x - 3) * (x - 3) + (y - 3) * (y - 3)) / 2.0) +
                 5.0 * std::exp(-((x + 3) * (x + 3) + (y + 3) * (y + 3)) / 2.0);
        },
        5.05});
    return v;
  }();
  return fns;
}

const StudyIntensity& builtin_intensity(const std::string& name) {
  for (const StudyIntensity& f : builtin_intensities()) {
    if (f.name == name) return f;
  }
  throw ParseError("unknown built-in intensity: " + name);
}

PointPattern sample_study_pattern(const StudyIntensity& f, Rng& rng) {
  PointPattern out;
  const long long candidates = rng.poisson(f.max_value * f.domain.area());
  for (long long i = 0; i < candidates; ++i) {
    const Point2 p{rng.uniform(f.domain.x_min, f.domain.x_max),
                   rng.uniform(f.domain.y_min, f.domain.y_max)};
    if (rng.uniform01() * f.max_value < f.value(p.x, p.y)) out.push_planar(p);
  }
  return out;
}

std::string method_name(Method m) {
  switch (m) {
    case Method::kernel: return "kernel";
    case Method::lgcp: return "lgcp";
    case Method::laplace: return "lap";
  }
  return "unknown";
}

Method method_from_name(const std::string& name) {
  if (name == "kernel") return Method::kernel;
  if (name == "lgcp") return Method::lgcp;
  if (name == "lap" || name == "laplace") return Method::laplace;
  throw ParseError("unknown method: " + name + " (expected kernel, lgcp, or lap)");
}

double scott_bandwidth(const std::vector<Point2>& pts, const RectDomain& dom) {
  const std::size_t n = pts.size();
  if (n < 2) return dom.diameter() / 4.0;
  double mx = 0.0, my = 0.0;
  for (const Point2& p : pts) {
    mx += p.x;
    my += p.y;
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double vx = 0.0, vy = 0.0;
  for (const Point2& p : pts) {
    vx += (p.x - mx) * (p.x - mx);
    vy += (p.y - my) * (p.y - my);
  }
  vx /= static_cast<double>(n - 1);
  vy /= static_cast<double>(n - 1);
  const double sig = std::sqrt(0.5 * (vx + vy));
  if (!(sig > 0.0)) return dom.diameter() / 4.0;
  return sig * std::pow(static_cast<double>(n), -1.0 / 6.0);
}

double default_alpha(Method m, const RectDomain& dom, int knots, double epsilon, double delta,
                     const std::vector<Point2>& pts) {
  const int cells = std::max(1, knots - 1);
  const double side = std::max(dom.width(), dom.height());
  const double ceiling = side / (cells * std::sqrt(2.0));
  if (m != Method::kernel) return ceiling;
  const long long k = poisson_tail_quantile(static_cast<double>(pts.size()), delta);
  if (k <= 0) return ceiling;
  const double h = scott_bandwidth(pts, dom);
  const double a = 0.9 * epsilon * h * h / (static_cast<double>(k) * dom.diameter());
  return std::clamp(a, 1e-12 * side, ceiling);
}

SweepResult run_planar_study(const StudyOptions& opt, const std::vector<std::string>& which,
                             const std::vector<Method>& methods) {
  if (opt.n_ori <= 0 || opt.n_syn <= 0) {
    throw std::invalid_argument("run_planar_study: n_ori and n_syn must be positive");
  }
  std::vector<const StudyIntensity*> fns;
  if (which.empty()) {
    for (const StudyIntensity& f : builtin_intensities()) fns.push_back(&f);
  } else {
    for (const std::string& name : which) fns.push_back(&builtin_intensity(name));
  }

  SweepResult result;
  const Rng master(opt.seed);
  std::vector<PlanarContext> contexts;
  contexts.reserve(fns.size());
  for (std::size_t fi = 0; fi < fns.size(); ++fi) {
    contexts.push_back(
        build_planar_context(*fns[fi], opt, master.split(1000 + fi), result.warnings));
  }

  for (std::size_t fi = 0; fi < fns.size(); ++fi) {
    double npts = 0.0;
    for (const DatasetScore& ds : contexts[fi].datasets) npts += ds.data.size();
    npts /= static_cast<double>(contexts[fi].datasets.size());
    for (const double eps : opt.epsilons) {
      for (const Method m : methods) {
        SweepCell cell;
        cell.intensity = fns[fi]->name;
        cell.epsilon = eps;
        cell.method = m;
        cell.npoints_ori = npts;
        result.cells.push_back(std::move(cell));
      }
    }
  }

  std::vector<std::vector<std::string>> cell_warnings(result.cells.size());
  std::vector<std::function<void()>> jobs;
  for (std::size_t ci = 0; ci < result.cells.size(); ++ci) {
    jobs.push_back([&, ci] {
      SweepCell& cell = result.cells[ci];
      const std::size_t fi = ci / (opt.epsilons.size() * methods.size());
      try {
        score_planar_cell(cell, contexts[fi], opt, master.split(2000 + ci), cell_warnings[ci]);
      } catch (const CalibrationError& e) {
        finish_infeasible(cell, e.what());
      } catch (const NumericalError& e) {
        finish_infeasible(cell, e.what());
      }
    });
  }
  run_jobs(jobs, opt.threads);

  for (std::size_t ci = 0; ci < result.cells.size(); ++ci) {
    result.warnings.insert(result.warnings.end(), cell_warnings[ci].begin(),
                           cell_warnings[ci].end());
    if (!result.cells[ci].feasible) result.any_infeasible = true;
  }
  return result;
}

SweepResult run_network_study(const LinearNetwork& net, const PointPattern& data,
                              const StudyOptions& opt, const std::vector<Method>& methods) {
  if (opt.n_syn <= 0) throw std::invalid_argument("run_network_study: n_syn must be positive");
  SweepResult result;
  const DiscretizedNetwork dnet = discretize_network(net, opt.resolution);
  const std::vector<double> r_grid = default_r_grid(net, opt.r_points);
  const double delta = resolve_delta(opt.delta, data.size());
  const double alpha = opt.alpha > 0.0 ? opt.alpha : opt.resolution / std::sqrt(2.0);

  KCurve k_ori;
  if (data.size() >= 2) {
    k_ori = khat_network(net, data.net_locs, r_grid);
  } else {
    result.warnings.push_back("network study: fewer than two observed points; K curve empty");
  }

  const Rng master(opt.seed);
  for (const double eps : opt.epsilons) {
    for (const Method m : methods) {
      SweepCell cell;
      cell.intensity = "network";
      cell.epsilon = eps;
      cell.method = m;
      cell.npoints_ori = static_cast<double>(data.size());
      cell.pmse_mean = cell.pmse_std = kNaN;
      result.cells.push_back(std::move(cell));
    }
  }

  std::vector<std::vector<std::string>> cell_warnings(result.cells.size());
  std::vector<std::function<void()>> jobs;
  for (std::size_t ci = 0; ci < result.cells.size(); ++ci) {
    jobs.push_back([&, ci] {
      SweepCell& cell = result.cells[ci];
      Rng rng = master.split(3000 + ci);
      const PrivacyBudget budget{cell.epsilon, delta, alpha};
      try {
        std::vector<PointPattern> patterns;
        if (cell.method == Method::lgcp) {
          LgcpConfig cfg = opt.lgcp;
          cfg.n_syn = opt.n_syn;
          SynthesisReport rep = synth_lgcp_network(data, net, dnet, budget, cfg, rng);
          cell.manifests.push_back(rep.manifest());
          for (const std::string& w : rep.warnings) {
            cell_warnings[ci].push_back("network/lgcp/eps=" + fmt_num(cell.epsilon) + ": " + w);
          }
          patterns = std::move(rep.patterns);
        } else if (cell.method == Method::laplace) {
          nlohmann::json first;
          std::vector<std::size_t> counts;
          for (int k = 0; k < opt.n_syn; ++k) {
            SynthesisReport rep =
                synth_laplace_network(data, net, dnet, budget, rng, opt.laplace_scaling);
            if (k == 0) first = rep.manifest();
            counts.push_back(rep.patterns.front().size());
            patterns.push_back(std::move(rep.patterns.front()));
          }
          first["replicate_counts"] = counts;
          cell.manifests.push_back(std::move(first));
        } else {
          finish_infeasible(cell, "the kernel synthesizer is planar-only");
          return;
        }
        std::vector<double> counts;
        std::vector<KCurve> syn_curves;
        for (const PointPattern& pat : patterns) {
          counts.push_back(static_cast<double>(pat.size()));
          if (pat.size() >= 2) {
            syn_curves.push_back(khat_network(dnet.net, pat.net_locs, r_grid));
          } else {
            KCurve zero;
            zero.r = r_grid;
            zero.k.assign(r_grid.size(), 0.0);
            syn_curves.push_back(std::move(zero));
          }
        }
        cell.npoints_mean = mean_of(counts);
        if (!k_ori.r.empty()) {
          cell.mise = mise(k_ori, syn_curves);
          cell.k_ori_mean = k_ori;
        } else {
          cell.mise = kNaN;
        }
        cell.k_syn_mean = mean_curve(syn_curves);
      } catch (const CalibrationError& e) {
        finish_infeasible(cell, e.what());
      } catch (const NumericalError& e) {
        finish_infeasible(cell, e.what());
      }
    });
  }
  run_jobs(jobs, opt.threads);

  for (std::size_t ci = 0; ci < result.cells.size(); ++ci) {
    result.warnings.insert(result.warnings.end(), cell_warnings[ci].begin(),
                           cell_warnings[ci].end());
    if (!result.cells[ci].feasible) result.any_infeasible = true;
  }
  return result;
}

const NetworkFixture& street_grid_fixture() {
  static const NetworkFixture fx = [] {
    const int nx = 6, ny = 5;
    const double sx = 110.0, sy = 105.0;
    std::vector<Point2> nodes;
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) nodes.push_back(Point2{i * sx, j * sy});
    }
    const auto id = [nx](int i, int j) { return j * nx + i; };
    std::vector<std::pair<int, int>> edges;
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i + 1 < nx; ++i) {
        if (j == 1 && i == 2) continue;  // gaps keep the grid from being regular
        if (j == 3 && i == 0) continue;
        edges.emplace_back(id(i, j), id(i + 1, j));
      }
    }
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j + 1 < ny; ++j) {
        if (i == 4 && j == 2) continue;
        edges.emplace_back(id(i, j), id(i, j + 1));
      }
    }
    LinearNetwork net(std::move(nodes), edges);

    // 85 points clustered around two hotspots, drawn by length-weighted
    // segment choice and Gaussian acceptance toward the nearest hotspot.
    Rng rng(412873905217ULL);
    std::vector<double> cum;
    double total = 0.0;
    for (const auto& s : net.segments()) {
      total += s.length;
      cum.push_back(total);
    }
    const Point2 hot1{110.0, 105.0}, hot2{440.0, 315.0};
    const double bw = 90.0;
    PointPattern pat;
    while (pat.size() < 85) {
      const double u = rng.uniform01() * total;
      const int seg = static_cast<int>(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
      const NetworkLoc loc{seg, rng.uniform01() * net.segment(seg).length};
      const Point2 p = net.point_at(loc);
      const double d1 = dist(p, hot1), d2 = dist(p, hot2);
      const double w = 0.55 * std::exp(-d1 * d1 / (2.0 * bw * bw)) +
                       0.45 * std::exp(-d2 * d2 / (2.0 * bw * bw));
      if (rng.uniform01() < w) pat.push_network(net, loc);
    }
    return NetworkFixture{std::move(net), std::move(pat)};
  }();
  return fx;
}

std::string results_csv(const SweepResult& result) {
  std::ostringstream os;
  os << "intensity,method,epsilon,pmse_mean,pmse_std,npoints_mean,npoints_ori,mise,status\n";
  for (const SweepCell& c : result.cells) {
    const auto cellnum = [](double v) { return std::isnan(v) ? std::string() : fmt_num(v); };
    os << c.intensity << ',' << method_name(c.method) << ',' << fmt_num(c.epsilon) << ','
       << cellnum(c.pmse_mean) << ',' << cellnum(c.pmse_std) << ',' << cellnum(c.npoints_mean)
       << ',' << fmt_num(c.npoints_ori) << ',' << cellnum(c.mise) << ','
       << (c.feasible ? "ok" : "infeasible: " + c.error) << '\n';
  }
  return os.str();
}

std::string kcurve_csv(const KCurve& curve) {
  std::ostringstream os;
  os << "r,khat\n";
  for (std::size_t i = 0; i < curve.r.size(); ++i) {
    os << fmt_num(curve.r[i]) << ',' << fmt_num(curve.k[i]) << '\n';
  }
  return os.str();
}

std::vector<std::string> draw_archive_csv(const PosteriorSummary& posterior,
                                          const std::vector<double>& option_params,
                                          const std::vector<double>& option_sigmas) {
  std::vector<std::string> out;
  if (posterior.chains <= 0 || posterior.per_chain <= 0) return out;
  const Eigen::Index nbeta = posterior.draws.empty() ? 0 : posterior.draws.front().beta.size();
  for (int c = 0; c < posterior.chains; ++c) {
    std::ostringstream os;
    os << "draw,range,sigma";
    for (Eigen::Index v = 0; v < nbeta; ++v) os << ",beta_" << (v + 1);
    os << ",log_post\n";
    for (int t = 0; t < posterior.per_chain; ++t) {
      const PosteriorDraw& d = posterior.draws[static_cast<std::size_t>(c) * posterior.per_chain + t];
      os << t << ',' << fmt_num(option_params[d.option]) << ','
         << fmt_num(option_sigmas[d.option]);
      for (Eigen::Index v = 0; v < nbeta; ++v) os << ',' << fmt_num(d.beta[v]);
      os << ',' << fmt_num(d.log_post) << '\n';
    }
    out.push_back(os.str());
  }
  return out;
}

}  // namespace ppsynth
