#include "runner.hpp"

#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

#include "glv/ansatz.hpp"
#include "glv/errors.hpp"
#include "glv/hodge.hpp"
#include "glv/io.hpp"
#include "glv/operators.hpp"
#include "glv/profile.hpp"
#include "glv/report.hpp"
#include "glv/slices.hpp"
#include "glv/solver.hpp"
#include "glv/vortex.hpp"

namespace glv::cli {

namespace {

// shortest text that reads back to the same double
std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::size_t grid_n(const RunConfig& cfg, std::size_t fallback) { return cfg.n ? cfg.n : fallback; }

GridSpec config_grid(const RunConfig& cfg, std::size_t fallback) {
  const std::size_t n = grid_n(cfg, fallback);
  return cfg.radius > 0.0 ? GridSpec::disk(n, cfg.half_width, cfg.radius)
                          : GridSpec::square(n, cfg.half_width);
}

VortexSpec config_spec(const RunConfig& cfg, double eps) {
  VortexSpec s;
  if (!cfg.centers.empty()) {
    s.centers = cfg.centers;
    s.degrees = cfg.degrees;
  } else if (cfg.separation_exponent) {
    s = VortexSpec::polygon(cfg.degrees, eps, *cfg.separation_exponent);
  } else if (cfg.degrees.size() == 1) {
    s = VortexSpec::ring(cfg.degrees, 0.0);
  } else {
    throw ConfigError("several vortices need centers or separation_exponent");
  }
  if (cfg.jitter > 0.0) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> d(-cfg.jitter, cfg.jitter);
    for (auto& c : s.centers) {
      c.x += d(rng);
      c.y += d(rng);
    }
  }
  s.validate();
  return s;
}

int total_degree(const RunConfig& cfg) {
  int k = 0;
  for (int d : cfg.degrees) k += d;
  return k;
}

std::vector<double> default_radii(const ComplexField& u) {
  const GridSpec& g = u.grid();
  const double R = g.has_disk_mask() ? g.disk_radius : std::min(-g.origin_x, g.x_max());
  std::vector<double> r;
  for (double x = std::ldexp(1.0, int(std::floor(std::log2(0.6 * R)))); x >= 4.0 * g.h; x *= 0.5)
    r.insert(r.begin(), x);
  return r;
}

ExperimentReport profile_report(int kappa) {
  const RadialProfile p = solve_radial_profile(kappa, std::max(40.0, 25.0 * kappa), 1e-8);
  ExperimentReport rep;
  rep.name = "profile";
  rep.input("kappa", double(kappa));
  const double a = 0.5 * kappa * kappa;
  rep.predicted = a;
  rep.measured = 400.0 * (1.0 - p.value(20.0));
  rep.tolerance = 0.1 * a;
  rep.extra("sup_residual", p.sup_residual());
  rep.extra("slope", p.slope());
  rep.tables.emplace_back("profile", p.to_csv());
  rep.settle();
  return rep;
}

std::vector<ExperimentReport> analyze(const ComplexField& u) {
  std::vector<ExperimentReport> out;
  const ClusterOptions co;
  const auto clusters = detect_clusters(u, co);
  const auto pd = potential_degree_audit(clusters, co.delta);
  {
    ExperimentReport r;
    r.name = "potential_degree";
    r.input("delta", co.delta);
    r.input("eps", u.epsilon());
    int bad = 0;
    for (const auto& row : pd.rows) bad += !row.pass;
    r.predicted = 0.0;
    r.measured = bad;
    r.tolerance = 0.0;
    r.extra("clusters", double(clusters.size()));
    r.extra("min_mass", pd.rows.empty() ? 0.0 : pd.min_mass);
    r.extra("abs_degree_sum", pd.abs_degree_sum);
    r.tables.emplace_back("clusters", clusters_csv(clusters));
    r.settle();
    out.push_back(r);
  }
  {
    const auto pw = pointwise_bounds_audit(u);
    ExperimentReport r;
    r.name = "pointwise_bounds";
    r.input("eps", u.epsilon());
    r.predicted = 0.0;
    r.measured = pw.pass ? 0.0 : 1.0;
    r.tolerance = 0.0;
    r.extra("c1", pw.c1);
    r.extra("c2", pw.c2);
    r.extra("c3", pw.c3);
    r.settle();
    out.push_back(r);
  }
  if (u.grid().dim() == 2 && !u.grid().has_disk_mask()) {
    const HodgeParts parts = hodge_decompose(u);
    std::vector<Point2> pts;
    std::vector<VortexCluster> inside;
    for (const auto& c : clusters)
      if (!c.touches_boundary) {
        pts.push_back(c.center);
        inside.push_back(c);
      }
    const auto b = beta_at(parts, pts);
    const auto pred = beta_prediction(inside, u.epsilon());
    const double L = std::abs(std::log(u.epsilon()));
    double worst = 0.0;
    for (std::size_t q = 0; q < b.size(); ++q) worst = std::max(worst, std::abs(b[q] - pred[q]) / L);
    ExperimentReport r;
    r.name = "beta_potential";
    r.input("eps", u.epsilon());
    r.predicted = 0.0;
    r.measured = worst;
    r.tolerance = 0.15;
    r.extra("theta_via_beta", theta_via_beta(parts, inside));
    r.extra("coex_defect", coex_defect(u, parts));
    r.extra("harmonic_defect", parts.harmonic_defect);
    r.extra("harmonic_scale", parts.harmonic_scale);
    const Point2 c = inside.empty() ? Point2{} : inside.front().center;
    std::vector<double> radii;
    for (double x = 2.0 * u.grid().h; x < 0.7; x *= 1.25) radii.push_back(x);
    r.tables.emplace_back("beta_profile", beta_line_profile(parts, c, radii));
    r.settle();
    out.push_back(r);
  }
  if (u.grid().dim() == 3) {
    const SliceScan scan = good_slice_scan(u);
    ExperimentReport r;
    r.name = "good_slices";
    r.input("eps", u.epsilon());
    r.predicted = 1.0;
    r.measured = scan.good_fraction(0.5, 10.0);
    r.tolerance = 0.5;
    r.extra("theta", scan.theta);
    r.tables.emplace_back("slices", slice_scan_csv(scan, 0.5, 10.0));
    r.settle();
    out.push_back(r);
  }
  return out;
}

}  // namespace

ComplexField config_field(const RunConfig& cfg) {
  if (!cfg.field.empty()) return load_field(cfg.field);
  const double eps = cfg.eps.front();
  return build_vortex_product(config_spec(cfg, eps), eps, config_grid(cfg, 513));
}

ComplexField solved_field(const RunConfig& cfg, ExperimentReport* solve_report) {
  if (!cfg.field.empty()) return load_field(cfg.field);
  const double eps = cfg.eps.front();
  const std::size_t n = grid_n(cfg, 257);
  const GridSpec g = GridSpec::disk(n, cfg.half_width, cfg.radius > 0 ? cfg.radius : cfg.half_width);
  const int kappa = total_degree(cfg);
  const BoundaryData bc = dirichlet_degree_data(kappa, g);
  const ComplexField a = build_vortex_product(config_spec(cfg, eps), eps, g);
  std::vector<cplx> v = a.values();
  for (std::size_t q = 0; q < bc.nodes.size(); ++q) v[bc.nodes[q]] = bc.values[q];
  SolveConfig sc = cfg.solver;
  sc.newton = true;
  const SolveResult res = relax(a.with_values(std::move(v)), bc, sc);
  if (solve_report) {
    ExperimentReport& r = *solve_report;
    r.name = "solve";
    r.input("eps", eps);
    r.input("n", double(n));
    r.input("degree", double(kappa));
    r.input("residual_tol", sc.residual_tol);
    r.predicted = 0.0;
    r.measured = res.residual;
    r.tolerance = sc.residual_tol;
    r.extra("steps", res.steps);
    r.extra("newton_iterations", res.newton_iterations);
    r.tables.emplace_back("descent", descent_log_csv(res.log));
    r.settle();
  }
  return res.field;
}

std::vector<ExperimentReport> run_experiment(const RunConfig& cfg,
                                             const std::filesystem::path& out_dir) {
  cfg.validate();
  std::vector<ExperimentReport> out;
  auto add = [&](std::vector<ExperimentReport> v) {
    for (auto& r : v) out.push_back(std::move(r));
  };
  const std::string& e = cfg.experiment;
  if (e == "profile") {
    for (int d : cfg.degrees) out.push_back(profile_report(std::abs(d)));
  } else if (e == "ansatz") {
    for (double eps : cfg.eps) {
      RunConfig c = cfg;
      c.eps = {eps};
      const ComplexField u = config_field(c);
      const auto spec = config_spec(c, eps);
      EnergyOptions opt;
      opt.allow_under_resolved = true;
      const double R = std::min(1.0, cfg.radius > 0 ? cfg.radius : cfg.half_width);
      const auto eb = energy_breakdown(u, Region::ball({}, R), opt);
      ExperimentReport r;
      r.name = "ansatz";
      r.input("eps", eps);
      r.input("degrees", num(double(total_degree(c))));
      r.predicted = identity_prediction(spec.centers, spec.degrees, eps);
      r.measured = eb.total / theta_normalization(eps, 2, 1.0);
      r.tolerance = std::max(cfg.tol, 4.0 / std::abs(std::log(eps)));
      r.extra("dirichlet", eb.dirichlet);
      r.extra("potential", eb.potential);
      r.extra("resolved", u.resolved());
      const auto path = out_dir / ("ansatz_eps" + num(eps) + ".glf");
      std::filesystem::create_directories(out_dir);
      dump_field(u, path);
      r.artifacts.push_back(path.filename().string());
      r.settle();
      out.push_back(r);
    }
  } else if (e == "solve") {
    ExperimentReport r;
    const ComplexField u = solved_field(cfg, &r);
    const auto path = out_dir / "solved.glf";
    std::filesystem::create_directories(out_dir);
    dump_field(u, path);
    r.artifacts.push_back(path.filename().string());
    out.push_back(r);
  } else if (e == "analyze") {
    add(analyze(config_field(cfg)));
  } else if (e == "identity") {
    for (double eps : cfg.eps) {
      IdentityConfig ic;
      ic.degrees = cfg.degrees;
      if (cfg.separation_exponent && cfg.centers.empty() && cfg.jitter == 0.0)
        ic.sigma = cfg.separation_exponent;
      else
        ic.centers = config_spec(cfg, eps).centers;
      ic.eps = eps;
      ic.n = grid_n(cfg, 8193);
      ic.tol = cfg.tol;
      ic.min_separation = cfg.min_separation;
      out.push_back(identity_experiment(ic));
    }
  } else if (e == "sweep") {
    for (double eps : cfg.eps) {
      SweepConfig sc;
      sc.kappa = cfg.sweep_kappa;
      sc.taus = cfg.taus;
      sc.eps = eps;
      sc.s0 = cfg.s0;
      sc.n = grid_n(cfg, 8193);
      sc.tol = cfg.tol > 0 ? cfg.tol : 0.35;
      add(density_sweep(sc));
    }
  } else if (e == "annulus") {
    const ComplexField u = config_field(cfg);
    const double R = std::min(1.0, cfg.radius > 0 ? cfg.radius : cfg.half_width);
    out.push_back(annulus_energy_check(u, {}, cfg.annulus_s, cfg.eta, R));
  } else if (e == "monotonicity" || e == "wdrop" || e == "pohozaev") {
    ExperimentReport sr;
    const ComplexField u = solved_field(cfg, &sr);
    if (!sr.name.empty()) out.push_back(sr);
    const double res = gl_residual(u).sup();
    if (e == "monotonicity")
      out.push_back(monotonicity_audit(u, {}, cfg.radii.empty() ? default_radii(u) : cfg.radii));
    else if (e == "wdrop")
      out.push_back(w_drop_scan(u, {}, total_degree(cfg), cfg.tau0, cfg.w_delta,
                                res <= kCertifiedResidual));
    else
      out.push_back(pohozaev_check(u));
  } else if (e == "clearing") {
    add(clearing_threshold_sweep(cfg.eps, std::abs(cfg.degrees.front())));
  } else if (e == "helix") {
    HelicalAuditConfig hc;
    hc.kappa = cfg.helix_kappa;
    hc.tau = cfg.helix_tau;
    hc.delta = cfg.helix_delta;
    hc.eps_list = cfg.eps;
    hc.radius_coefficient = cfg.helix_radius_coefficient;
    add(helical_energy_audit(hc));
  }
  for (auto& r : out) r.input("seed", std::to_string(cfg.seed));
  return out;
}

int run_config(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  const auto reports = run_experiment(cfg, out_dir);
  emit_report(reports, out_dir);
  bool ok = true;
  for (const auto& r : reports) ok = ok && r.pass;
  return ok ? 0 : 1;
}

}  // namespace glv::cli
