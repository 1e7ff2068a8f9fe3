#include "glv/experiments.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <chrono>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "glv/ansatz.hpp"
#include "glv/errors.hpp"
#include "glv/helical.hpp"
#include "glv/operators.hpp"
#include "glv/profile.hpp"
#include "glv/quadrature.hpp"
#include "glv/solver.hpp"
#include "glv/vortex.hpp"

namespace glv {

namespace {

constexpr double pi = std::numbers::pi;

// shortest text that reads back to the same double
std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  for (std::size_t q = 0; q < v.size(); ++q) {
    if (q) os << ';';
    if constexpr (std::is_same_v<T, double>)
      os << fmt(v[q]);
    else
      os << v[q];
  }
  return os.str();
}

std::string join_points(const std::vector<Point2>& p) {
  std::ostringstream os;
  for (std::size_t q = 0; q < p.size(); ++q) os << (q ? ";" : "") << fmt(p[q].x) << ' ' << fmt(p[q].y);
  return os.str();
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

double sup_residual(const ComplexField& u) { return gl_residual(u).sup(); }

void require_certified(const ComplexField& u, const char* who) {
  const double r = sup_residual(u);
  if (!(r <= kCertifiedResidual)) {
    std::ostringstream os;
    os << who << " needs a certified critical point (residual " << r << " > "
       << kCertifiedResidual << ")";
    throw PreconditionError(os.str());
  }
}

double omega(int n) { return n == 3 ? 2.0 : 1.0; }

}  // namespace

void ExperimentReport::input(const std::string& key, const std::string& value) {
  inputs.emplace_back(key, value);
}

void ExperimentReport::input(const std::string& key, double value) { input(key, fmt(value)); }

std::optional<double> ExperimentReport::find_extra(const std::string& key) const {
  for (const auto& [k, v] : extras)
    if (k == key) return v;
  return std::nullopt;
}

void ExperimentReport::settle() {
  pass = std::isfinite(measured) && std::abs(measured - predicted) <= tolerance;
}

double identity_prediction(const std::vector<Point2>& centers, const std::vector<int>& degrees,
                           double eps) {
  const double L = std::abs(std::log(eps));
  double t = 0.0;
  for (int k : degrees) t += double(k) * k;
  for (std::size_t i = 0; i < centers.size(); ++i)
    for (std::size_t j = i + 1; j < centers.size(); ++j)
      t += 2.0 * degrees[i] * degrees[j] * std::log(1.0 / norm(centers[i] - centers[j])) / L;
  return t;
}

ExperimentReport identity_experiment(const IdentityConfig& cfg) {
  Stopwatch sw;
  if (!(cfg.eps > 0.0 && cfg.eps < 0.5)) throw PreconditionError("eps out of (0, 1/2)");
  VortexSpec spec;
  if (cfg.sigma) {
    spec = VortexSpec::polygon(cfg.degrees, cfg.eps, *cfg.sigma);
  } else {
    spec.centers = cfg.centers;
    spec.degrees = cfg.degrees;
  }
  spec.validate();
  if (!(cfg.min_separation > 0.0)) throw PreconditionError("separation floor must be positive");
  const double floor = cfg.min_separation * cfg.eps;
  for (std::size_t i = 0; i < spec.centers.size(); ++i) {
    if (norm(spec.centers[i]) > 1.0 - 20.0 * cfg.eps)
      throw DomainError("vortex core too close to the boundary of D_1");
    for (std::size_t j = i + 1; j < spec.centers.size(); ++j)
      if (norm(spec.centers[i] - spec.centers[j]) < floor) {
        std::ostringstream os;
        os << "vortex separation " << norm(spec.centers[i] - spec.centers[j])
           << " below the floor " << cfg.min_separation << " eps = " << floor;
        throw PreconditionError(os.str());
      }
  }
  const VortexProduct vp(spec, cfg.eps);
  const GridSpec plane = GridSpec::square(cfg.n, 1.0);
  const EnergyBreakdown e = integrate_energy(vp, plane, Region::ball({0.0, 0.0}, 1.0), cfg.eps);

  ExperimentReport rep;
  rep.name = "identity_experiment";
  rep.input("degrees", join(cfg.degrees));
  if (cfg.sigma) rep.input("sigma", *cfg.sigma);
  rep.input("centers", join_points(spec.centers));
  rep.input("eps", cfg.eps);
  rep.input("n", double(cfg.n));
  rep.input("tol", cfg.tol);
  rep.input("min_separation", cfg.min_separation);
  const double L = std::abs(std::log(cfg.eps));
  rep.predicted = identity_prediction(spec.centers, spec.degrees, cfg.eps);
  rep.measured = e.normalized_theta;
  rep.tolerance = std::max(cfg.tol, 4.0 / L);
  rep.extra("dirichlet", e.dirichlet);
  rep.extra("potential", e.potential);
  rep.extra("total", e.total);
  rep.extra("log_eps", L);
  rep.settle();
  rep.runtime = sw.seconds();
  return rep;
}

double density_formula(int kappa, double tau) {
  const double k = kappa;
  return k + (k * k - k) * tau / (1.0 + tau);
}

std::vector<ExperimentReport> density_sweep(const SweepConfig& cfg) {
  if (cfg.kappa < 2) throw PreconditionError("density sweep needs kappa >= 2");
  if (!(cfg.s0 > 0.0)) throw PreconditionError("polygon scale s0 must be positive");
  std::vector<ExperimentReport> out;
  for (double tau : cfg.taus) {
    if (!(tau >= 0.0 && tau < 1.0)) throw PreconditionError("tau out of [0, 1)");
    const double R = cfg.s0 * std::pow(cfg.eps, tau / (1.0 + tau));
    const double chord = 2.0 * R * std::sin(pi / cfg.kappa);
    if (chord < 20.0 * cfg.eps) {
      std::ostringstream os;
      os << "polygon side " << chord << " below the separation floor 20 eps";
      throw PreconditionError(os.str());
    }
    IdentityConfig ic;
    ic.degrees.assign(std::size_t(cfg.kappa), 1);
    ic.centers = VortexSpec::ring(ic.degrees, R).centers;
    ic.eps = cfg.eps;
    ic.n = cfg.n;
    ic.tol = cfg.tol;
    ExperimentReport r = identity_experiment(ic);
    ExperimentReport rep;
    rep.name = "density_sweep";
    rep.input("kappa", double(cfg.kappa));
    rep.input("tau", tau);
    rep.input("eps", cfg.eps);
    rep.input("s0", cfg.s0);
    rep.input("n", double(cfg.n));
    rep.input("tol", cfg.tol);
    rep.predicted = density_formula(cfg.kappa, tau);
    rep.measured = r.measured;
    rep.tolerance = r.tolerance;
    rep.extra("kappa", cfg.kappa);
    rep.extra("tau", tau);
    rep.extra("radius", R);
    rep.extra("theta_identity", r.predicted);
    rep.extra("theta_sup", 0.5 * cfg.kappa * (cfg.kappa + 1.0));
    rep.settle();
    rep.runtime = r.runtime;
    out.push_back(std::move(rep));
  }
  return out;
}

ExperimentReport annulus_energy_check(const ComplexField& u, Point2 center, double s,
                                      double eta, double r_out) {
  Stopwatch sw;
  if (u.grid().dim() != 2) throw PreconditionError("annulus check works on planar fields");
  if (!(s > 0.0 && s < r_out)) throw PreconditionError("annulus needs 0 < s < r_out");
  if (!(eta > 0.0 && eta <= 1.0)) throw PreconditionError("eta out of (0, 1]");
  const GridSpec& g = u.grid();
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i) {
      const std::size_t n = g.index(i, j);
      if (!u.active(n) || std::abs(u[n]) > 0.5) continue;
      const double d = norm(Point2{g.x(i), g.y(j)} - center);
      if (d >= eta * s && d <= r_out) {
        std::ostringstream os;
        os << "vorticity set meets the annulus at (" << g.x(i) << ", " << g.y(j) << ")";
        throw DomainError(os.str());
      }
    }
  const int k = loop_degree(u, Circle{center, s, std::max(256, int(16 * pi * s / g.h))});
  EnergyOptions opt;
  opt.allow_under_resolved = true;  // the annulus stays away from the cores
  const EnergyBreakdown e = energy_breakdown(u, Region::annulus(center, s, r_out), opt);
  ExperimentReport rep;
  rep.name = "annulus_energy_check";
  rep.input("center", join_points({center}));
  rep.input("s", s);
  rep.input("eta", eta);
  rep.input("r_out", r_out);
  rep.input("eps", u.epsilon());
  rep.predicted = pi * k * k * std::log(r_out / s);
  rep.measured = e.total;
  rep.tolerance = 3.0 * std::max(1.0, double(k) * k) *
                  std::max(1.0, std::log(std::log(1.0 / s)));
  rep.extra("degree", k);
  rep.extra("dirichlet", e.dirichlet);
  rep.extra("potential", e.potential);
  rep.settle();
  rep.runtime = sw.seconds();
  return rep;
}

ExperimentReport monotonicity_audit(const ComplexField& u, Point2 center,
                                    const std::vector<double>& radii, double t_center) {
  Stopwatch sw;
  if (radii.size() < 2) throw PreconditionError("monotonicity audit needs at least two radii");
  for (std::size_t q = 1; q < radii.size(); ++q)
    if (!(radii[q] > radii[q - 1])) throw PreconditionError("radii must increase");
  if (!(radii[0] > 0.0)) throw PreconditionError("radii must be positive");
  require_certified(u, "monotonicity audit");
  const int n = u.grid().dim();
  // radii and midpoints interleaved
  std::vector<double> rr;
  for (std::size_t q = 0; q < radii.size(); ++q) {
    if (q) rr.push_back(0.5 * (radii[q - 1] + radii[q]));
    rr.push_back(radii[q]);
  }
  const auto prof = ball_energy_profile(u, center, rr, t_center);
  std::vector<double> F(rr.size());
  for (std::size_t q = 0; q < rr.size(); ++q) {
    const double r = rr[q];
    const double flux = boundary_normal_energy(u, center, r, t_center);
    F[q] = std::pow(r, 2.0 - n) * flux + std::pow(r, 1.0 - n) * prof[q].potential2;
  }
  ExperimentReport rep;
  rep.name = "monotonicity_audit";
  rep.input("center", join_points({center}));
  rep.input("radii", join(radii));
  rep.input("t_center", t_center);
  rep.input("eps", u.epsilon());
  std::ostringstream tab;
  tab << "r,energy,normalized,F,lhs,rhs,ok\n";
  int bad = 0;
  double worst = 0.0;
  char buf[256];
  auto normalized = [&](std::size_t q) { return prof[q].energy / std::pow(rr[q], n - 2.0); };
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,,,\n", rr[0], prof[0].energy,
                normalized(0), F[0]);
  tab << buf;
  for (std::size_t q = 2; q < rr.size(); q += 2) {
    const double a = rr[q - 2], b = rr[q];
    const double lhs = (normalized(q) - normalized(q - 2)) / (b - a);
    const double rhs = (F[q - 2] + 4.0 * F[q - 1] + F[q]) / 6.0;
    const bool nondecrease = normalized(q) >= normalized(q - 2);
    const bool ok = nondecrease && lhs >= rhs - 0.05 * std::abs(lhs);
    if (!ok) ++bad;
    if (lhs != 0.0) worst = std::max(worst, (rhs - lhs) / std::abs(lhs));
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", b, prof[q].energy,
                  normalized(q), F[q], lhs, rhs, int(ok));
    tab << buf;
  }
  rep.predicted = 0.0;
  rep.measured = bad;
  rep.tolerance = 0.0;
  rep.extra("worst_relative_shortfall", worst);
  rep.extra("dimension", n);
  rep.tables.emplace_back("radius_profile", tab.str());
  rep.settle();
  rep.runtime = sw.seconds();
  return rep;
}

ExperimentReport w_drop_scan(const ComplexField& u, Point2 center, int kappa, double tau0,
                             double delta, bool certified) {
  Stopwatch sw;
  if (!(tau0 > 0.0)) throw PreconditionError("tau0 must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw PreconditionError("delta out of (0, 1)");
  if (certified) require_certified(u, "w_drop_scan");
  const double eps = u.epsilon();
  const double lo = std::pow(eps, tau0), hi = std::pow(eps, delta * tau0);
  std::vector<double> radii;
  for (int m = int(std::floor(-std::log2(lo))); m >= 0; --m) {
    const double r = std::ldexp(1.0, -m);
    if (r >= lo && r <= hi) radii.push_back(r);
  }
  if (radii.empty()) throw PreconditionError("no dyadic radius in [eps^tau0, eps^(delta tau0)]");
  const int n = u.grid().dim();
  const auto prof = ball_energy_profile(u, center, radii);
  double best = std::numeric_limits<double>::infinity(), rstar = 0.0;
  std::ostringstream tab;
  tab << "r,scaled_potential\n";
  char buf[96];
  for (const auto& b : prof) {
    const double v = std::pow(b.r, 2.0 - n) * b.potential2;
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", b.r, v);
    tab << buf;
    if (v < best) {
      best = v;
      rstar = b.r;
    }
  }
  const double bound = pi * omega(n) * kappa * kappa / (1.0 - delta);
  ExperimentReport rep;
  rep.name = "w_drop_scan";
  rep.input("center", join_points({center}));
  rep.input("kappa", double(kappa));
  rep.input("tau0", tau0);
  rep.input("delta", delta);
  rep.input("certified", certified ? "true" : "false");
  rep.input("eps", eps);
  rep.predicted = 0.0;
  rep.measured = std::max(0.0, best - bound);
  rep.tolerance = 0.0;
  rep.extra("r_star", rstar);
  rep.extra("min_value", best);
  rep.extra("bound", bound);
  rep.tables.emplace_back("w_drop", tab.str());
  rep.settle();
  rep.runtime = sw.seconds();
  return rep;
}

ExperimentReport pohozaev_check(const ComplexField& u, Point2 center) {
  Stopwatch sw;
  const GridSpec& g = u.grid();
  if (g.dim() != 2) throw PreconditionError("Pohozaev check works on planar fields");
  require_certified(u, "Pohozaev check");
  const auto bn = boundary_nodes(g, 1);
  for (std::size_t n : bn)
    if (std::abs(std::abs(u[n]) - 1.0) > 1e-9)
      throw PreconditionError("modulus off the unit boundary trace");
  double R;
  if (g.has_disk_mask()) {
    R = g.disk_radius - norm(center - g.disk_center);
  } else {
    R = std::min({center.x - g.x(0), g.x_max() - center.x, center.y - g.y(0), g.y_max() - center.y});
  }
  R -= 4.0 * g.h;
  if (!(R > 0.0)) throw DomainError("no room for the Pohozaev circle");
  const double e2 = u.epsilon() * u.epsilon();
  const double lhs = ball_energy_profile(u, center, {R})[0].potential2;
  const int M = std::max(1024, int(std::ceil(16.0 * pi * R / g.h)));
  double acc = 0.0;
  for (int q = 0; q < M; ++q) {
    const double ph = 2.0 * pi * (q + 0.5) / M;
    const double c = std::cos(ph), s = std::sin(ph);
    const double x = center.x + R * c, y = center.y + R * s;
    const auto d = gradient_at(u, x, y);
    const cplx dn = c * d[0] + s * d[1], dt = -s * d[0] + c * d[1];
    const double m = 1.0 - std::norm(u.interpolate(x, y));
    acc += 0.5 * (std::norm(dt) - std::norm(dn)) + 0.25 * m * m / e2;
  }
  const double rhs = R * acc * (2.0 * pi * R / M);
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  ExperimentReport rep;
  rep.name = "pohozaev_check";
  rep.input("center", join_points({center}));
  rep.input("eps", u.epsilon());
  rep.input("radius", R);
  rep.predicted = 0.0;
  // both sides at roundoff level: the trivial balance 0 = 0
  rep.measured = scale > 1e-12 ? std::abs(lhs - rhs) / scale : 0.0;
  rep.tolerance = 0.03;
  rep.extra("potential_side", lhs);
  rep.extra("boundary_side", rhs);
  rep.settle();
  rep.runtime = sw.seconds();
  return rep;
}

double radial_ball_energy(int kappa, double eps, double r) {
  if (!(eps > 0.0 && r > 0.0)) throw PreconditionError("radial energy needs eps, r > 0");
  const auto p = profile_for(kappa);
  using GL = boost::math::quadrature::gauss<double, 30>;
  const double k2 = double(kappa) * kappa;
  auto density = [&](double s) {
    double f, df;
    p->eval(s, f, df);
    const double m = 1.0 - f * f;
    return 2.0 * pi * s * (0.5 * (df * df + k2 * f * f / (s * s)) + 0.25 * m * m);
  };
  const double S = r / eps;
  double total = 0.0, a = 0.0, b = std::min(1.0, S);
  while (a < S) {
    total += GL::integrate(density, a, b);
    a = b;
    b = std::min(S, a < 8.0 ? a + 1.0 : 1.5 * a);
  }
  return total;
}

std::vector<ExperimentReport> clearing_threshold_sweep(const std::vector<double>& eps_list,
                                                       int kappa, double r) {
  Stopwatch sw;
  if (eps_list.empty()) throw PreconditionError("clearing sweep needs at least one eps");
  std::vector<double> ratio;
  std::ostringstream tab;
  tab << "eps,energy,eta_star_over_pi\n";
  char buf[128];
  for (double eps : eps_list) {
    if (!(eps > 0.0 && eps < r)) throw PreconditionError("clearing sweep needs 0 < eps < r");
    const double E = radial_ball_energy(kappa, eps, r);
    ratio.push_back(E / std::log(r / eps) / pi);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", eps, E, ratio.back());
    tab << buf;
  }
  int inversions = 0;
  for (std::size_t q = 1; q < ratio.size(); ++q) inversions += !(ratio[q] < ratio[q - 1]);

  ExperimentReport fin;
  fin.name = "clearing_threshold";
  fin.input("eps", join(eps_list));
  fin.input("kappa", double(kappa));
  fin.input("r", r);
  fin.predicted = 1.0;
  fin.measured = ratio.back();
  fin.tolerance = 0.25;
  for (std::size_t q = 0; q < ratio.size(); ++q)
    fin.extra("eta_star_over_pi_" + fmt(eps_list[q]), ratio[q]);
  fin.tables.emplace_back("clearing_trend", tab.str());
  fin.settle();

  ExperimentReport trend;
  trend.name = "clearing_trend";
  trend.inputs = fin.inputs;
  trend.predicted = 0.0;
  trend.measured = inversions;
  trend.tolerance = 0.0;
  trend.settle();
  fin.runtime = trend.runtime = sw.seconds();
  return {fin, trend};
}

double helix_radius(int kappa, double eps, std::optional<double> coefficient) {
  const double c = coefficient ? *coefficient : std::sqrt(double(kappa - 1));
  return c / std::sqrt(std::abs(std::log(eps)));
}

std::vector<ExperimentReport> helical_energy_audit(const HelicalAuditConfig& cfg) {
  Stopwatch sw;
  if (cfg.kappa < 1) throw PreconditionError("helical audit needs kappa >= 1");
  if (!(cfg.tau >= 0.0 && cfg.tau < 1.0)) throw PreconditionError("tau out of [0, 1)");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw PreconditionError("delta out of (0, 1)");
  if (cfg.eps_list.size() < 2) throw PreconditionError("helical audit needs two eps values");
  std::vector<double> C, Eann, logs;
  bool annulus_clear = true;
  std::ostringstream tab;
  tab << "eps,radius,helix_radius,energy,fitted_constant,annulus_energy\n";
  char buf[256];
  for (double eps : cfg.eps_list) {
    if (!(eps > 0.0 && eps < 0.5)) throw PreconditionError("eps out of (0, 1/2)");
    const double R = std::pow(eps, -cfg.tau);
    const double d = helix_radius(cfg.kappa, eps, cfg.radius_coefficient);
    if (R <= d + 12.0 * eps) throw DomainError("domain too small for tau: cores reach dD_R");
    if (cfg.delta * R <= d + 12.0 * eps) annulus_clear = false;
    const std::vector<int> deg(std::size_t(cfg.kappa), 1);
    const VortexSpec spec = VortexSpec::ring(deg, cfg.kappa == 1 ? 0.0 : d);
    const VortexProduct vt(spec, eps);
    const int n_phi = std::max(4096, 8 * int(std::ceil(5.0 * pi * std::max(d, eps) / eps)));
    const std::vector<double> cores{d};
    const HelicalEnergy whole = helical_energy_polar(vt, cfg.kappa, eps, 0.0, R, cores, n_phi);
    const double Ea = cfg.delta * R > d + 12.0 * eps
                          ? helical_energy_polar(vt, cfg.kappa, eps, cfg.delta * R, R, cores, n_phi).total
                          : std::numeric_limits<double>::quiet_NaN();
    const double logn = std::log(1.0 / std::pow(eps, 1.0 + cfg.tau));
    C.push_back(whole.total / logn);
    Eann.push_back(Ea);
    logs.push_back(std::log(1.0 / eps));
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", eps, R, d, whole.total,
                  C.back(), Ea);
    tab << buf;
  }
  auto [cmin, cmax] = std::minmax_element(C.begin(), C.end());
  ExperimentReport rc;
  rc.name = "helical_energy_constant";
  rc.input("kappa", double(cfg.kappa));
  rc.input("tau", cfg.tau);
  rc.input("eps", join(cfg.eps_list));
  rc.input("delta", cfg.delta);
  if (cfg.radius_coefficient) rc.input("radius_coefficient", *cfg.radius_coefficient);
  rc.predicted = 0.0;
  rc.measured = (*cmax - *cmin) / *cmin;
  rc.tolerance = 0.2;
  for (std::size_t q = 0; q < C.size(); ++q) rc.extra("constant_" + fmt(cfg.eps_list[q]), C[q]);
  rc.tables.emplace_back("helical_energy", tab.str());
  rc.settle();
  std::vector<ExperimentReport> out{rc};
  if (annulus_clear) {
    // least-squares slope of the annulus energy against log(1/eps)
    double mx = 0, my = 0;
    for (std::size_t q = 0; q < logs.size(); ++q) {
      mx += logs[q];
      my += Eann[q];
    }
    mx /= double(logs.size());
    my /= double(logs.size());
    double sxy = 0, sxx = 0;
    for (std::size_t q = 0; q < logs.size(); ++q) {
      sxy += (logs[q] - mx) * (Eann[q] - my);
      sxx += (logs[q] - mx) * (logs[q] - mx);
    }
    ExperimentReport ra;
    ra.name = "helical_annulus_slope";
    ra.inputs = rc.inputs;
    ra.predicted = 0.0;
    ra.measured = sxx > 0 ? sxy / sxx : 0.0;
    ra.tolerance = 0.2;
    for (std::size_t q = 0; q < Eann.size(); ++q)
      ra.extra("annulus_energy_" + fmt(cfg.eps_list[q]), Eann[q]);
    ra.settle();
    out.push_back(ra);
  }
  for (auto& r : out) r.runtime = sw.seconds();
  return out;
}

}  // namespace glv
