#include "glv/slices.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "glv/errors.hpp"
#include "glv/hodge.hpp"
#include "glv/operators.hpp"
#include "glv/parallel.hpp"
#include "glv/quadrature.hpp"

namespace glv {

double SliceScan::good_fraction(double delta, double K) const {
  if (slices.empty()) return 0.0;
  std::size_t n = 0;
  for (const auto& s : slices) n += s.is_good(delta, K);
  return double(n) / double(slices.size());
}

namespace {

struct SliceIntegrals {
  double e = 0, par = 0, w = 0, w2 = 0, xi = 0, second = 0;
  bool hodge_ok = true;
};

// Region of the slab cross-section: the unit disk if the grid holds it.
Region cross_section(const GridSpec& pg) {
  const Region disk = Region::ball({0.0, 0.0}, 1.0);
  try {
    RegionWeights(pg, disk).check_inside();
    return disk;
  } catch (const DomainError&) {
    return Region::whole_grid();
  }
}

SliceIntegrals integrate_slice(const ComplexField& u, std::size_t k, const Region& region) {
  const GridSpec& g = u.grid();
  const GridSpec pg = g.plane();
  const double eps = u.epsilon(), e2 = eps * eps;
  const double h2 = g.h * g.h;
  RegionWeights w(pg, region);
  const ComplexField v = u.slice(k);
  SliceIntegrals out;

  std::vector<double> dstar_x, dstar_y;  // nodal d*beta
  std::vector<double> beta;
  std::optional<HodgeParts> parts;
  try {
    parts = hodge_decompose(v);
  } catch (const Error&) {
    out.hodge_ok = false;
  }
  for (std::size_t j = w.row_begin(); j < w.row_end(); ++j)
    for (std::size_t i = w.col_begin(); i < w.col_end(); ++i) {
      const double wt = w(i, j);
      if (wt == 0.0) continue;
      const std::size_t n = g.index(i, j, k);
      if (!u.active(n)) continue;
      const auto d = node_gradient(u, i, j, k);
      const double m = 1.0 - std::norm(u[n]);
      const double W = 0.25 * m * m / e2;
      const double du2 = std::norm(d[0]) + std::norm(d[1]) + std::norm(d[2]);
      const double e = 0.5 * du2 + W;
      out.e += wt * e;
      out.par += wt * std::norm(d[2]);
      out.w += wt * W;
      out.w2 += wt * 2.0 * W;
      if (parts && i > 0 && j > 0 && i + 1 < g.nx && j + 1 < g.ny) {
        const GridSpec& dg = parts->dual;
        const auto& b = parts->beta.values();
        const double b11 = b[dg.index(i, j)], b01 = b[dg.index(i - 1, j)];
        const double b10 = b[dg.index(i, j - 1)], b00 = b[dg.index(i - 1, j - 1)];
        const double bx = (b11 + b10 - b01 - b00) / (2.0 * g.h);
        const double by = (b11 + b01 - b10 - b00) / (2.0 * g.h);
        const double sx = by, sy = -bx;  // d*beta
        const double bc = 0.25 * (b11 + b01 + b10 + b00);
        // nodal jv: mean of the two adjacent edges per axis
        const auto& jx = parts->jv.component(0);
        const auto& jy = parts->jv.component(1);
        const std::size_t p = pg.index(i, j);
        const double jvx = 0.5 * (jx[p] + jx[p - 1]), jvy = 0.5 * (jy[p] + jy[p - g.nx]);
        out.xi += wt * std::abs(bc);
        out.second += wt * ((jvx - sx) * (jvx - sx) + (jvy - sy) * (jvy - sy) +
                            std::abs(e - 0.5 * (sx * sx + sy * sy)));
      }
    }
  out.e *= h2;
  out.par *= h2;
  out.w *= h2;
  out.w2 *= h2;
  out.xi *= h2;
  out.second *= h2;
  out.second += out.par;
  return out;
}

}  // namespace

SliceScan good_slice_scan(const ComplexField& u) {
  const GridSpec& g = u.grid();
  if (g.dim() != 3) throw PreconditionError("good_slice_scan needs a cylinder field");
  const std::size_t nt = g.nt;
  const double ht = g.ht();
  const double L = std::abs(std::log(u.epsilon()));
  const Region region = cross_section(g.plane());
  std::vector<SliceIntegrals> I(nt);
  for (std::size_t k = 0; k < nt; ++k) I[k] = integrate_slice(u, k, region);

  SliceScan scan;
  for (const auto& s : I) scan.theta += s.e / (std::numbers::pi * L);
  scan.theta /= double(nt);

  std::vector<double> radii;
  for (double r = 0.5; r >= ht; r *= 0.5) radii.push_back(r);
  const double period = GridSpec::t_period;
  for (std::size_t k = 0; k < nt; ++k) {
    SliceReport rep;
    rep.t = g.t(k);
    rep.energy_theta = I[k].e / (std::numbers::pi * L);
    rep.par_energy = I[k].par;
    rep.w_mass = I[k].w2;
    rep.xi_mass = I[k].xi;
    rep.hodge_ok = I[k].hodge_ok;
    for (double r : radii) {
      double se = 0, s2 = 0, s3 = 0;
      for (std::size_t q = 0; q < nt; ++q) {
        // periodic distance of slice q from slice k
        double d = std::abs(g.t(q) - rep.t);
        d = std::min(d, period - d);
        const double cover =
            std::clamp((r - (d - 0.5 * ht)) / ht, 0.0, 1.0);  // covered fraction of the t-cell
        if (cover == 0.0) continue;
        se += cover * I[q].e;
        s2 += cover * I[q].second;
        s3 += cover * (I[q].w + I[q].xi);
      }
      se *= ht / r;
      s2 *= ht / r;
      s3 *= ht / r;
      rep.sup_energy = std::max(rep.sup_energy, std::abs(se - 2.0 * std::numbers::pi * scan.theta * L) / L);
      rep.sup_second = std::max(rep.sup_second, s2 / L);
      rep.sup_third = std::max(rep.sup_third, s3);
    }
    scan.slices.push_back(rep);
  }
  return scan;
}

std::string slice_scan_csv(const SliceScan& scan, double delta, double K) {
  std::ostringstream os;
  os << "t,energy_theta,par_energy,w_mass,xi_mass,sup_energy,sup_second,sup_third,good\n";
  char buf[512];
  for (const auto& s : scan.slices) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", s.t,
                  s.energy_theta, s.par_energy, s.w_mass, s.xi_mass, s.sup_energy, s.sup_second,
                  s.sup_third, int(s.is_good(delta, K)));
    os << buf;
  }
  return os.str();
}

double offslice_xi_ratio(const ComplexField& u, std::size_t k, int points_per_axis) {
  const GridSpec& g = u.grid();
  if (g.dim() != 3) throw PreconditionError("offslice_xi_ratio needs a cylinder field");
  const std::size_t N = g.size();
  const Cutoff phi;
  // nodal jv = chi^2 ju
  std::array<std::vector<double>, 3> jv;
  for (auto& c : jv) c.assign(N, 0.0);
  for (std::size_t kk = 0; kk < g.nt; ++kk)
    for (std::size_t j = 0; j < g.ny; ++j)
      for (std::size_t i = 0; i < g.nx; ++i) {
        const std::size_t n = g.index(i, j, kk);
        if (!u.active(n)) continue;
        const auto d = node_gradient(u, i, j, kk);
        const cplx v = u[n];
        const double c = hodge_chi(std::abs(v));
        for (std::size_t a = 0; a < 3; ++a)
          jv[a][n] = c * c * (v.real() * d[a].imag() - v.imag() * d[a].real());
      }
  // djv pairs (xy, xt, yt) at interior nodes, times the cutoff
  struct Src {
    double x, y, t, w[3];
  };
  std::vector<Src> src;
  const double h = g.h, ht = g.ht();
  double smax = 0.0;
  std::vector<Src> all;
  for (std::size_t kk = 0; kk < g.nt; ++kk)
    for (std::size_t j = 1; j + 1 < g.ny; ++j)
      for (std::size_t i = 1; i + 1 < g.nx; ++i) {
        const std::size_t n = g.index(i, j, kk);
        if (!u.active(n) || !u.active(n - 1) || !u.active(n + 1) || !u.active(n - g.nx) ||
            !u.active(n + g.nx))
          continue;
        const std::size_t km = g.index(i, j, (kk + g.nt - 1) % g.nt);
        const std::size_t kp = g.index(i, j, (kk + 1) % g.nt);
        auto dx = [&](int a) { return (jv[a][n + 1] - jv[a][n - 1]) / (2 * h); };
        auto dy = [&](int a) { return (jv[a][n + g.nx] - jv[a][n - g.nx]) / (2 * h); };
        auto dt = [&](int a) { return (jv[a][kp] - jv[a][km]) / (2 * ht); };
        const double f = phi(g.x(i), g.y(j));
        if (f == 0.0) continue;
        Src s{g.x(i), g.y(j), g.t(kk), {f * (dx(1) - dy(0)), f * (dx(2) - dt(0)), f * (dy(2) - dt(1))}};
        const double m = std::max({std::abs(s.w[0]), std::abs(s.w[1]), std::abs(s.w[2])});
        smax = std::max(smax, m);
        all.push_back(s);
      }
  for (const auto& s : all)
    if (std::max({std::abs(s.w[0]), std::abs(s.w[1]), std::abs(s.w[2])}) > 1e-4 * smax)
      src.push_back(s);
  if (src.empty()) return 0.0;
  const double vol = h * h * ht;
  const double period = GridSpec::t_period;
  const double t0 = g.t(k);
  double num = 0.0, den = 0.0;
  const int P = points_per_axis;
  for (int b = 0; b < P; ++b)
    for (int a = 0; a < P; ++a) {
      const double x = -0.75 + 1.5 * (a + 0.5) / P, y = -0.75 + 1.5 * (b + 0.5) / P;
      if (std::hypot(x, y) >= 0.75) continue;
      double gx[3][3] = {};
      for (const auto& s : src) {
        double dtt = t0 - s.t;
        dtt -= period * std::round(dtt / period);
        const double rx = x - s.x, ry = y - s.y;
        const double r2 = rx * rx + ry * ry + dtt * dtt;
        if (r2 < 0.25 * h * h) continue;
        const double k3 = -vol / (4.0 * std::numbers::pi * r2 * std::sqrt(r2));
        for (int p = 0; p < 3; ++p) {
          gx[p][0] += k3 * s.w[p] * rx;
          gx[p][1] += k3 * s.w[p] * ry;
          gx[p][2] += k3 * s.w[p] * dtt;
        }
      }
      auto sq = [&](int p) { return gx[p][0] * gx[p][0] + gx[p][1] * gx[p][1] + gx[p][2] * gx[p][2]; };
      den += sq(0);
      num += sq(1) + sq(2);
    }
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

}  // namespace glv
