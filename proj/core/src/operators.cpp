#include "glv/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "glv/errors.hpp"
#include "glv/parallel.hpp"

namespace glv {

namespace {

std::size_t wrap(std::ptrdiff_t k, std::size_t n) {
  const auto m = std::ptrdiff_t(n);
  return std::size_t(((k % m) + m) % m);
}

std::size_t nt_of(const GridSpec& g) { return g.dim() == 3 ? g.nt : 1; }

void require_finite_input(const ComplexField& u) {
  if (u.values().size() != u.grid().size()) throw PreconditionError("empty field");
}

}  // namespace

std::array<cplx, 3> node_gradient(const ComplexField& u, std::size_t i, std::size_t j,
                                  std::size_t k) {
  const GridSpec& g = u.grid();
  const std::size_t n = g.index(i, j, k);
  const double h = g.h;
  std::array<cplx, 3> d{};
  auto axis = [&](bool has_m, std::size_t nm, bool has_p, std::size_t np) -> cplx {
    has_m = has_m && u.active(nm);
    has_p = has_p && u.active(np);
    if (has_m && has_p) return (u[np] - u[nm]) / (2.0 * h);
    if (has_p) return (u[np] - u[n]) / h;
    if (has_m) return (u[n] - u[nm]) / h;
    return {};
  };
  d[0] = axis(i > 0, i > 0 ? n - 1 : n, i + 1 < g.nx, i + 1 < g.nx ? n + 1 : n);
  d[1] = axis(j > 0, j > 0 ? n - g.nx : n, j + 1 < g.ny, j + 1 < g.ny ? n + g.nx : n);
  if (g.dim() == 3) {
    const std::size_t km = wrap(std::ptrdiff_t(k) - 1, g.nt), kp = wrap(std::ptrdiff_t(k) + 1, g.nt);
    d[2] = (u[g.index(i, j, kp)] - u[g.index(i, j, km)]) / (2.0 * g.ht());
  }
  return d;
}

std::vector<std::uint8_t> interior_mask(const GridSpec& g, const std::vector<std::uint8_t>& a) {
  std::vector<std::uint8_t> m(g.size(), 0);
  const std::size_t nt = nt_of(g);
  for (std::size_t k = 0; k < nt; ++k)
    for (std::size_t j = 1; j + 1 < g.ny; ++j)
      for (std::size_t i = 1; i + 1 < g.nx; ++i) {
        const std::size_t n = g.index(i, j, k);
        m[n] = a[n] && a[n - 1] && a[n + 1] && a[n - g.nx] && a[n + g.nx];
      }
  return m;
}

ScalarField energy_density(const ComplexField& u) {
  require_finite_input(u);
  const GridSpec& g = u.grid();
  std::vector<double> e(g.size(), 0.0);
  const double inv4e2 = 1.0 / (4.0 * u.epsilon() * u.epsilon());
  const std::size_t nt = nt_of(g);
  parallel_for(nt * g.ny, [&](std::size_t b, std::size_t en) {
    for (std::size_t row = b; row < en; ++row) {
      const std::size_t k = row / g.ny, j = row % g.ny;
      for (std::size_t i = 0; i < g.nx; ++i) {
        const std::size_t n = g.index(i, j, k);
        if (!u.active(n)) continue;
        const auto d = node_gradient(u, i, j, k);
        const double m = 1.0 - std::norm(u[n]);
        e[n] = 0.5 * (std::norm(d[0]) + std::norm(d[1]) + std::norm(d[2])) + m * m * inv4e2;
      }
    }
  });
  return ScalarField(g, std::move(e), u.mask());
}

EnergyBreakdown energy_breakdown(const ComplexField& u, const Region& region,
                                 const EnergyOptions& opt) {
  require_finite_input(u);
  const GridSpec& g = u.grid();
  if (!u.resolved() && !opt.allow_under_resolved)
    throw PreconditionError("field is under-resolved (epsilon < 2h); set allow_under_resolved");
  RegionWeights w(g, region, opt.supersample);
  w.check_inside();
  const std::size_t nt = nt_of(g);
  const double inv4e2 = 1.0 / (4.0 * u.epsilon() * u.epsilon());
  struct Acc {
    double d = 0.0, p = 0.0;
    Acc& operator+=(const Acc& o) {
      d += o.d;
      p += o.p;
      return *this;
    }
  };
  const std::size_t j0 = w.row_begin(), nj = w.row_end() - j0;
  Acc a = parallel_sum<Acc>(nj * nt, [&](std::size_t b, std::size_t en) {
    Acc acc;
    for (std::size_t row = b; row < en; ++row) {
      const std::size_t k = row / nj, j = j0 + row % nj;
      double rd = 0.0, rp = 0.0;
      for (std::size_t i = w.col_begin(); i < w.col_end(); ++i) {
        const std::size_t n = g.index(i, j, k);
        if (!u.active(n)) continue;
        const double wt = w(i, j);
        if (wt == 0.0) continue;
        const auto d = node_gradient(u, i, j, k);
        const double m = 1.0 - std::norm(u[n]);
        rd += wt * 0.5 * (std::norm(d[0]) + std::norm(d[1]) + std::norm(d[2]));
        rp += wt * m * m * inv4e2;
      }
      acc.d += rd;
      acc.p += rp;
    }
    return acc;
  });
  double cell = g.h * g.h;
  if (g.dim() == 3) cell *= g.ht();
  EnergyBreakdown out;
  out.dirichlet = a.d * cell;
  out.potential = a.p * cell;
  out.total = out.dirichlet + out.potential;
  const double r = region.kind == Region::Kind::whole ? 1.0 : region.r_outer;
  out.normalized_theta = out.total / theta_normalization(u.epsilon(), g.dim(), r);
  return out;
}

ScalarField gl_residual(const ComplexField& u) {
  require_finite_input(u);
  const GridSpec& g = u.grid();
  auto inner = interior_mask(g, u.mask());
  bool any = false;
  for (auto m : inner) any = any || m;
  if (!any) throw PreconditionError("grid too small for the Laplacian stencil");
  std::vector<double> r(g.size(), 0.0);
  const double e2 = u.epsilon() * u.epsilon();
  const double ih2 = 1.0 / (g.h * g.h);
  const double it2 = g.dim() == 3 ? 1.0 / (g.ht() * g.ht()) : 0.0;
  const std::size_t nt = nt_of(g);
  parallel_for(nt * g.ny, [&](std::size_t b, std::size_t en) {
    for (std::size_t row = b; row < en; ++row) {
      const std::size_t k = row / g.ny, j = row % g.ny;
      for (std::size_t i = 0; i < g.nx; ++i) {
        const std::size_t n = g.index(i, j, k);
        if (!inner[n]) continue;
        cplx lap = (u[n - 1] + u[n + 1] + u[n - g.nx] + u[n + g.nx] - 4.0 * u[n]) * ih2;
        if (g.dim() == 3) {
          const std::size_t km = wrap(std::ptrdiff_t(k) - 1, g.nt), kp = wrap(std::ptrdiff_t(k) + 1, g.nt);
          lap += (u[g.index(i, j, km)] + u[g.index(i, j, kp)] - 2.0 * u[n]) * it2;
        }
        r[n] = std::abs(e2 * lap + (1.0 - std::norm(u[n])) * u[n]);
      }
    }
  });
  return ScalarField(g, std::move(r), std::move(inner));
}

OneFormField current_one_form(const ComplexField& u) {
  require_finite_input(u);
  const GridSpec& g = u.grid();
  const int dim = g.dim();
  std::vector<std::vector<double>> c(std::size_t(dim), std::vector<double>(g.size(), 0.0));
  const std::size_t nt = nt_of(g);
  parallel_for(nt * g.ny, [&](std::size_t b, std::size_t en) {
    for (std::size_t row = b; row < en; ++row) {
      const std::size_t k = row / g.ny, j = row % g.ny;
      for (std::size_t i = 0; i < g.nx; ++i) {
        const std::size_t n = g.index(i, j, k);
        if (!u.active(n)) continue;
        const auto d = node_gradient(u, i, j, k);
        const cplx v = u[n];
        for (int a = 0; a < dim; ++a)
          c[std::size_t(a)][n] = v.real() * d[std::size_t(a)].imag() - v.imag() * d[std::size_t(a)].real();
      }
    }
  });
  return OneFormField(g, std::move(c), u.mask());
}

TwoFormField jacobian_two_form(const ComplexField& u) {
  const OneFormField ju = current_one_form(u);
  const GridSpec& g = u.grid();
  const int dim = g.dim();
  auto inner = interior_mask(g, u.mask());
  const std::size_t np = dim == 3 ? 3 : 1;
  std::vector<std::vector<double>> c(np, std::vector<double>(g.size(), 0.0));
  const double h = g.h;
  const double ht = g.ht();
  const std::size_t nt = nt_of(g);
  auto dx = [&](const std::vector<double>& f, std::size_t n) { return (f[n + 1] - f[n - 1]) / (2 * h); };
  auto dy = [&](const std::vector<double>& f, std::size_t n) {
    return (f[n + g.nx] - f[n - g.nx]) / (2 * h);
  };
  parallel_for(nt * g.ny, [&](std::size_t b, std::size_t en) {
    for (std::size_t row = b; row < en; ++row) {
      const std::size_t k = row / g.ny, j = row % g.ny;
      for (std::size_t i = 0; i < g.nx; ++i) {
        const std::size_t n = g.index(i, j, k);
        if (!inner[n]) continue;
        c[0][n] = 0.5 * (dx(ju.component(1), n) - dy(ju.component(0), n));
        if (dim == 3) {
          const std::size_t km = g.index(i, j, wrap(std::ptrdiff_t(k) - 1, g.nt));
          const std::size_t kp = g.index(i, j, wrap(std::ptrdiff_t(k) + 1, g.nt));
          auto dt = [&](const std::vector<double>& f) { return (f[kp] - f[km]) / (2 * ht); };
          c[1][n] = 0.5 * (dx(ju.component(2), n) - dt(ju.component(0)));
          c[2][n] = 0.5 * (dy(ju.component(2), n) - dt(ju.component(1)));
        }
      }
    }
  });
  return TwoFormField(g, std::move(c), std::move(inner));
}

StressField stress_energy(const ComplexField& u) {
  require_finite_input(u);
  const GridSpec& g = u.grid();
  const int dim = g.dim();
  const std::size_t ncomp = dim == 3 ? 6 : 3;
  std::vector<std::vector<double>> c(ncomp, std::vector<double>(g.size(), 0.0));
  const double inv4e2 = 1.0 / (4.0 * u.epsilon() * u.epsilon());
  const std::size_t nt = nt_of(g);
  parallel_for(nt * g.ny, [&](std::size_t b, std::size_t en) {
    for (std::size_t row = b; row < en; ++row) {
      const std::size_t k = row / g.ny, j = row % g.ny;
      for (std::size_t i = 0; i < g.nx; ++i) {
        const std::size_t n = g.index(i, j, k);
        if (!u.active(n)) continue;
        const auto d = node_gradient(u, i, j, k);
        const double m = 1.0 - std::norm(u[n]);
        const double e = 0.5 * (std::norm(d[0]) + std::norm(d[1]) + std::norm(d[2])) + m * m * inv4e2;
        std::size_t idx = 0;
        for (int a = 0; a < dim; ++a)
          for (int bb = a; bb < dim; ++bb) {
            const double dd = (std::conj(d[std::size_t(a)]) * d[std::size_t(bb)]).real();
            c[idx++][n] = (a == bb ? e : 0.0) - dd;
          }
      }
    }
  });
  return StressField(g, dim, std::move(c), u.mask());
}

OneFormField stress_divergence(const StressField& T) {
  const GridSpec& g = T.grid();
  const int dim = T.dim();
  auto inner = interior_mask(g, T.mask());
  // need T at the neighbours to be away from one-sided stencils as well
  auto inner2 = interior_mask(g, inner);
  std::vector<std::vector<double>> c(std::size_t(dim), std::vector<double>(g.size(), 0.0));
  const double h = g.h;
  const std::size_t nt = nt_of(g);
  for (std::size_t k = 0; k < nt; ++k)
    for (std::size_t j = 0; j < g.ny; ++j)
      for (std::size_t i = 0; i < g.nx; ++i) {
        const std::size_t n = g.index(i, j, k);
        if (!inner2[n]) continue;
        for (int b = 0; b < dim; ++b) {
          double s = (T.entry(n + 1, 0, b) - T.entry(n - 1, 0, b)) / (2 * h) +
                     (T.entry(n + g.nx, 1, b) - T.entry(n - g.nx, 1, b)) / (2 * h);
          if (dim == 3) {
            const std::size_t km = g.index(i, j, wrap(std::ptrdiff_t(k) - 1, g.nt));
            const std::size_t kp = g.index(i, j, wrap(std::ptrdiff_t(k) + 1, g.nt));
            s += (T.entry(kp, 2, b) - T.entry(km, 2, b)) / (2 * g.ht());
          }
          c[std::size_t(b)][n] = s;
        }
      }
  return OneFormField(g, std::move(c), std::move(inner2));
}

namespace {

// Fraction of the 3D cell around (x, y, t) inside the ball |(x,y,t)-c| <= r,
// with the periodic t distance.
double ball_cover3(double dx, double dy, double dt, double h, double ht, double r, int s) {
  const double hd = 0.5 * std::sqrt(2 * h * h + ht * ht);
  const double d = std::sqrt(dx * dx + dy * dy + dt * dt);
  if (d - hd >= r) return 0.0;
  if (d + hd <= r) return 1.0;
  int hits = 0;
  for (int c = 0; c < s; ++c) {
    const double st = dt + ((c + 0.5) / s - 0.5) * ht;
    for (int b = 0; b < s; ++b) {
      const double sy = dy + ((b + 0.5) / s - 0.5) * h;
      for (int a = 0; a < s; ++a) {
        const double sx = dx + ((a + 0.5) / s - 0.5) * h;
        if (sx * sx + sy * sy + st * st <= r * r) ++hits;
      }
    }
  }
  return double(hits) / double(s * s * s);
}

double periodic_dt(double t, double tc) {
  const double P = GridSpec::t_period;
  double d = std::fmod(t - tc, P);
  if (d > 0.5 * P) d -= P;
  if (d < -0.5 * P) d += P;
  return d;
}

}  // namespace

std::vector<BallEnergy> ball_energy_profile(const ComplexField& u, Point2 center,
                                            const std::vector<double>& radii, double t_center) {
  const GridSpec& g = u.grid();
  for (std::size_t q = 0; q < radii.size(); ++q) {
    if (!(radii[q] > 0.0)) throw PreconditionError("radii must be positive");
    if (q > 0 && !(radii[q] > radii[q - 1])) throw PreconditionError("radii must increase");
  }
  std::vector<BallEnergy> out;
  if (radii.empty()) return out;
  const double inv4e2 = 1.0 / (4.0 * u.epsilon() * u.epsilon());
  if (g.dim() == 2) {
    const ScalarField e = energy_density(u);
    for (double r : radii) {
      RegionWeights w(g, Region::ball(center, r));
      try {
        w.check_inside();
      } catch (const DomainError&) {
        throw DomainError("ball radius " + std::to_string(r) + " exceeds the domain");
      }
      double E = 0.0, P = 0.0;
      for (std::size_t j = w.row_begin(); j < w.row_end(); ++j) {
        double re = 0.0, rp = 0.0;
        for (std::size_t i = w.col_begin(); i < w.col_end(); ++i) {
          const std::size_t n = g.index(i, j);
          if (!u.active(n)) continue;
          const double wt = w(i, j);
          if (wt == 0.0) continue;
          const double m = 1.0 - std::norm(u[n]);
          re += wt * e[n];
          rp += wt * 2.0 * m * m * inv4e2;
        }
        E += re;
        P += rp;
      }
      out.push_back({r, E * g.h * g.h, P * g.h * g.h});
    }
    return out;
  }
  // cylinder: 3D balls
  const ScalarField e = energy_density(u);
  const double h = g.h, ht = g.ht();
  for (double r : radii) {
    if (center.x - r < g.origin_x || center.x + r > g.x_max() || center.y - r < g.origin_y ||
        center.y + r > g.y_max() || 2 * r > GridSpec::t_period)
      throw DomainError("ball radius " + std::to_string(r) + " exceeds the domain");
    double E = 0.0, P = 0.0;
    for (std::size_t k = 0; k < g.nt; ++k) {
      const double dt = periodic_dt(g.t(k), t_center);
      if (std::abs(dt) - ht > r) continue;
      for (std::size_t j = 0; j < g.ny; ++j) {
        const double dy = g.y(j) - center.y;
        if (std::abs(dy) - h > r) continue;
        for (std::size_t i = 0; i < g.nx; ++i) {
          const double dx = g.x(i) - center.x;
          if (std::abs(dx) - h > r) continue;
          const std::size_t n = g.index(i, j, k);
          if (!u.active(n)) continue;
          const double wt = ball_cover3(dx, dy, dt, h, ht, r, 4);
          if (wt == 0.0) continue;
          const double m = 1.0 - std::norm(u[n]);
          E += wt * e[n];
          P += wt * 2.0 * m * m * inv4e2;
        }
      }
    }
    out.push_back({r, E * h * h * ht, P * h * h * ht});
  }
  return out;
}

std::array<cplx, 3> gradient_at(const ComplexField& u, double x, double y, double t) {
  const GridSpec& g = u.grid();
  const double fx = (x - g.origin_x) / g.h, fy = (y - g.origin_y) / g.h;
  if (fx < 0 || fy < 0 || fx > double(g.nx - 1) || fy > double(g.ny - 1))
    throw DomainError("boundary sample outside the grid");
  const std::size_t i = std::min<std::size_t>(std::size_t(fx), g.nx - 2);
  const std::size_t j = std::min<std::size_t>(std::size_t(fy), g.ny - 2);
  const double a = fx - double(i), b = fy - double(j);
  std::array<cplx, 3> out{};
  auto add_plane = [&](std::size_t k, double wk) {
    const double w[4] = {(1 - a) * (1 - b), a * (1 - b), (1 - a) * b, a * b};
    const std::size_t ii[4] = {i, i + 1, i, i + 1}, jj[4] = {j, j, j + 1, j + 1};
    for (int c = 0; c < 4; ++c) {
      if (w[c] == 0.0) continue;
      if (!u.active(g.index(ii[c], jj[c], k))) throw DomainError("boundary sample touches inactive node");
      const auto d = node_gradient(u, ii[c], jj[c], k);
      for (int q = 0; q < 3; ++q) out[std::size_t(q)] += wk * w[c] * d[std::size_t(q)];
    }
  };
  if (g.dim() == 2) {
    add_plane(0, 1.0);
  } else {
    double ft = std::fmod(t / g.ht(), double(g.nt));
    if (ft < 0) ft += double(g.nt);
    const std::size_t k0 = std::size_t(ft) % g.nt, k1 = (k0 + 1) % g.nt;
    const double c = ft - std::floor(ft);
    add_plane(k0, 1 - c);
    add_plane(k1, c);
  }
  return out;
}


double boundary_normal_energy(const ComplexField& u, Point2 center, double r, double t_center,
                              int samples) {
  const GridSpec& g = u.grid();
  if (g.dim() == 2) {
    const int M = samples > 0 ? samples : std::max(256, int(std::ceil(4 * std::numbers::pi * r / g.h)));
    double s = 0.0;
    for (int q = 0; q < M; ++q) {
      const double ph = 2 * std::numbers::pi * (q + 0.5) / M;
      const double c = std::cos(ph), sn = std::sin(ph);
      const auto d = gradient_at(u, center.x + r * c, center.y + r * sn, 0.0);
      s += std::norm(c * d[0] + sn * d[1]);
    }
    return s / M * 2 * std::numbers::pi * r;
  }
  // Fibonacci points on the sphere
  const double area = 4 * std::numbers::pi * r * r;
  const int M = samples > 0 ? samples
                            : std::max(2048, int(std::ceil(4 * area / (g.h * std::min(g.h, g.ht())))));
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  double s = 0.0;
  for (int q = 0; q < M; ++q) {
    const double zt = 1.0 - 2.0 * (q + 0.5) / M;
    const double rad = std::sqrt(1 - zt * zt);
    const double ph = golden * q;
    const double nx = rad * std::cos(ph), ny = rad * std::sin(ph);
    const auto d = gradient_at(u, center.x + r * nx, center.y + r * ny, t_center + r * zt);
    s += std::norm(nx * d[0] + ny * d[1] + zt * d[2]);
  }
  return s / M * area;
}

double circle_integral(const GridSpec& g, const std::vector<double>& nodal, Point2 center,
                       double r, int samples) {
  double s = 0.0;
  for (int q = 0; q < samples; ++q) {
    const double ph = 2 * std::numbers::pi * (q + 0.5) / samples;
    const double x = center.x + r * std::cos(ph), y = center.y + r * std::sin(ph);
    const double fx = (x - g.origin_x) / g.h, fy = (y - g.origin_y) / g.h;
    if (fx < 0 || fy < 0 || fx > double(g.nx - 1) || fy > double(g.ny - 1))
      throw DomainError("circle leaves the grid");
    const std::size_t i = std::min<std::size_t>(std::size_t(fx), g.nx - 2);
    const std::size_t j = std::min<std::size_t>(std::size_t(fy), g.ny - 2);
    const double a = fx - double(i), b = fy - double(j);
    s += (1 - a) * (1 - b) * nodal[g.index(i, j)] + a * (1 - b) * nodal[g.index(i + 1, j)] +
         (1 - a) * b * nodal[g.index(i, j + 1)] + a * b * nodal[g.index(i + 1, j + 1)];
  }
  return s / samples * 2 * std::numbers::pi * r;
}

}  // namespace glv
