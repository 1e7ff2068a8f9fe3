#include "glv/helical.hpp"

#include <algorithm>
#include <cmath>

#include "glv/errors.hpp"
#include "glv/operators.hpp"

namespace glv {

ComplexField build_helical_field(const ComplexField& vt, int kappa, const GridSpec& grid3,
                                 Interp interp) {
  grid3.validate();
  if (grid3.topology != Topology::cylinder)
    throw PreconditionError("helical field needs a periodic cylinder grid");
  if (vt.grid().dim() != 2) throw PreconditionError("reduced field must be planar");
  auto mask = grid3.active_mask();
  std::vector<cplx> v(grid3.size(), cplx{});
  parallel_for(grid3.nt, [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      const double t = grid3.t(k);
      const double c = std::cos(t), s = std::sin(t);
      const cplx phase = std::polar(1.0, kappa * t);
      for (std::size_t j = 0; j < grid3.ny; ++j)
        for (std::size_t i = 0; i < grid3.nx; ++i) {
          const std::size_t n = grid3.index(i, j, k);
          if (!mask[n]) continue;
          const double x = grid3.x(i), y = grid3.y(j);
          // e^{-it} z
          const double xr = c * x + s * y, yr = -s * x + c * y;
          cplx val;
          try {
            val = interp == Interp::bicubic ? vt.interpolate_cubic(xr, yr) : vt.interpolate(xr, yr);
          } catch (const DomainError&) {
            throw DomainError("reduced field domain too small for the rotated cylinder");
          }
          v[n] = phase * val;
        }
    }
  });
  return ComplexField(grid3, vt.epsilon(), std::move(v), std::move(mask));
}

namespace {

// 3D residual with the Laplacian stencil at spacing (m h, m ht).
std::vector<double> residual_spaced(const ComplexField& u, int m) {
  const GridSpec& g = u.grid();
  std::vector<double> r(g.size(), -1.0);
  const double e2 = u.epsilon() * u.epsilon();
  const double H = m * g.h, T = m * g.ht();
  const auto M = std::size_t(m);
  for (std::size_t k = 0; k < g.nt; ++k) {
    const std::size_t km = (k + g.nt - M % g.nt) % g.nt, kp = (k + M) % g.nt;
    for (std::size_t j = M; j + M < g.ny; ++j)
      for (std::size_t i = M; i + M < g.nx; ++i) {
        const std::size_t n = g.index(i, j, k);
        if (!u.active(n) || !u.active(n - M) || !u.active(n + M) || !u.active(n - M * g.nx) ||
            !u.active(n + M * g.nx))
          continue;
        const cplx lap = (u[n - M] + u[n + M] + u[n - M * g.nx] + u[n + M * g.nx] - 4.0 * u[n]) /
                             (H * H) +
                         (u[g.index(i, j, km)] + u[g.index(i, j, kp)] - 2.0 * u[n]) / (T * T);
        r[n] = std::abs(e2 * lap + (1.0 - std::norm(u[n])) * u[n]);
      }
  }
  return r;
}

}  // namespace

HelicalReconstruction helical_reconstruction_check(const ComplexField& vt, int kappa,
                                                   const GridSpec& grid3,
                                                   double reduced_residual) {
  HelicalReconstruction out;
  out.reduced_residual = reduced_residual;
  const ComplexField v3 = build_helical_field(vt, kappa, grid3, Interp::bicubic);
  const auto r1 = residual_spaced(v3, 1);
  const auto r2 = residual_spaced(v3, 2);
  double sup1 = 0.0, cons = 0.0;
  for (std::size_t n = 0; n < r1.size(); ++n) {
    if (r1[n] < 0) continue;
    sup1 = std::max(sup1, r1[n]);
    if (r2[n] >= 0) cons = std::max(cons, 2.0 * std::abs(r2[n] - r1[n]) / 3.0);
  }
  out.residual_3d = sup1;
  out.consistency_bound = cons;

  // interpolation error of v~ from its 2h subgrid at the odd nodes
  const GridSpec& g = vt.grid();
  const double x0 = g.origin_x, y0 = g.origin_y;
  double e2h = 0.0;
  for (std::size_t j = 3; j + 3 < g.ny; ++j)
    for (std::size_t i = 3; i + 3 < g.nx; ++i) {
      if (i % 2 == 0 && j % 2 == 0) continue;
      const std::size_t n = g.index(i, j);
      // the 2h-stencil must be active
      bool ok = true;
      const std::size_t ib = (i - 3) & ~std::size_t(1), jb = (j - 3) & ~std::size_t(1);
      for (std::size_t q = jb; q <= jb + 6 && ok; q += 2)
        for (std::size_t p = ib; p <= ib + 6 && ok; p += 2)
          ok = q < g.ny && p < g.nx && vt.active(g.index(p, q));
      if (!ok || !vt.active(n)) continue;
      // Catmull-Rom on the even sublattice
      const double fx = (g.x(i) - x0) / (2 * g.h), fy = (g.y(j) - y0) / (2 * g.h);
      const double fi = std::floor(fx), fj = std::floor(fy);
      const double a = fx - fi, b = fy - fj;
      auto w = [](double t, double* c) {
        const double t2 = t * t, t3 = t2 * t;
        c[0] = 0.5 * (-t3 + 2 * t2 - t);
        c[1] = 0.5 * (3 * t3 - 5 * t2 + 2);
        c[2] = 0.5 * (-3 * t3 + 4 * t2 + t);
        c[3] = 0.5 * (t3 - t2);
      };
      double wx[4], wy[4];
      w(a, wx);
      w(b, wy);
      cplx s{};
      bool inside = true;
      for (int q = 0; q < 4 && inside; ++q)
        for (int p = 0; p < 4 && inside; ++p) {
          const auto ii = std::ptrdiff_t(fi) - 1 + p, jj = std::ptrdiff_t(fj) - 1 + q;
          const auto I = std::size_t(2 * ii), J = std::size_t(2 * jj);
          if (ii < 0 || jj < 0 || I >= g.nx || J >= g.ny || !vt.active(g.index(I, J))) {
            inside = false;
            break;
          }
          s += wx[p] * wy[q] * vt[g.index(I, J)];
        }
      if (!inside) continue;
      e2h = std::max(e2h, std::abs(s - vt[n]));
    }
  const double eps = vt.epsilon();
  const double op = eps * eps * (8.0 / (grid3.h * grid3.h) + 4.0 / (grid3.ht() * grid3.ht())) + 3.0;
  out.interpolation_bound = e2h / 16.0 * op;
  out.bound = 5.0 * reduced_residual + out.interpolation_bound + out.consistency_bound;
  out.pass = out.residual_3d <= out.bound;
  return out;
}

std::vector<double> helical_panels(double r_in, double r_out, double eps,
                                   const std::vector<double>& core_radii) {
  if (!(r_out > r_in) || r_in < 0) throw PreconditionError("empty radial range");
  // desired local panel width as a function of r
  auto width = [&](double r) {
    double w = std::max(0.5 * eps, 0.05 * std::max(r, eps));
    for (double c : core_radii) {
      const double d = std::abs(r - c);
      w = std::min(w, std::max(0.5 * eps, 0.25 * d));
    }
    if (r < 12 * eps) w = std::min(w, 0.5 * eps);
    return w;
  };
  std::vector<double> p{r_in};
  while (p.back() < r_out) {
    const double next = p.back() + width(p.back());
    p.push_back(std::min(next, r_out));
    if (r_out - p.back() < 1e-12 * r_out) p.back() = r_out;
  }
  return p;
}

}  // namespace glv
