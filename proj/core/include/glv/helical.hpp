#pragma once

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "glv/field.hpp"
#include "glv/parallel.hpp"
#include "glv/quadrature.hpp"

namespace glv {

enum class Interp { bilinear, bicubic };

// v(z, t) = e^{i kappa t} v~(e^{-it} z) on a periodic cylinder grid.
ComplexField build_helical_field(const ComplexField& vt, int kappa, const GridSpec& grid3,
                                 Interp interp = Interp::bicubic);

// Checks the 3D residual of the reconstructed field against
//   5 * reduced + interpolation bound + stencil consistency bound.
// The interpolation bound scales the error of interpolating v~ from its
// 2h subgrid (cubic: divided by 16) by the residual operator norm
// eps^2 (8/h^2 + 4/ht^2) + 3. The consistency bound is 2/3 of the nodewise
// change of the 3D residual between stencil spacings 2h and h.
struct HelicalReconstruction {
  double residual_3d = 0.0;
  double reduced_residual = 0.0;
  double interpolation_bound = 0.0;
  double consistency_bound = 0.0;
  double bound = 0.0;
  bool pass = false;
};
HelicalReconstruction helical_reconstruction_check(const ComplexField& vt, int kappa,
                                                   const GridSpec& grid3,
                                                   double reduced_residual);

struct HelicalEnergy {
  double plane = 0.0;      // integral of |grad v~|^2 / 2
  double twist = 0.0;      // integral of |(i kappa - d_theta) v~|^2 / 2
  double potential = 0.0;  // integral of W / eps^2
  double total = 0.0;      // 2 pi times the sum: energy per period of the 3D field
};

// Radial panel breakpoints on [r_in, r_out]: panels of width eps/2 within
// 12 eps of each listed core radius, geometrically coarser elsewhere.
std::vector<double> helical_panels(double r_in, double r_out, double eps,
                                   const std::vector<double>& core_radii);

// Energy over (D_{r_out} \ D_{r_in}) x S^1 of the helical field built from
// an analytic v~, by polar quadrature: 8-point Gauss-Legendre per radial
// panel and the periodic trapezoid rule with n_phi points in angle.
template <class Sampler>
HelicalEnergy helical_energy_polar(const Sampler& vt, int kappa, double eps, double r_in,
                                   double r_out, const std::vector<double>& core_radii,
                                   int n_phi) {
  using GL = boost::math::quadrature::gauss<double, 8>;
  const auto panels = helical_panels(r_in, r_out, eps, core_radii);
  // expand the 4 stored abscissae of the symmetric rule
  std::vector<double> xs, ws;
  for (std::size_t q = 0; q < GL::abscissa().size(); ++q) {
    xs.push_back(GL::abscissa()[q]);
    ws.push_back(GL::weights()[q]);
    if (GL::abscissa()[q] != 0.0) {
      xs.push_back(-GL::abscissa()[q]);
      ws.push_back(GL::weights()[q]);
    }
  }
  struct Acc {
    double a = 0, b = 0, c = 0;
    Acc& operator+=(const Acc& o) {
      a += o.a;
      b += o.b;
      c += o.c;
      return *this;
    }
  };
  const double inv4e2 = 1.0 / (4.0 * eps * eps);
  const double dphi = 2.0 * std::numbers::pi / n_phi;
  const std::size_t np = panels.size() - 1;
  Acc acc = parallel_sum<Acc>(np, [&](std::size_t b, std::size_t e) {
    Acc s;
    for (std::size_t p = b; p < e; ++p) {
      const double lo = panels[p], hi = panels[p + 1];
      const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      for (std::size_t q = 0; q < xs.size(); ++q) {
        const double r = mid + half * xs[q];
        const double wr = half * ws[q] * r * dphi;
        Acc ring;
        for (int k = 0; k < n_phi; ++k) {
          const double ph = k * dphi;
          const double x = r * std::cos(ph), y = r * std::sin(ph);
          const FieldSample f = vt.sample(x, y);
          const cplx dth = x * f.uy - y * f.ux;
          const cplx tw = cplx(0.0, double(kappa)) * f.u - dth;
          const double m = 1.0 - std::norm(f.u);
          ring.a += 0.5 * (std::norm(f.ux) + std::norm(f.uy));
          ring.b += 0.5 * std::norm(tw);
          ring.c += m * m * inv4e2;
        }
        s.a += wr * ring.a;
        s.b += wr * ring.b;
        s.c += wr * ring.c;
      }
    }
    return s;
  });
  HelicalEnergy out;
  out.plane = acc.a;
  out.twist = acc.b;
  out.potential = acc.c;
  out.total = 2.0 * std::numbers::pi * (acc.a + acc.b + acc.c);
  return out;
}

}  // namespace glv
