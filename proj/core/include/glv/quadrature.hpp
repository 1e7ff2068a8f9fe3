#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "glv/grid.hpp"
#include "glv/parallel.hpp"

namespace glv {

// Integration region in the plane. For cylinder grids the region is the
// cross-section times the full t period.
struct Region {
  enum class Kind { whole, disk, annulus };
  Kind kind = Kind::whole;
  Point2 center{};
  double r_inner = 0.0;
  double r_outer = 0.0;

  static Region whole_grid() { return {}; }
  static Region ball(Point2 c, double r) { return {Kind::disk, c, 0.0, r}; }
  static Region annulus(Point2 c, double r_in, double r_out) {
    return {Kind::annulus, c, r_in, r_out};
  }
};

// Node weights for quadrature over a region, in units of the cell area h^2.
// whole: trapezoid, half weight on mask-boundary nodes (quarter at rectangle
// corners). disk/annulus: fraction of the node's cell inside the region,
// supersampled s x s on cells straddling a circle.
class RegionWeights {
 public:
  RegionWeights(const GridSpec& plane, const Region& region, int supersample = 8);

  double operator()(std::size_t i, std::size_t j) const;
  // Throws DomainError if the region is empty or reaches outside the active set.
  void check_inside() const;
  // Row range [j_lo, j_hi) that can carry nonzero weight.
  std::size_t row_begin() const { return j_lo_; }
  std::size_t row_end() const { return j_hi_; }
  std::size_t col_begin() const { return i_lo_; }
  std::size_t col_end() const { return i_hi_; }

 private:
  double cover(double x, double y) const;

  GridSpec g_;
  Region r_;
  int s_;
  std::vector<std::uint8_t> boundary_;  // whole-grid mask boundary flags
  std::size_t i_lo_ = 0, i_hi_ = 0, j_lo_ = 0, j_hi_ = 0;
};

// Value and first derivatives of an analytically known field at a point.
struct FieldSample {
  std::complex<double> u;
  std::complex<double> ux;
  std::complex<double> uy;
};

struct EnergyBreakdown {
  double dirichlet = 0.0;
  double potential = 0.0;
  double total = 0.0;
  double normalized_theta = 0.0;
};

// pi |log eps| omega_{n-2} r^{n-2}: 2D uses factor 1, the cylinder the period.
double theta_normalization(double eps, int dim, double r = 1.0);

// Energy of an analytic field using the node weights of `plane` over `region`;
// no grid differentiation takes place. Sampler provides sample(x, y) ->
// FieldSample.
template <class Sampler>
EnergyBreakdown integrate_energy(const Sampler& s, const GridSpec& plane, const Region& region,
                                 double eps) {
  RegionWeights w(plane, region);
  w.check_inside();
  struct Acc {
    double d = 0.0, p = 0.0;
    Acc& operator+=(const Acc& o) {
      d += o.d;
      p += o.p;
      return *this;
    }
  };
  const std::size_t j0 = w.row_begin(), nj = w.row_end() - w.row_begin();
  const double inv4e2 = 1.0 / (4.0 * eps * eps);
  Acc a = parallel_sum<Acc>(nj, [&](std::size_t b, std::size_t e) {
    Acc acc;
    for (std::size_t jj = b; jj < e; ++jj) {
      const std::size_t j = j0 + jj;
      double rd = 0.0, rp = 0.0;
      for (std::size_t i = w.col_begin(); i < w.col_end(); ++i) {
        const double wt = w(i, j);
        if (wt == 0.0) continue;
        const FieldSample f = s.sample(plane.x(i), plane.y(j));
        const double m = 1.0 - std::norm(f.u);
        rd += wt * 0.5 * (std::norm(f.ux) + std::norm(f.uy));
        rp += wt * m * m * inv4e2;
      }
      acc.d += rd;
      acc.p += rp;
    }
    return acc;
  });
  EnergyBreakdown out;
  const double area = plane.h * plane.h;
  out.dirichlet = a.d * area;
  out.potential = a.p * area;
  out.total = out.dirichlet + out.potential;
  const double r = region.kind == Region::Kind::whole ? 1.0 : region.r_outer;
  out.normalized_theta = out.total / theta_normalization(eps, 2, r);
  return out;
}

}  // namespace glv
