#include "glv/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "glv/errors.hpp"

namespace glv {

double theta_normalization(double eps, int dim, double r) {
  const double base = std::numbers::pi * std::abs(std::log(eps));
  if (dim == 3) return base * GridSpec::t_period;
  (void)r;
  return base;
}

RegionWeights::RegionWeights(const GridSpec& plane, const Region& region, int supersample)
    : g_(plane.plane()), r_(region), s_(supersample) {
  if (r_.kind == Region::Kind::whole) {
    i_lo_ = j_lo_ = 0;
    i_hi_ = g_.nx;
    j_hi_ = g_.ny;
    if (g_.has_disk_mask()) {
      boundary_.assign(g_.plane_size(), 0);
      for (std::size_t j = 0; j < g_.ny; ++j)
        for (std::size_t i = 0; i < g_.nx; ++i) {
          if (!g_.in_plane_active(i, j)) continue;
          const bool interior = i > 0 && j > 0 && i + 1 < g_.nx && j + 1 < g_.ny &&
                                g_.in_plane_active(i - 1, j) && g_.in_plane_active(i + 1, j) &&
                                g_.in_plane_active(i, j - 1) && g_.in_plane_active(i, j + 1);
          boundary_[g_.index(i, j)] = interior ? 1 : 2;
        }
    }
    return;
  }
  if (!(r_.r_outer > 0.0) || r_.r_inner < 0.0 || r_.r_inner >= r_.r_outer)
    throw DomainError("empty integration region");
  const double pad = r_.r_outer + g_.h;
  auto lo = [&](double c, double o) {
    return std::size_t(std::clamp(std::floor((c - pad - o) / g_.h), 0.0, 1e18));
  };
  auto hi = [&](double c, double o, std::size_t n) {
    return std::min(n, std::size_t(std::max(0.0, std::ceil((c + pad - o) / g_.h) + 1)));
  };
  i_lo_ = lo(r_.center.x, g_.origin_x);
  j_lo_ = lo(r_.center.y, g_.origin_y);
  i_hi_ = hi(r_.center.x, g_.origin_x, g_.nx);
  j_hi_ = hi(r_.center.y, g_.origin_y, g_.ny);
  if (i_lo_ >= i_hi_ || j_lo_ >= j_hi_) throw DomainError("integration region misses the grid");
}

double RegionWeights::cover(double x, double y) const {
  const double h = g_.h;
  const double dx = x - r_.center.x, dy = y - r_.center.y;
  const double d = std::hypot(dx, dy);
  const double half_diag = 0.5 * std::numbers::sqrt2 * h;
  const double ri2 = r_.r_inner * r_.r_inner, ro2 = r_.r_outer * r_.r_outer;
  const bool inner_cut = r_.kind == Region::Kind::annulus;
  if (d - half_diag >= r_.r_outer) return 0.0;
  if (inner_cut && d + half_diag <= r_.r_inner) return 0.0;
  const bool out_ok = d + half_diag <= r_.r_outer;
  const bool in_ok = !inner_cut || d - half_diag >= r_.r_inner;
  if (out_ok && in_ok) return 1.0;
  int hits = 0;
  for (int b = 0; b < s_; ++b) {
    const double sy = dy + ((b + 0.5) / s_ - 0.5) * h;
    for (int a = 0; a < s_; ++a) {
      const double sx = dx + ((a + 0.5) / s_ - 0.5) * h;
      const double q = sx * sx + sy * sy;
      if (q <= ro2 && (!inner_cut || q >= ri2)) ++hits;
    }
  }
  return double(hits) / double(s_ * s_);
}

double RegionWeights::operator()(std::size_t i, std::size_t j) const {
  if (r_.kind == Region::Kind::whole) {
    if (!boundary_.empty()) {
      const auto b = boundary_[g_.index(i, j)];
      return b == 0 ? 0.0 : (b == 1 ? 1.0 : 0.5);
    }
    double w = 1.0;
    if (i == 0 || i + 1 == g_.nx) w *= 0.5;
    if (j == 0 || j + 1 == g_.ny) w *= 0.5;
    return w;
  }
  return cover(g_.x(i), g_.y(j));
}

void RegionWeights::check_inside() const {
  if (r_.kind == Region::Kind::whole) return;
  // The supersampled cell of an edge node reaches h/2 past the grid.
  const double h = g_.h;
  const Point2 c = r_.center;
  const double R = r_.r_outer;
  if (c.x - R < g_.origin_x - 1e-12 * h || c.x + R > g_.x_max() + 1e-12 * h ||
      c.y - R < g_.origin_y - 1e-12 * h || c.y + R > g_.y_max() + 1e-12 * h)
    throw DomainError("integration region reaches outside the grid");
  if (g_.has_disk_mask()) {
    const double dc = norm(c - g_.disk_center);
    if (dc + R > g_.disk_radius + 1e-12 * h)
      throw DomainError("integration region reaches outside the active disk");
  }
}

}  // namespace glv
