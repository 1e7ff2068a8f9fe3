#include "glv/grid.hpp"

#include <cmath>
#include <string>

#include "glv/errors.hpp"

namespace glv {

double norm(Point2 a) { return std::hypot(a.x, a.y); }

GridSpec GridSpec::square(std::size_t n, double half_width) {
  GridSpec g;
  g.nx = g.ny = n;
  g.h = 2.0 * half_width / double(n - 1);
  g.origin_x = g.origin_y = -half_width;
  g.topology = Topology::rectangle;
  return g;
}

GridSpec GridSpec::disk(std::size_t n, double half_width, double radius, Point2 center) {
  GridSpec g = square(n, half_width);
  g.topology = Topology::disk;
  g.disk_center = center;
  g.disk_radius = radius;
  return g;
}

GridSpec GridSpec::cylinder(std::size_t n, std::size_t nt, double half_width,
                            double disk_radius) {
  GridSpec g = square(n, half_width);
  g.topology = Topology::cylinder;
  g.nt = nt;
  g.disk_radius = disk_radius;
  return g;
}

void GridSpec::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) throw PreconditionError("grid spacing must be positive");
  if (nx < 8 || ny < 8) throw PreconditionError("grid needs at least 8 nodes per axis");
  if (topology == Topology::cylinder) {
    if (nt < 8) throw PreconditionError("cylinder needs at least 8 nodes along t");
  } else if (nt != 1) {
    throw PreconditionError("planar grid must have nt = 1");
  }
  if (topology == Topology::disk && !(disk_radius > 0.0))
    throw PreconditionError("disk mask needs a positive radius");
  if (!std::isfinite(origin_x) || !std::isfinite(origin_y))
    throw PreconditionError("grid origin must be finite");
}

bool GridSpec::in_plane_active(std::size_t i, std::size_t j) const {
  if (!has_disk_mask()) return true;
  const double dx = x(i) - disk_center.x, dy = y(j) - disk_center.y;
  return dx * dx + dy * dy <= disk_radius * disk_radius;
}

std::vector<std::uint8_t> GridSpec::active_mask() const {
  std::vector<std::uint8_t> m(size(), 1);
  if (!has_disk_mask()) return m;
  const std::size_t np = plane_size();
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      const std::uint8_t a = in_plane_active(i, j) ? 1 : 0;
      for (std::size_t k = 0; k * np < m.size(); ++k) m[index(i, j, k)] = a;
    }
  return m;
}

GridSpec GridSpec::plane() const {
  GridSpec g = *this;
  g.nt = 1;
  if (topology == Topology::cylinder)
    g.topology = disk_radius > 0.0 ? Topology::disk : Topology::rectangle;
  return g;
}

}  // namespace glv
