#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

namespace glv {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point2&) const = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
double norm(Point2 a);

// Topology codes double as the on-disk byte of the field dump format.
enum class Topology : std::uint8_t { rectangle = 0, disk = 1, cylinder = 2 };

enum class BoundaryKind : std::uint8_t { dirichlet = 0, periodic_t = 1 };

// Uniform node grid. Node (i, j[, k]) sits at origin + (i h, j h[, k ht]).
// The t axis of a cylinder always has period 2 pi, so ht = 2 pi / nt and is
// independent of the in-plane spacing h. A disk mask keeps nodes with
// |x - c| <= R; the cylinder may carry the same cross-section mask.
struct GridSpec {
  std::size_t nx = 0, ny = 0, nt = 1;
  double h = 0.0;
  double origin_x = 0.0, origin_y = 0.0;
  Topology topology = Topology::rectangle;
  Point2 disk_center{};
  double disk_radius = 0.0;

  static constexpr double t_period = 2.0 * std::numbers::pi;

  // n x n square [-a, a]^2, h = 2a/(n-1).
  static GridSpec square(std::size_t n, double half_width);
  // Square as above with the disk mask |x - c| <= radius.
  static GridSpec disk(std::size_t n, double half_width, double radius, Point2 center = {});
  // Square cross-section times the periodic t axis.
  static GridSpec cylinder(std::size_t n, std::size_t nt, double half_width,
                           double disk_radius = 0.0);

  void validate() const;  // throws PreconditionError

  int dim() const { return topology == Topology::cylinder ? 3 : 2; }
  BoundaryKind boundary() const {
    return topology == Topology::cylinder ? BoundaryKind::periodic_t : BoundaryKind::dirichlet;
  }
  bool has_disk_mask() const {
    return topology == Topology::disk || (topology == Topology::cylinder && disk_radius > 0.0);
  }
  double ht() const { return topology == Topology::cylinder ? t_period / double(nt) : 0.0; }
  std::size_t plane_size() const { return nx * ny; }
  std::size_t size() const { return nx * ny * (topology == Topology::cylinder ? nt : 1); }

  double x(std::size_t i) const { return origin_x + double(i) * h; }
  double y(std::size_t j) const { return origin_y + double(j) * h; }
  double t(std::size_t k) const { return double(k) * ht(); }
  double x_max() const { return x(nx - 1); }
  double y_max() const { return y(ny - 1); }

  std::size_t index(std::size_t i, std::size_t j, std::size_t k = 0) const {
    return (k * ny + j) * nx + i;
  }

  // Active-node mask (1 = active) of length size().
  std::vector<std::uint8_t> active_mask() const;
  bool in_plane_active(std::size_t i, std::size_t j) const;

  // The 2D cross-section grid of a cylinder.
  GridSpec plane() const;

  bool operator==(const GridSpec&) const = default;
};

}  // namespace glv
