#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "glv/grid.hpp"

namespace glv {

using cplx = std::complex<double>;

// Sampled complex map on a grid. Values at inactive nodes are stored as 0 and
// never read. Once constructed the field is not modified.
class ComplexField {
 public:
  ComplexField() = default;
  ComplexField(GridSpec grid, double epsilon, std::vector<cplx> values);
  // Explicit mask, used when the mask is not derivable from the grid (loads).
  ComplexField(GridSpec grid, double epsilon, std::vector<cplx> values,
               std::vector<std::uint8_t> mask);

  // Fills active nodes from f(x, y[, t]).
  template <class F>
  static ComplexField sample(const GridSpec& g, double epsilon, F&& f);

  const GridSpec& grid() const { return grid_; }
  double epsilon() const { return epsilon_; }
  const std::vector<cplx>& values() const { return values_; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }
  bool active(std::size_t n) const { return mask_[n] != 0; }
  cplx operator[](std::size_t n) const { return values_[n]; }
  cplx at(std::size_t i, std::size_t j, std::size_t k = 0) const {
    return values_[grid_.index(i, j, k)];
  }
  // epsilon >= 2h
  bool resolved() const { return epsilon_ >= 2.0 * grid_.h; }

  ComplexField conj() const;
  ComplexField with_values(std::vector<cplx> v) const;
  ComplexField with_epsilon(double eps) const;
  // 2D slice k of a cylinder field.
  ComplexField slice(std::size_t k) const;

  // Bilinear interpolation in the plane (slice k for cylinders). Throws
  // DomainError outside the grid or if a corner node is inactive.
  cplx interpolate(double x, double y, std::size_t k = 0) const;
  // Catmull-Rom bicubic interpolation; needs the 4 x 4 stencil active.
  cplx interpolate_cubic(double x, double y, std::size_t k = 0) const;

 private:
  void check() const;

  GridSpec grid_;
  double epsilon_ = 0.0;
  std::vector<cplx> values_;
  std::vector<std::uint8_t> mask_;
};

class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(GridSpec grid, std::vector<double> v, std::vector<std::uint8_t> mask);
  const GridSpec& grid() const { return grid_; }
  const std::vector<double>& values() const { return v_; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }
  double operator[](std::size_t n) const { return v_[n]; }
  double sup() const;  // max |v| over masked nodes

 private:
  GridSpec grid_;
  std::vector<double> v_;
  std::vector<std::uint8_t> mask_;
};

// Components in axis order (x, y[, t]).
class OneFormField {
 public:
  OneFormField() = default;
  OneFormField(GridSpec grid, std::vector<std::vector<double>> comps,
               std::vector<std::uint8_t> mask);
  const GridSpec& grid() const { return grid_; }
  std::size_t components() const { return c_.size(); }
  const std::vector<double>& component(std::size_t a) const { return c_[a]; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }

 private:
  GridSpec grid_;
  std::vector<std::vector<double>> c_;
  std::vector<std::uint8_t> mask_;
};

// 2D: the single dx^dy density. 3D: pairs (x,y), (x,t), (y,t).
class TwoFormField {
 public:
  TwoFormField() = default;
  TwoFormField(GridSpec grid, std::vector<std::vector<double>> comps,
               std::vector<std::uint8_t> mask);
  const GridSpec& grid() const { return grid_; }
  std::size_t components() const { return c_.size(); }
  const std::vector<double>& component(std::size_t p) const { return c_[p]; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }

 private:
  GridSpec grid_;
  std::vector<std::vector<double>> c_;
  std::vector<std::uint8_t> mask_;
};

// Symmetric tensor per node; 2D stores (xx, xy, yy), 3D stores
// (xx, xy, xt, yy, yt, tt).
class StressField {
 public:
  StressField() = default;
  StressField(GridSpec grid, int dim, std::vector<std::vector<double>> comps,
              std::vector<std::uint8_t> mask);
  const GridSpec& grid() const { return grid_; }
  int dim() const { return dim_; }
  double entry(std::size_t node, int a, int b) const;
  const std::vector<std::uint8_t>& mask() const { return mask_; }

 private:
  GridSpec grid_;
  int dim_ = 2;
  std::vector<std::vector<double>> c_;
  std::vector<std::uint8_t> mask_;
};

template <class F>
ComplexField ComplexField::sample(const GridSpec& g, double epsilon, F&& f) {
  g.validate();
  auto mask = g.active_mask();
  std::vector<cplx> v(g.size(), cplx{});
  const std::size_t nt = g.dim() == 3 ? g.nt : 1;
  for (std::size_t k = 0; k < nt; ++k)
    for (std::size_t j = 0; j < g.ny; ++j)
      for (std::size_t i = 0; i < g.nx; ++i) {
        const std::size_t n = g.index(i, j, k);
        if (!mask[n]) continue;
        if constexpr (std::is_invocable_v<F, double, double, double>)
          v[n] = f(g.x(i), g.y(j), g.t(k));
        else
          v[n] = f(g.x(i), g.y(j));
      }
  return ComplexField(g, epsilon, std::move(v), std::move(mask));
}

}  // namespace glv
