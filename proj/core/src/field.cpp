#include "glv/field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "glv/errors.hpp"

namespace glv {

ComplexField::ComplexField(GridSpec grid, double epsilon, std::vector<cplx> values)
    : grid_(grid), epsilon_(epsilon), values_(std::move(values)) {
  grid_.validate();
  mask_ = grid_.active_mask();
  check();
}

ComplexField::ComplexField(GridSpec grid, double epsilon, std::vector<cplx> values,
                           std::vector<std::uint8_t> mask)
    : grid_(grid), epsilon_(epsilon), values_(std::move(values)), mask_(std::move(mask)) {
  grid_.validate();
  check();
}

void ComplexField::check() const {
  if (!(epsilon_ > 0.0) || !std::isfinite(epsilon_))
    throw PreconditionError("epsilon must be positive");
  if (values_.size() != grid_.size() || mask_.size() != grid_.size())
    throw PreconditionError("field size does not match grid");
  for (std::size_t n = 0; n < values_.size(); ++n) {
    if (!mask_[n]) continue;
    if (!std::isfinite(values_[n].real()) || !std::isfinite(values_[n].imag())) {
      std::ostringstream os;
      os << "non-finite field value at node " << n;
      throw NonFiniteError(os.str());
    }
  }
}

ComplexField ComplexField::conj() const {
  std::vector<cplx> v(values_.size());
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = std::conj(values_[n]);
  return ComplexField(grid_, epsilon_, std::move(v), mask_);
}

ComplexField ComplexField::with_values(std::vector<cplx> v) const {
  return ComplexField(grid_, epsilon_, std::move(v), mask_);
}

ComplexField ComplexField::with_epsilon(double eps) const {
  return ComplexField(grid_, eps, values_, mask_);
}

ComplexField ComplexField::slice(std::size_t k) const {
  if (grid_.dim() != 3) {
    if (k != 0) throw PreconditionError("planar field has a single slice");
    return *this;
  }
  if (k >= grid_.nt) throw PreconditionError("slice index out of range");
  GridSpec g = grid_.plane();
  const std::size_t np = grid_.plane_size();
  std::vector<cplx> v(values_.begin() + k * np, values_.begin() + (k + 1) * np);
  std::vector<std::uint8_t> m(mask_.begin() + k * np, mask_.begin() + (k + 1) * np);
  return ComplexField(g, epsilon_, std::move(v), std::move(m));
}

cplx ComplexField::interpolate(double x, double y, std::size_t k) const {
  const GridSpec& g = grid_;
  const double fx = (x - g.origin_x) / g.h, fy = (y - g.origin_y) / g.h;
  const double tol = 1e-9;
  if (!(fx >= -tol && fy >= -tol && fx <= double(g.nx - 1) + tol &&
        fy <= double(g.ny - 1) + tol)) {
    std::ostringstream os;
    os << "interpolation point (" << x << ", " << y << ") outside the grid";
    throw DomainError(os.str());
  }
  std::size_t i = std::size_t(std::clamp(std::floor(fx), 0.0, double(g.nx - 2)));
  std::size_t j = std::size_t(std::clamp(std::floor(fy), 0.0, double(g.ny - 2)));
  const double a = std::clamp(fx - double(i), 0.0, 1.0), b = std::clamp(fy - double(j), 0.0, 1.0);
  const std::size_t n00 = g.index(i, j, k), n10 = n00 + 1, n01 = n00 + g.nx, n11 = n01 + 1;
  // Corners carrying zero weight may be inactive.
  auto take = [&](std::size_t n, double w) -> cplx {
    if (w == 0.0) return {};
    if (!mask_[n]) {
      std::ostringstream os;
      os << "interpolation point (" << x << ", " << y << ") touches an inactive node";
      throw DomainError(os.str());
    }
    return w * values_[n];
  };
  return take(n00, (1 - a) * (1 - b)) + take(n10, a * (1 - b)) + take(n01, (1 - a) * b) +
         take(n11, a * b);
}

cplx ComplexField::interpolate_cubic(double x, double y, std::size_t k) const {
  const GridSpec& g = grid_;
  const double fx = (x - g.origin_x) / g.h, fy = (y - g.origin_y) / g.h;
  const double fi = std::floor(fx), fj = std::floor(fy);
  const double a = fx - fi, b = fy - fj;
  const auto i0 = std::ptrdiff_t(fi) - 1, j0 = std::ptrdiff_t(fj) - 1;
  if (i0 < 0 || j0 < 0 || i0 + 3 >= std::ptrdiff_t(g.nx) || j0 + 3 >= std::ptrdiff_t(g.ny)) {
    std::ostringstream os;
    os << "cubic interpolation point (" << x << ", " << y << ") too close to the grid edge";
    throw DomainError(os.str());
  }
  auto weights = [](double t, double w[4]) {
    const double t2 = t * t, t3 = t2 * t;
    w[0] = 0.5 * (-t3 + 2 * t2 - t);
    w[1] = 0.5 * (3 * t3 - 5 * t2 + 2);
    w[2] = 0.5 * (-3 * t3 + 4 * t2 + t);
    w[3] = 0.5 * (t3 - t2);
  };
  double wx[4], wy[4];
  weights(a, wx);
  weights(b, wy);
  cplx out{};
  for (int q = 0; q < 4; ++q) {
    if (wy[q] == 0.0) continue;
    cplx row{};
    for (int p = 0; p < 4; ++p) {
      if (wx[p] == 0.0) continue;
      const std::size_t n = g.index(std::size_t(i0 + p), std::size_t(j0 + q), k);
      if (!mask_[n]) {
        std::ostringstream os;
        os << "cubic interpolation point (" << x << ", " << y << ") touches an inactive node";
        throw DomainError(os.str());
      }
      row += wx[p] * values_[n];
    }
    out += wy[q] * row;
  }
  return out;
}

ScalarField::ScalarField(GridSpec grid, std::vector<double> v, std::vector<std::uint8_t> mask)
    : grid_(grid), v_(std::move(v)), mask_(std::move(mask)) {
  if (v_.size() != grid_.size() || mask_.size() != grid_.size())
    throw PreconditionError("scalar field size does not match grid");
}

double ScalarField::sup() const {
  double s = 0.0;
  for (std::size_t n = 0; n < v_.size(); ++n)
    if (mask_[n]) s = std::max(s, std::abs(v_[n]));
  return s;
}

OneFormField::OneFormField(GridSpec grid, std::vector<std::vector<double>> comps,
                           std::vector<std::uint8_t> mask)
    : grid_(grid), c_(std::move(comps)), mask_(std::move(mask)) {
  if (c_.size() != std::size_t(grid_.dim()))
    throw PreconditionError("one-form component count must equal the grid dimension");
}

TwoFormField::TwoFormField(GridSpec grid, std::vector<std::vector<double>> comps,
                           std::vector<std::uint8_t> mask)
    : grid_(grid), c_(std::move(comps)), mask_(std::move(mask)) {
  const std::size_t want = grid_.dim() == 3 ? 3 : 1;
  if (c_.size() != want) throw PreconditionError("two-form component count mismatch");
}

StressField::StressField(GridSpec grid, int dim, std::vector<std::vector<double>> comps,
                         std::vector<std::uint8_t> mask)
    : grid_(grid), dim_(dim), c_(std::move(comps)), mask_(std::move(mask)) {}

double StressField::entry(std::size_t node, int a, int b) const {
  if (a > b) std::swap(a, b);
  // packed upper triangle, row-major
  int idx = 0;
  for (int r = 0; r < a; ++r) idx += dim_ - r;
  idx += b - a;
  return c_[std::size_t(idx)][node];
}

}  // namespace glv
