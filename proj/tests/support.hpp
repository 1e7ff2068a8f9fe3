#pragma once

#include <cmath>
#include <complex>

#include "glv/field.hpp"
#include "glv/quadrature.hpp"

namespace glv::test {

// e^{i k theta}, set to 1 at the origin
inline cplx phase(double x, double y, int k = 1) {
  const double r = std::hypot(x, y);
  if (r == 0.0) return {1.0, 0.0};
  return std::pow(cplx(x, y) / r, k);
}

inline ComplexField phase_field(const GridSpec& g, double eps, int k = 1) {
  return ComplexField::sample(g, eps, [k](double x, double y) { return phase(x, y, k); });
}

// Sum of nodal density times the region weights and cell area.
inline double integrate_nodal(const GridSpec& g, const std::vector<double>& v, const Region& region) {
  RegionWeights w(g, region);
  double s = 0.0;
  for (std::size_t j = w.row_begin(); j < w.row_end(); ++j)
    for (std::size_t i = w.col_begin(); i < w.col_end(); ++i) s += w(i, j) * v[g.index(i, j)];
  return s * g.h * g.h;
}

}  // namespace glv::test
