#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "glv/field.hpp"
#include "glv/profile.hpp"
#include "glv/quadrature.hpp"

namespace glv {

struct VortexSpec {
  std::vector<Point2> centers;
  std::vector<int> degrees;  // nonzero
  std::optional<double> separation_exponent;

  void validate() const;
  int total_degree() const;

  // m vortices of the given degrees on a regular m-gon centred at 0 whose
  // nearest-neighbour distance is eps^sigma (a single vortex sits at 0).
  static VortexSpec polygon(const std::vector<int>& degrees, double eps, double sigma,
                            double rotation = 0.0);
  // m vortices on a regular m-gon of the given circumradius.
  static VortexSpec ring(const std::vector<int>& degrees, double radius, double rotation = 0.0);
};

// u(z) = prod_j w_{kappa_j}((z - p_j)/eps), with w_{-k} = conj(w_k), evaluated
// analytically from the profile tables together with its derivatives.
class VortexProduct {
 public:
  VortexProduct(VortexSpec spec, double eps);

  FieldSample sample(double x, double y) const;
  cplx value(double x, double y) const { return sample(x, y).u; }
  const VortexSpec& spec() const { return spec_; }
  double epsilon() const { return eps_; }

 private:
  VortexSpec spec_;
  double eps_;
  std::vector<std::shared_ptr<const RadialProfile>> prof_;
};

// Samples the product on the active nodes of the grid.
ComplexField build_vortex_product(const VortexSpec& spec, double eps, const GridSpec& grid);

// u(x) = v(x / s) with s = eps^tau, carrying eps' = eps^(1 + tau).
template <class Sampler>
class BlowDown {
 public:
  BlowDown(const Sampler& inner, double scale) : inner_(inner), s_(scale) {}
  FieldSample sample(double x, double y) const {
    FieldSample f = inner_.sample(x / s_, y / s_);
    f.ux /= s_;
    f.uy /= s_;
    return f;
  }

 private:
  const Sampler& inner_;
  double s_;
};

// Grid version: samples v at x / eps^tau with bicubic interpolation onto
// `target`. tau = 0 on v's own grid returns v unchanged.
ComplexField blow_down(const ComplexField& v, double tau, const GridSpec& target);

}  // namespace glv
