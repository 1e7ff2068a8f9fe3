#pragma once

#include <array>
#include <vector>

#include "glv/field.hpp"
#include "glv/quadrature.hpp"

namespace glv {

struct EnergyOptions {
  bool allow_under_resolved = false;
  int supersample = 8;
};

// Central-difference derivatives at node n in axis order (x, y[, t]). Nodes
// missing a neighbour in the plane fall back to one-sided differences; t is
// periodic.
std::array<cplx, 3> node_gradient(const ComplexField& u, std::size_t i, std::size_t j,
                                  std::size_t k = 0);

// Nodes whose full 5-point (7-point) stencil is active.
std::vector<std::uint8_t> interior_mask(const GridSpec& g, const std::vector<std::uint8_t>& active);

// e = |du|^2/2 + (1-|u|^2)^2/(4 eps^2), per active node.
ScalarField energy_density(const ComplexField& u);

EnergyBreakdown energy_breakdown(const ComplexField& u, const Region& region,
                                 const EnergyOptions& opt = {});

// |eps^2 Lap_h u + (1-|u|^2) u| on interior nodes.
ScalarField gl_residual(const ComplexField& u);

// ju = u^1 du^2 - u^2 du^1 = Im(conj(u) du).
OneFormField current_one_form(const ComplexField& u);

// Half the discrete exterior derivative of current_one_form.
TwoFormField jacobian_two_form(const ComplexField& u);

// T = e I - du (x) du.
StressField stress_energy(const ComplexField& u);

// Central-difference divergence of T, per interior node, in the plane.
OneFormField stress_divergence(const StressField& T);

struct BallEnergy {
  double r = 0.0;
  double energy = 0.0;
  double potential2 = 0.0;  // integral of 2W/eps^2
};

// Cumulative energies over B_r(center). For cylinder fields the balls are
// three dimensional, centered at (center, t_center).
std::vector<BallEnergy> ball_energy_profile(const ComplexField& u, Point2 center,
                                            const std::vector<double>& radii,
                                            double t_center = 0.0);

// Bilinear (trilinear, periodic in t) interpolation of the central-difference
// gradient at a point. Throws DomainError off the active set.
std::array<cplx, 3> gradient_at(const ComplexField& u, double x, double y, double t = 0.0);

// Mean over sample points of |d_nu u|^2 on the circle (sphere in 3D) of
// radius r, times its length (area): the boundary flux term of the
// monotonicity inequality.
double boundary_normal_energy(const ComplexField& u, Point2 center, double r,
                              double t_center = 0.0, int samples = 0);

// Integral of phi over a circle using bilinear interpolation of a nodal
// quantity; used for boundary terms.
double circle_integral(const GridSpec& g, const std::vector<double>& nodal, Point2 center,
                       double r, int samples);

}  // namespace glv
