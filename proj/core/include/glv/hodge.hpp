#pragma once

#include <string>
#include <vector>

#include "glv/field.hpp"
#include "glv/grid.hpp"
#include "glv/vortex.hpp"

namespace glv {

// Radial cutoff: 1 on D_{r_one}(center), 0 off D_{r_zero}, quintic ramp.
struct Cutoff {
  Point2 center{};
  double r_one = 0.75;
  double r_zero = 0.875;
  double operator()(double x, double y) const;
};

// chi(t) = 1 on [0, 1/4], 1/t on [1/2, inf), quintic blend in between.
double hodge_chi(double t);

// Staggered decomposition of jv = chi(|u|)^2 ju on a 2D grid:
//   jv = d psi + d*beta + h.
// One-forms live on edges: component 0 at node (i, j) is the x-edge from
// (i, j) to (i+1, j), component 1 the y-edge from (i, j) to (i, j+1).
// psi lives on nodes with psi = 0 on the grid boundary; beta lives on cell
// centres (the dual grid) and is the free-space potential
//   -Lap beta = phi djv,   d*beta = (d_y beta, -d_x beta),
// so a degree-one vortex gives beta ~ log(1/r). Boundary cells of the dual
// grid take the multipole expansion of the free-space potential.
struct HodgeParts {
  GridSpec grid;       // node grid of u
  GridSpec dual;       // cell-centre grid (beta)
  Cutoff cutoff;
  double epsilon = 0.0;
  ScalarField psi;
  ScalarField beta;
  OneFormField jv;
  OneFormField h;
  double source_mass = 0.0;      // integral of phi djv
  double solver_residual = 0.0;  // sup of both elliptic residuals on the interior
  double harmonic_defect = 0.0;  // sup of the edge Laplacian of h on {phi = 1}
  double harmonic_scale = 0.0;   // (2/h) solver_residual, the roundoff scale of that defect
  double reconstruction = 0.0;   // sup |jv - d psi - d*beta - h|
};

// Throws DomainError if {|u| <= 1/2} reaches where phi < 1.
HodgeParts hodge_decompose(const ComplexField& u, const Cutoff& cutoff = {});

// Bilinear interpolation of beta; throws DomainError where phi < 1.
std::vector<double> beta_at(const HodgeParts& parts, const std::vector<Point2>& points);

// kappa_i |log eps| + sum_{j != i} kappa_j log(1/|p_i - p_j|) per cluster.
std::vector<double> beta_prediction(const std::vector<VortexCluster>& clusters, double eps);

// (1/|log eps|) integral over D_{r_one} of |ju - d*beta|^2 at edge midpoints.
double coex_defect(const ComplexField& u, const HodgeParts& parts);

// (1/|log eps|) sum_i beta(p_i) kappa_i over unflagged clusters.
double theta_via_beta(const HodgeParts& parts, const std::vector<VortexCluster>& clusters);

// beta along the ray from center in direction angle, at the given radii:
// CSV columns r, log_r, beta.
std::string beta_line_profile(const HodgeParts& parts, Point2 center,
                              const std::vector<double>& radii, double angle = 0.0);

}  // namespace glv
