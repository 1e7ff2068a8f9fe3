#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "glv/field.hpp"
#include "glv/grid.hpp"

namespace glv {

struct SolveConfig {
  double dt_factor = 0.2;       // semi-implicit step dt = dt_factor eps^2
  int max_steps = 20000;
  double residual_tol = 1e-6;   // sup of |eps^2 Lap u + (1-|u|^2) u| on free nodes
  bool newton = false;          // relax(): finish with newton_refine
  double damping = 1.0;         // initial Newton step length
  bool explicit_flow = false;   // forward Euler instead of semi-implicit
  int max_newton = 30;
  double newton_switch = 1e-3;  // relax(): flow residual at which Newton takes over

  void validate() const;  // throws PreconditionError
};

// Fixed values on the nodes that are not solved for. periodic_t marks the
// lateral trace of a cylinder field (the t direction itself is periodic).
struct BoundaryData {
  BoundaryKind kind = BoundaryKind::dirichlet;
  std::vector<std::size_t> nodes;
  std::vector<cplx> values;
};

// Active nodes whose stencil of the given reach (1: 5-point, 2: the helical
// operator) is not entirely active.
std::vector<std::size_t> boundary_nodes(const GridSpec& g, int band = 1);

// g = ((z - c)/|z - c|)^kappa on boundary_nodes(grid, band).
BoundaryData dirichlet_degree_data(int kappa, const GridSpec& grid, Point2 center = {},
                                   int band = 1);

// Current values of u on boundary_nodes(grid, band).
BoundaryData trace_of(const ComplexField& u, int band = 1);

struct DescentEntry {
  int step = 0;
  double energy = 0.0;
  double residual = 0.0;
  double dt = 0.0;
};

struct SolveResult {
  ComplexField field;
  std::vector<DescentEntry> log;
  int steps = 0;
  int newton_iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

// Gradient flow of the discrete energy
//   E_h = sum_edges V |du/len|^2 / 2 + V sum_nodes W(u)/eps^2 [+ twist term],
// V the cell volume. Semi-implicit: (I - dt Lap_h) u+ = u + dt (1-|u|^2) u / eps^2,
// solved by preconditioned CG. A step that raises E_h by more than
// 1e-10 |E_0| is rejected and dt halved. Stops at residual_tol or max_steps.
SolveResult gradient_flow(const ComplexField& u0, const BoundaryData& bc, const SolveConfig& cfg);

// Damped Newton on the free nodes with MINRES inner solves. Boundary values
// are never touched.
SolveResult newton_refine(const ComplexField& u, const BoundaryData& bc, const SolveConfig& cfg);

// gradient_flow down to max(residual_tol, newton_switch), then newton_refine
// when cfg.newton is set.
SolveResult relax(const ComplexField& u0, const BoundaryData& bc, const SolveConfig& cfg);

// Helical reduction on a 2D grid:
//   eps^2 [Lap v + (i kappa - d_theta)^2 v] + (1 - |v|^2) v = 0,
// d_theta = x d_y - y d_x. The trace of v0 on the band-2 boundary is kept.
SolveResult helical_reduced_solve(int kappa, const ComplexField& v0, const SolveConfig& cfg);

// Sup of the reduced residual over the band-2 interior.
double helical_reduced_residual(const ComplexField& v, int kappa);

std::string descent_log_csv(const std::vector<DescentEntry>& log);

}  // namespace glv
