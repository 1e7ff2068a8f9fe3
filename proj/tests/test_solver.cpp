#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "glv/ansatz.hpp"
#include "glv/errors.hpp"
#include "glv/helical.hpp"
#include "glv/operators.hpp"
#include "glv/profile.hpp"
#include "glv/solver.hpp"
#include "glv/vortex.hpp"
#include "support.hpp"

using namespace glv;
using glv::test::phase;

namespace {

// winding of the boundary values, nodes ordered by angle about c
int trace_winding(const GridSpec& g, const BoundaryData& bc, Point2 c = {}) {
  std::vector<std::pair<double, cplx>> v;
  for (std::size_t q = 0; q < bc.nodes.size(); ++q) {
    const std::size_t n = bc.nodes[q];
    const double x = g.x(n % g.nx) - c.x, y = g.y(n / g.nx) - c.y;
    v.emplace_back(std::atan2(y, x), bc.values[q]);
  }
  std::sort(v.begin(), v.end(), [](auto& a, auto& b) { return a.first < b.first; });
  double total = 0.0;
  for (std::size_t q = 0; q < v.size(); ++q)
    total += std::arg(v[(q + 1) % v.size()].second / v[q].second);
  return int(std::lround(total / (2.0 * std::numbers::pi)));
}

// Field with the given boundary data on the boundary nodes of g.
template <class F>
ComplexField with_trace(const GridSpec& g, double eps, const BoundaryData& bc, F&& f) {
  auto u = ComplexField::sample(g, eps, f);
  auto v = u.values();
  for (std::size_t q = 0; q < bc.nodes.size(); ++q) v[bc.nodes[q]] = bc.values[q];
  return u.with_values(std::move(v));
}

double sup_diff(const ComplexField& a, const ComplexField& b) {
  double d = 0.0;
  for (std::size_t n = 0; n < a.grid().size(); ++n)
    if (a.active(n)) d = std::max(d, std::abs(a[n] - b[n]));
  return d;
}

}  // namespace

TEST(DegreeData, Windings) {
  const auto g = GridSpec::disk(96, 1.0, 0.95);
  for (int k : {0, 1, -2, 3}) {
    const auto bc = dirichlet_degree_data(k, g);
    ASSERT_FALSE(bc.nodes.empty());
    EXPECT_EQ(trace_winding(g, bc), k);
    for (std::size_t q = 0; q < bc.nodes.size(); ++q) {
      ASSERT_NEAR(std::abs(bc.values[q]), 1.0, 1e-15);
      if (k == 0) {
        ASSERT_EQ(bc.values[q], cplx(1.0, 0.0));
      }
      if (k == 1) {
        const std::size_t n = bc.nodes[q];
        ASSERT_NEAR(std::abs(bc.values[q] - phase(g.x(n % g.nx), g.y(n / g.nx))), 0.0, 1e-15);
      }
    }
  }
  const Point2 c{0.1, -0.05};
  EXPECT_EQ(trace_winding(g, dirichlet_degree_data(2, g, c), c), 2);
  const std::size_t n = dirichlet_degree_data(1, g).nodes.front();
  EXPECT_THROW(dirichlet_degree_data(1, g, {g.x(n % g.nx), g.y(n / g.nx)}), DomainError);
}

TEST(SolveConfig, Validation) {
  SolveConfig c;
  EXPECT_NO_THROW(c.validate());
  c.dt_factor = 0.6;
  EXPECT_THROW(c.validate(), PreconditionError);
  c = {};
  c.residual_tol = 0.0;
  EXPECT_THROW(c.validate(), PreconditionError);
  c = {};
  c.damping = 1.5;
  EXPECT_THROW(c.validate(), PreconditionError);
}

TEST(GradientFlow, FixedPoint) {
  const auto g = GridSpec::disk(64, 1.0, 1.0);
  const auto bc = dirichlet_degree_data(0, g);
  const auto u = ComplexField::sample(g, 0.1, [](double, double) { return cplx(1.0, 0.0); });
  const auto res = gradient_flow(u, bc, {});
  EXPECT_TRUE(res.converged);
  EXPECT_EQ(res.steps, 0);
  EXPECT_EQ(res.field.values(), u.values());
  const auto nr = newton_refine(u, bc, {});
  EXPECT_EQ(nr.newton_iterations, 0);
  EXPECT_EQ(nr.field.values(), u.values());
}

TEST(GradientFlow, RejectsMismatchedTrace) {
  const auto g = GridSpec::disk(64, 1.0, 1.0);
  const auto u = ComplexField::sample(g, 0.1, [](double, double) { return cplx(1.0, 0.0); });
  EXPECT_THROW(gradient_flow(u, dirichlet_degree_data(1, g), {}), PreconditionError);
}

// Descent, boundary preservation, convergence to the radial vortex, and the
// pointwise bounds of a critical point.
TEST(GradientFlow, DegreeOneConeRelaxesToTheVortex) {
  const double eps = 0.1;
  const auto g = GridSpec::disk(128, 1.0, 1.0);
  const auto bc = dirichlet_degree_data(1, g);
  const auto u0 = with_trace(g, eps, bc, [](double x, double y) { return phase(x, y); });
  SolveConfig cfg;
  cfg.residual_tol = 1e-6;
  const auto res = gradient_flow(u0, bc, cfg);
  ASSERT_TRUE(res.converged);
  EXPECT_LE(res.residual, 1e-6);
  EXPECT_LE(gl_residual(res.field).sup(), 1e-6 * (1.0 + 1e-9));
  const double E0 = res.log.front().energy;
  for (std::size_t q = 1; q < res.log.size(); ++q)
    ASSERT_LE(res.log[q].energy, res.log[q - 1].energy + 1e-10 * E0) << "step " << res.log[q].step;
  for (std::size_t q = 0; q < bc.nodes.size(); ++q)
    ASSERT_EQ(res.field[bc.nodes[q]], bc.values[q]);

  const auto p = profile_for(1);
  double worst = 0.0;
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i) {
      const std::size_t n = g.index(i, j);
      if (!g.in_plane_active(i, j)) continue;
      const double r = std::hypot(g.x(i), g.y(j));
      if (r < 0.9) worst = std::max(worst, std::abs(std::abs(res.field[n]) - p->value(r / eps)));
    }
  EXPECT_LT(worst, 0.02);
  EXPECT_LT(std::abs(res.field.interpolate(0.0, 0.0)), 0.05);

  const auto pw = pointwise_bounds_audit(res.field);
  EXPECT_TRUE(pw.finite);
  EXPECT_LE(pw.c1, 10.0);
  EXPECT_LE(pw.c2, 10.0);

  const std::string csv = descent_log_csv(res.log);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "step,energy,residual,dt");
}

// The inner-variation identity: on a critical point div T is a discretisation
// remainder, far below its size on the unrelaxed start.
TEST(GradientFlow, StressDivergenceVanishesAtCriticalPoints) {
  const double eps = 0.1;
  const auto g = GridSpec::disk(128, 1.0, 1.0);
  const auto bc = dirichlet_degree_data(1, g);
  const auto u0 = with_trace(g, eps, bc, [](double x, double y) { return phase(x, y); });
  SolveConfig cfg;
  cfg.residual_tol = 1e-8;
  cfg.newton = true;
  const auto u = relax(u0, bc, cfg).field;
  auto sup_div = [&](const ComplexField& f) {
    const auto d = stress_divergence(stress_energy(f));
    double s = 0.0;
    for (std::size_t j = 0; j < g.ny; ++j)
      for (std::size_t i = 0; i < g.nx; ++i) {
        if (std::hypot(g.x(i), g.y(j)) > 0.8) continue;
        const std::size_t n = g.index(i, j);
        s = std::max(s, std::hypot(d.component(0)[n], d.component(1)[n]));
      }
    return s;
  };
  EXPECT_LT(sup_div(u), 0.1 * sup_div(u0));
}

// A +-1 pair with degree-zero data annihilates: no |log eps| energy is left.
TEST(GradientFlow, DipoleAnnihilates) {
  const double eps = 0.05;
  const auto g = GridSpec::disk(128, 1.0, 1.0);
  const auto bc = dirichlet_degree_data(0, g);
  VortexSpec s;
  s.centers = {{-0.15, 0.0}, {0.15, 0.0}};
  s.degrees = {1, -1};
  const VortexProduct vp(s, eps);
  const auto u0 = with_trace(g, eps, bc, [&](double x, double y) { return vp.value(x, y); });
  SolveConfig cfg;
  cfg.residual_tol = 1e-6;
  cfg.max_steps = 50000;
  const auto res = gradient_flow(u0, bc, cfg);
  ASSERT_TRUE(res.converged);
  EXPECT_LT(energy_breakdown(res.field, Region::whole_grid()).total, 0.5);
  const auto m = vorticity_mask(res.field, 0.5);
  EXPECT_EQ(std::count(m.begin(), m.end(), 1), 0);
}

TEST(GradientFlow, ExplicitAndSemiImplicitAgree) {
  const double eps = 0.15;
  const auto g = GridSpec::disk(48, 1.0, 1.0);
  const auto bc = dirichlet_degree_data(1, g);
  const auto u0 = with_trace(g, eps, bc, [](double x, double y) { return phase(x, y); });
  SolveConfig cfg;
  cfg.residual_tol = 1e-9;
  cfg.max_steps = 400000;
  const auto a = gradient_flow(u0, bc, cfg);
  cfg.explicit_flow = true;
  const auto b = gradient_flow(u0, bc, cfg);
  ASSERT_TRUE(a.converged);
  ASSERT_TRUE(b.converged);
  EXPECT_LE(sup_diff(a.field, b.field), 10.0 * cfg.residual_tol);
}

TEST(NewtonRefine, FromFlowOutput) {
  const double eps = 0.1;
  const auto g = GridSpec::disk(128, 1.0, 1.0);
  const auto bc = dirichlet_degree_data(1, g);
  const auto u0 = with_trace(g, eps, bc, [](double x, double y) { return phase(x, y); });
  SolveConfig cfg;
  cfg.residual_tol = 1e-4;
  const auto flow = gradient_flow(u0, bc, cfg);
  cfg.residual_tol = 1e-9;
  const auto nr = newton_refine(flow.field, bc, cfg);
  ASSERT_TRUE(nr.converged);
  EXPECT_LE(nr.residual, 1e-9);
  EXPECT_LE(nr.newton_iterations, 6);
  for (std::size_t q = 0; q < bc.nodes.size(); ++q) ASSERT_EQ(nr.field[bc.nodes[q]], bc.values[q]);
  // a converged field needs no correction
  const auto again = newton_refine(nr.field, bc, cfg);
  EXPECT_EQ(again.newton_iterations, 0);
  EXPECT_EQ(again.field.values(), nr.field.values());
}

// From u = 0 the Jacobian eps^2 Lap + 1 is indefinite once eps^2 lambda_1 < 1
// for several Dirichlet eigenvalues; at eps = 0.2 damped Newton still finds
// the positive solution.
TEST(NewtonRefine, ZeroStartWithUnitData) {
  const double eps = 0.2;
  const auto g = GridSpec::disk(64, 1.0, 1.0);
  const auto bc = dirichlet_degree_data(0, g);
  const auto u0 = with_trace(g, eps, bc, [](double, double) { return cplx{}; });
  SolveConfig cfg;
  cfg.residual_tol = 1e-9;
  cfg.max_newton = 200;
  const auto res = newton_refine(u0, bc, cfg);
  ASSERT_TRUE(res.converged);
  double lo = 2.0, hi = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n)
    if (res.field.active(n)) {
      lo = std::min(lo, res.field[n].real());
      hi = std::max(hi, std::abs(res.field[n]));
    }
  EXPECT_GT(lo, 0.0);
  EXPECT_LE(hi, 1.0 + 10.0 * eps * eps);
  EXPECT_TRUE(pointwise_bounds_audit(res.field).pass);
}

TEST(HelicalReducedSolve, TrivialFixedPoint) {
  const auto g = GridSpec::square(48, 1.0);
  const auto v = ComplexField::sample(g, 0.1, [](double, double) { return cplx(1.0, 0.0); });
  const auto res = helical_reduced_solve(0, v, {});
  EXPECT_TRUE(res.converged);
  EXPECT_EQ(res.field.values(), v.values());
  EXPECT_EQ(helical_reduced_residual(v, 0), 0.0);
}

// For kappa = 1 a centred vortex is equivariant, so the twist term vanishes
// and the reduced solution is the radial profile.
TEST(HelicalReducedSolve, DegreeOneIsRadial) {
  const double eps = 0.1;
  const auto g = GridSpec::square(129, 1.0);
  const auto v0 = ComplexField::sample(g, eps, [&](double x, double y) {
    const double r = std::hypot(x, y);
    return std::min(1.0, r / eps) * phase(x, y);
  });
  SolveConfig cfg;
  cfg.residual_tol = 1e-8;
  cfg.newton = true;
  const auto res = helical_reduced_solve(1, v0, cfg);
  ASSERT_TRUE(res.converged);
  EXPECT_LE(helical_reduced_residual(res.field, 1), 1e-8);
  const auto p = profile_for(1);
  double worst = 0.0;
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i) {
      const double r = std::hypot(g.x(i), g.y(j));
      if (r > 0.9) continue;
      worst = std::max(worst, std::abs(std::abs(res.field.at(i, j)) - p->value(r / eps)));
    }
  EXPECT_LT(worst, 0.02);
}

TEST(HelicalReducedSolve, TwoVorticesKeepTwoZeros) {
  const double eps = 0.1, d = 0.3;
  const auto g = GridSpec::square(129, 1.5);
  const auto v0 = build_vortex_product(VortexSpec::ring({1, 1}, d), eps, g);
  SolveConfig cfg;
  cfg.residual_tol = 1e-7;
  cfg.newton = true;
  const auto res = helical_reduced_solve(2, v0, cfg);
  ASSERT_TRUE(res.converged);
  const auto& v = res.field;
  // one unit zero in each half plane, none at the centre
  for (double side : {-1.0, 1.0}) {
    double best = 1e300;
    Point2 at{};
    for (std::size_t j = 0; j < g.ny; ++j)
      for (std::size_t i = 0; i < g.nx; ++i)
        if (side * g.x(i) > 0.0 && std::abs(v.at(i, j)) < best) {
          best = std::abs(v.at(i, j));
          at = {g.x(i), g.y(j)};
        }
    EXPECT_LT(best, 0.25);
    EXPECT_EQ(loop_degree(v, {at, 0.15}), 1);
  }
  EXPECT_EQ(loop_degree(v, {{}, 0.2}), 0);
  EXPECT_EQ(loop_degree(v, {{}, 1.2}), 2);
}
