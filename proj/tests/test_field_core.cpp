#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "glv/ansatz.hpp"
#include "glv/errors.hpp"
#include "glv/operators.hpp"
#include "glv/profile.hpp"
#include "support.hpp"

using namespace glv;
using glv::test::integrate_nodal;
using glv::test::phase;
using glv::test::phase_field;

namespace {

constexpr double pi = std::numbers::pi;

ComplexField single_vortex(std::size_t n, double half_width, double eps, Point2 c = {}) {
  VortexSpec s;
  s.centers = {c};
  s.degrees = {1};
  return build_vortex_product(s, eps, GridSpec::square(n, half_width));
}

}  // namespace

TEST(EnergyBreakdown, ConstantMapHasNoEnergy) {
  const auto g = GridSpec::square(65, 1.0);
  const auto u = ComplexField::sample(g, 0.1, [](double, double) { return std::polar(1.0, 0.7); });
  for (const Region& r : {Region::whole_grid(), Region::ball({0.1, -0.2}, 0.5),
                          Region::annulus({}, 0.2, 0.9)}) {
    const auto e = energy_breakdown(u, r);
    EXPECT_EQ(e.dirichlet, 0.0);
    EXPECT_LT(e.potential, 1e-25);
  }
}

// Dirichlet energy of e^{ik theta} on D_1 \ D_s is pi k^2 log(1/s).
TEST(EnergyBreakdown, AnnulusMatchesExactIntegral) {
  const auto g = GridSpec::square(2049, 1.0);
  for (auto [k, s] : {std::pair{1, 0.25}, std::pair{2, 0.25}, std::pair{1, 0.1}}) {
    const auto u = phase_field(g, 0.01, k);
    const auto e = energy_breakdown(u, Region::annulus({}, s, 1.0));
    const double exact = pi * k * k * std::log(1.0 / s);
    EXPECT_NEAR(e.dirichlet, exact, 0.01 * exact) << "k " << k << " s " << s;
    EXPECT_LT(e.potential, 1e-20);
    EXPECT_DOUBLE_EQ(e.total, e.dirichlet + e.potential);
  }
}

TEST(EnergyBreakdown, Errors) {
  const auto g = GridSpec::square(65, 1.0);
  const auto u = phase_field(g, 0.01);  // h = 1/32 > eps / 2
  EXPECT_FALSE(u.resolved());
  EXPECT_THROW(energy_breakdown(u, Region::whole_grid()), PreconditionError);
  EnergyOptions opt;
  opt.allow_under_resolved = true;
  EXPECT_NO_THROW(energy_breakdown(u, Region::whole_grid(), opt));
  EXPECT_THROW(energy_breakdown(u, Region::ball({}, 0.0), opt), Error);
  EXPECT_THROW(energy_breakdown(u, Region::ball({}, 1.5), opt), DomainError);

  std::vector<cplx> v(g.size(), cplx(1.0, 0.0));
  v[g.index(3, 4)] = cplx(std::nan(""), 0.0);
  EXPECT_THROW(ComplexField(g, 0.1, v), NonFiniteError);
}

TEST(EnergyBreakdown, ConjugationInvariant) {
  const auto u = single_vortex(257, 1.0, 0.05, {0.1, -0.05});
  const auto a = energy_breakdown(u, Region::ball({}, 0.8));
  const auto b = energy_breakdown(u.conj(), Region::ball({}, 0.8));
  EXPECT_EQ(a.dirichlet, b.dirichlet);
  EXPECT_EQ(a.potential, b.potential);
}

// u_r(x) = u(r x) at eps / r on B_1 against u on B_r (n = 2: no power of r).
TEST(EnergyBreakdown, Scaling) {
  const double eps = 0.02, r = 0.5;
  const auto u = single_vortex(1025, 1.05, eps, {0.05, 0.0});
  VortexSpec s;
  s.centers = {{0.05 / r, 0.0}};
  s.degrees = {1};
  const auto ur = build_vortex_product(s, eps / r, GridSpec::square(1025, 1.05));
  const double e_small = energy_breakdown(u, Region::ball({}, r)).total;
  const double e_unit = energy_breakdown(ur, Region::ball({}, 1.0)).total;
  EXPECT_NEAR(e_unit, e_small, 0.02 * e_small);
}

TEST(EnergyDensity, NonnegativeAndDominatesCurrent) {
  const auto u = single_vortex(129, 1.0, 0.05, {0.1, 0.2});
  const auto e = energy_density(u);
  const auto j = current_one_form(u);
  const auto& g = u.grid();
  const double eps = u.epsilon();
  for (std::size_t n = 0; n < g.size(); ++n) {
    ASSERT_GE(e[n], 0.0);
    const double m = std::abs(u[n]);
    if (m < 0.5) continue;
    const double ju2 = std::pow(j.component(0)[n], 2) + std::pow(j.component(1)[n], 2);
    const double w = std::pow(1.0 - m * m, 2) / (4.0 * eps * eps);
    EXPECT_GE(e[n] + 1e-12, 0.5 * ju2 - w);
  }
}

TEST(GlResidual, TrivialSolutions) {
  const auto g = GridSpec::disk(64, 1.0, 0.9);
  for (cplx c : {cplx(1.0, 0.0), cplx(0.0, 0.0), std::polar(1.0, 2.0)}) {
    const auto u = ComplexField::sample(g, 0.1, [c](double, double) { return c; });
    EXPECT_LT(gl_residual(u).sup(), 1e-15);
  }
}

// The degree-one radial solution sampled on the grid: the residual is the
// truncation error of the 5-point Laplacian, eps^2 h^2 |u''''| / 12, with
// |u''''| of order eps^-4.
TEST(GlResidual, RadialProfileIsSecondOrder) {
  const double eps = 0.05;
  double prev = 0.0;
  for (std::size_t n : {129, 257, 513}) {
    const auto u = single_vortex(n, 1.0, eps);
    const double h = u.grid().h;
    const double res = gl_residual(u).sup();
    EXPECT_LT(res, 5.0 * h * h / (eps * eps)) << "n " << n;
    if (prev > 0.0) {
      EXPECT_NEAR(prev / res, 4.0, 1.0);
    }
    prev = res;
  }
}

TEST(CurrentOneForm, ConstantAndConjugation) {
  const auto g = GridSpec::square(65, 1.0);
  const auto c = ComplexField::sample(g, 0.1, [](double, double) { return cplx(0.3, -0.4); });
  const auto jc = current_one_form(c);
  for (std::size_t n = 0; n < g.size(); ++n) {
    EXPECT_EQ(jc.component(0)[n], 0.0);
    EXPECT_EQ(jc.component(1)[n], 0.0);
  }
  const auto u = single_vortex(65, 1.0, 0.05, {0.2, 0.1});
  const auto a = current_one_form(u), b = current_one_form(u.conj());
  const auto ja = jacobian_two_form(u), jb = jacobian_two_form(u.conj());
  for (std::size_t n = 0; n < g.size(); ++n) {
    EXPECT_EQ(a.component(0)[n], -b.component(0)[n]);
    EXPECT_EQ(a.component(1)[n], -b.component(1)[n]);
    EXPECT_EQ(ja.component(0)[n], -jb.component(0)[n]);
  }
}

// ju of e^{i theta} is d theta, of length 1/|x|.
TEST(CurrentOneForm, PhaseGradient) {
  const auto g = GridSpec::square(257, 1.0);
  const auto j = current_one_form(phase_field(g, 0.05));
  for (std::size_t jj = 0; jj < g.ny; ++jj)
    for (std::size_t i = 0; i < g.nx; ++i) {
      const double r = std::hypot(g.x(i), g.y(jj));
      if (r < 8.0 * g.h) continue;
      const std::size_t n = g.index(i, jj);
      const double len = std::hypot(j.component(0)[n], j.component(1)[n]);
      ASSERT_NEAR(len * r, 1.0, 0.02) << "at " << g.x(i) << "," << g.y(jj);
    }
}

TEST(JacobianTwoForm, SmoothPhaseIsClosed) {
  const auto g = GridSpec::square(129, 1.0);
  const auto u = ComplexField::sample(g, 0.1, [](double x, double y) {
    return std::polar(1.0, std::sin(2.0 * x) + x * y);
  });
  const auto J = jacobian_two_form(u);
  double sup = 0.0;
  for (double v : J.component(0)) sup = std::max(sup, std::abs(v));
  EXPECT_LT(sup, 1e-3);
}

TEST(JacobianTwoForm, IntegralCountsDegree) {
  const double eps = 0.01;
  const auto g = GridSpec::square(1025, 1.0);
  const auto u = build_vortex_product(VortexSpec::ring({1}, 0.0), eps, g);
  const double mass = integrate_nodal(g, jacobian_two_form(u).component(0), Region::ball({}, 0.5));
  EXPECT_NEAR(mass, pi, 0.02 * pi);

  VortexSpec d;
  d.centers = {{-0.1, 0.05}, {0.15, 0.0}};
  d.degrees = {1, -1};
  const auto v = build_vortex_product(d, eps, g);
  const double dip = integrate_nodal(g, jacobian_two_form(v).component(0), Region::ball({}, 0.5));
  EXPECT_NEAR(dip, 0.0, 0.05 * pi);
}

// Trapezoid integral of J over a node-aligned rectangle against half the
// circulation of ju around it.
TEST(JacobianTwoForm, Stokes) {
  const auto u = single_vortex(257, 1.0, 0.08, {0.03, 0.06});
  const auto& g = u.grid();
  const auto J = jacobian_two_form(u).component(0);
  const auto j = current_one_form(u);
  const std::size_t i0 = 60, i1 = 190, j0 = 80, j1 = 200;
  double area = 0.0;
  for (std::size_t b = j0; b <= j1; ++b)
    for (std::size_t a = i0; a <= i1; ++a) {
      const double w = (a == i0 || a == i1 ? 0.5 : 1.0) * (b == j0 || b == j1 ? 0.5 : 1.0);
      area += w * J[g.index(a, b)];
    }
  area *= g.h * g.h;
  auto jx = [&](std::size_t a, std::size_t b) { return j.component(0)[g.index(a, b)]; };
  auto jy = [&](std::size_t a, std::size_t b) { return j.component(1)[g.index(a, b)]; };
  double circ = 0.0;
  for (std::size_t a = i0; a < i1; ++a)
    circ += 0.5 * (jx(a, j0) + jx(a + 1, j0)) - 0.5 * (jx(a, j1) + jx(a + 1, j1));
  for (std::size_t b = j0; b < j1; ++b)
    circ += 0.5 * (jy(i1, b) + jy(i1, b + 1)) - 0.5 * (jy(i0, b) + jy(i0, b + 1));
  circ *= g.h;
  EXPECT_NEAR(area, 0.5 * circ, 0.01 * pi);
  EXPECT_NEAR(area, pi, 0.05 * pi);
}

TEST(StressEnergy, DefinitionIdentities) {
  const auto g = GridSpec::square(65, 1.0);
  const auto c = ComplexField::sample(g, 0.1, [](double, double) { return cplx(0.6, 0.8); });
  const auto Tc = stress_energy(c);
  for (std::size_t n = 0; n < g.size(); n += 7)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) EXPECT_NEAR(Tc.entry(n, a, b), 0.0, 1e-14);

  const auto u = single_vortex(65, 1.0, 0.05, {0.05, -0.1});
  const auto T = stress_energy(u);
  const auto e = energy_density(u);
  for (std::size_t jj = 1; jj + 1 < g.ny; jj += 3)
    for (std::size_t i = 1; i + 1 < g.nx; i += 3) {
      const std::size_t n = g.index(i, jj);
      const auto du = node_gradient(u, i, jj);
      const double du2 = std::norm(du[0]) + std::norm(du[1]);
      EXPECT_NEAR(T.entry(n, 0, 0) + T.entry(n, 1, 1), 2.0 * e[n] - du2, 1e-10 * (1.0 + e[n]));
      EXPECT_EQ(T.entry(n, 0, 1), T.entry(n, 1, 0));
      const double ang = 0.3 * double(i + jj);
      const double w0 = std::cos(ang), w1 = std::sin(ang);
      const double Tww = w0 * w0 * T.entry(n, 0, 0) + 2 * w0 * w1 * T.entry(n, 0, 1) +
                         w1 * w1 * T.entry(n, 1, 1);
      EXPECT_NEAR(Tww, e[n] - std::norm(w0 * du[0] + w1 * du[1]), 1e-10 * (1.0 + e[n]));
    }
}

// At (r, 0) for e^{i theta}: T_tt - T_rr = -1/r^2.
TEST(StressEnergy, PhaseFieldPolarFrame) {
  const auto g = GridSpec::square(257, 1.0);
  const auto T = stress_energy(phase_field(g, 0.05));
  for (std::size_t i = 180; i < 250; i += 10) {
    const std::size_t n = g.index(i, 128);
    const double r = g.x(i);
    EXPECT_NEAR((T.entry(n, 1, 1) - T.entry(n, 0, 0)) * r * r, -1.0, 0.01);
    EXPECT_NEAR(T.entry(n, 0, 1), 0.0, 1e-12);
  }
}

TEST(BallEnergyProfile, ConstantAndPhase) {
  const auto g = GridSpec::square(1025, 1.05);
  const auto c = ComplexField::sample(g, 0.05, [](double, double) { return cplx(1.0, 0.0); });
  for (const auto& b : ball_energy_profile(c, {}, {0.1, 0.5, 1.0})) {
    EXPECT_EQ(b.energy, 0.0);
    EXPECT_EQ(b.potential2, 0.0);
  }
  const auto u = phase_field(g, 0.05);
  const double s = 0.1;
  const auto p = ball_energy_profile(u, {}, {s, 1.0});
  EXPECT_NEAR(p[1].energy - p[0].energy, pi * std::log(1.0 / s), 0.01 * pi * std::log(1.0 / s));
  EXPECT_THROW(ball_energy_profile(u, {}, {0.5, 1.2}), DomainError);
}

// E(B_r) / log(r / eps) of a single vortex between pi and 1.15 pi.
TEST(BallEnergyProfile, SingleVortexLogGrowth) {
  const double eps = 1e-3, r = 0.5;
  const auto u = single_vortex(2401, 0.6, eps);
  ASSERT_TRUE(u.resolved());
  const double e = ball_energy_profile(u, {}, {r})[0].energy;
  const double ratio = e / std::log(r / eps);
  EXPECT_GE(ratio, pi);
  EXPECT_LE(ratio, 1.15 * pi);
}
