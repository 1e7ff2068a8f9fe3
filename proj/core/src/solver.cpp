#include "glv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>

#include "glv/errors.hpp"
#include "glv/linalg.hpp"
#include "glv/parallel.hpp"
#include "glv/poisson.hpp"

namespace glv {

void SolveConfig::validate() const {
  if (!(dt_factor > 0.0 && dt_factor <= 0.5))
    throw PreconditionError("dt_factor out of (0, 0.5]");
  if (!(residual_tol > 0.0)) throw PreconditionError("residual_tol must be positive");
  if (!(damping > 0.0 && damping <= 1.0)) throw PreconditionError("damping out of (0, 1]");
  if (max_steps < 0 || max_newton < 0) throw PreconditionError("iteration caps must be >= 0");
}

namespace {

std::size_t nt_of(const GridSpec& g) { return g.dim() == 3 ? g.nt : 1; }

// Whether every node of the stencil of reach `band` around (i, j) is active.
bool stencil_active(const GridSpec& g, const std::vector<std::uint8_t>& a, std::size_t i,
                    std::size_t j, int band) {
  const auto b = std::size_t(band);
  if (i < b || j < b || i + b >= g.nx || j + b >= g.ny) return false;
  auto on = [&](std::size_t ii, std::size_t jj) { return a[g.index(ii, jj)] != 0; };
  if (!on(i, j)) return false;
  for (std::size_t s = 1; s <= b; ++s)
    if (!on(i - s, j) || !on(i + s, j) || !on(i, j - s) || !on(i, j + s)) return false;
  if (band >= 2)
    if (!on(i - 1, j - 1) || !on(i + 1, j - 1) || !on(i - 1, j + 1) || !on(i + 1, j + 1))
      return false;
  return true;
}

// Smallest m >= n with m + 1 a product of 2, 3, 5, 7.
std::size_t smooth_block(std::size_t n) {
  for (std::size_t m = n;; ++m) {
    std::size_t q = m + 1;
    for (std::size_t p : {2u, 3u, 5u, 7u})
      while (q % p == 0) q /= p;
    if (q == 1) return m;
  }
}

// The discretized problem: free nodes, fixed values and the linear operator
//   L = Lap_h            (standard)
//   L = Lap_h + A o A,   A = i kappa - D_theta   (helical, 2D only)
// applied at free nodes.
class Problem {
 public:
  Problem(const ComplexField& u, const BoundaryData& bc, bool helical, int kappa)
      : g_(u.grid()), eps_(u.epsilon()), helical_(helical), kappa_(kappa), active_(u.mask()) {
    if (helical && g_.dim() != 2) throw PreconditionError("helical reduction needs a 2D grid");
    nt_ = nt_of(g_);
    ih2_ = 1.0 / (g_.h * g_.h);
    it2_ = g_.dim() == 3 ? 1.0 / (g_.ht() * g_.ht()) : 0.0;
    vol_ = g_.h * g_.h * (g_.dim() == 3 ? g_.ht() : 1.0);
    const int band = helical ? 2 : 1;
    std::vector<std::uint8_t> fixed(g_.size(), 0);
    if (bc.nodes.size() != bc.values.size())
      throw PreconditionError("boundary data: node and value counts differ");
    base_ = u.values();
    for (std::size_t q = 0; q < bc.nodes.size(); ++q) {
      const std::size_t n = bc.nodes[q];
      if (n >= g_.size() || !active_[n]) throw PreconditionError("boundary node not active");
      fixed[n] = 1;
      if (std::abs(base_[n] - bc.values[q]) > 1e-12 * std::max(1.0, std::abs(bc.values[q])))
        throw PreconditionError("initial field does not match the boundary data");
      base_[n] = bc.values[q];
    }
    free_.assign(g_.size(), 0);
    amask_.assign(g_.size(), 0);
    for (std::size_t k = 0; k < nt_; ++k)
      for (std::size_t j = 0; j < g_.ny; ++j)
        for (std::size_t i = 0; i < g_.nx; ++i) {
          const std::size_t n = g_.index(i, j, k);
          if (helical && stencil_active(g_, active_, i, j, 1)) amask_[n] = 1;
          if (fixed[n] || !active_[n]) continue;
          if (stencil_active(g_, active_, i, j, band)) {
            free_[n] = 1;
            idx_.push_back(n);
          }
        }
    if (idx_.empty()) throw PreconditionError("no free nodes: grid too small for the stencil");
    scratch_.assign(g_.size(), cplx{});
    work_.assign(g_.size(), cplx{});
    lin_.assign(g_.size(), cplx{});
    lin_out_.assign(g_.size(), cplx{});
    if (g_.dim() == 2) {
      n0_ = smooth_block(g_.nx - 2);
      n1_ = smooth_block(g_.ny - 2);
      dst_ = std::make_unique<DirichletSolver>(n0_, n1_, g_.h);
      block_.assign(n0_ * n1_, 0.0);
    }
    // diagonal of L at free nodes, for Jacobi
    diag_L_ = -4.0 * ih2_ - 2.0 * it2_;
  }

  const GridSpec& grid() const { return g_; }
  double eps() const { return eps_; }
  std::size_t unknowns() const { return 2 * idx_.size(); }
  const std::vector<std::size_t>& free_nodes() const { return idx_; }
  const std::vector<cplx>& base() const { return base_; }
  const std::vector<std::uint8_t>& active() const { return active_; }

  // Spectral radius bound of -L.
  double rho() const {
    double r = 8.0 * ih2_ + 4.0 * it2_;
    if (helical_) {
      const double R = std::max({std::abs(g_.origin_x), std::abs(g_.x_max()),
                                 std::abs(g_.origin_y), std::abs(g_.y_max())}) *
                       std::sqrt(2.0);
      const double d = 2.0 * R / g_.h + std::abs(double(kappa_));
      r += d * d;
    }
    return r;
  }

  // out[n] = (L u)[n] at free nodes (other entries untouched).
  void apply_L(const std::vector<cplx>& u, std::vector<cplx>& out) {
    const GridSpec& g = g_;
    const std::size_t nx = g.nx;
    if (helical_) {
      const double i2h = 0.5 / g.h;
      const cplx ik(0.0, double(kappa_));
      parallel_for(g.ny, [&](std::size_t b, std::size_t e) {
        for (std::size_t j = b; j < e; ++j)
          for (std::size_t i = 0; i < nx; ++i) {
            const std::size_t n = g.index(i, j);
            if (!amask_[n]) continue;
            const cplx dth =
                (g.x(i) * (u[n + nx] - u[n - nx]) - g.y(j) * (u[n + 1] - u[n - 1])) * i2h;
            scratch_[n] = ik * u[n] - dth;
          }
      });
    }
    const std::size_t rows = nt_ * g.ny;
    parallel_for(rows, [&](std::size_t b, std::size_t e) {
      for (std::size_t row = b; row < e; ++row) {
        const std::size_t k = row / g.ny, j = row % g.ny;
        for (std::size_t i = 0; i < nx; ++i) {
          const std::size_t n = g.index(i, j, k);
          if (!free_[n]) continue;
          cplx lap = (u[n - 1] + u[n + 1] + u[n - nx] + u[n + nx] - 4.0 * u[n]) * ih2_;
          if (g.dim() == 3) {
            const std::size_t km = g.index(i, j, (k + g.nt - 1) % g.nt);
            const std::size_t kp = g.index(i, j, (k + 1) % g.nt);
            lap += (u[km] + u[kp] - 2.0 * u[n]) * it2_;
          }
          if (helical_) {
            const std::vector<cplx>& a = scratch_;
            const double i2h = 0.5 / g.h;
            const cplx dth =
                (g.x(i) * (a[n + nx] - a[n - nx]) - g.y(j) * (a[n + 1] - a[n - 1])) * i2h;
            lap += cplx(0.0, double(kappa_)) * a[n] - dth;
          }
          out[n] = lap;
        }
      }
    });
  }

  // F(u) = eps^2 L u + (1 - |u|^2) u at free nodes.
  void residual(const std::vector<cplx>& u, std::vector<cplx>& f) {
    apply_L(u, f);
    const double e2 = eps_ * eps_;
    for (std::size_t n : idx_) f[n] = e2 * f[n] + (1.0 - std::norm(u[n])) * u[n];
  }

  double residual_sup(const std::vector<cplx>& u) {
    residual(u, work_);
    double m = 0.0;
    for (std::size_t n : idx_) m = std::max(m, std::abs(work_[n]));
    return m;
  }

  double energy(const std::vector<cplx>& u) {
    const GridSpec& g = g_;
    const std::size_t nx = g.nx;
    const double inv_e2 = 1.0 / (eps_ * eps_);
    if (helical_) {
      const double i2h = 0.5 / g.h;
      for (std::size_t j = 0; j < g.ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) {
          const std::size_t n = g.index(i, j);
          if (!amask_[n]) continue;
          const cplx dth =
              (g.x(i) * (u[n + nx] - u[n - nx]) - g.y(j) * (u[n + 1] - u[n - 1])) * i2h;
          scratch_[n] = cplx(0.0, double(kappa_)) * u[n] - dth;
        }
    }
    const std::size_t rows = nt_ * g.ny;
    const double s = parallel_sum<double>(rows, [&](std::size_t b, std::size_t e) {
      double acc = 0.0;
      for (std::size_t row = b; row < e; ++row) {
        const std::size_t k = row / g.ny, j = row % g.ny;
        for (std::size_t i = 0; i < nx; ++i) {
          const std::size_t n = g.index(i, j, k);
          if (!active_[n]) continue;
          const cplx v = u[n];
          const double m = 1.0 - std::norm(v);
          double e_n = 0.25 * m * m * inv_e2;
          if (i + 1 < nx && active_[n + 1]) e_n += 0.5 * std::norm(u[n + 1] - v) * ih2_;
          if (j + 1 < g.ny && active_[n + nx]) e_n += 0.5 * std::norm(u[n + nx] - v) * ih2_;
          if (g.dim() == 3) e_n += 0.5 * std::norm(u[g.index(i, j, (k + 1) % g.nt)] - v) * it2_;
          if (helical_ && amask_[n]) e_n += 0.5 * std::norm(scratch_[n]);
          acc += e_n;
        }
      }
      return acc;
    });
    return s * vol_;
  }

  void scatter(const Vec& x, std::vector<cplx>& full) const {
    for (std::size_t q = 0; q < idx_.size(); ++q) full[idx_[q]] = cplx(x[2 * q], x[2 * q + 1]);
  }
  void gather(const std::vector<cplx>& full, Vec& x) const {
    x.resize(2 * idx_.size());
    for (std::size_t q = 0; q < idx_.size(); ++q) {
      x[2 * q] = full[idx_[q]].real();
      x[2 * q + 1] = full[idx_[q]].imag();
    }
  }

  // Linear part with the fixed nodes set to zero: y = (L restricted) x.
  void apply_L_free(const Vec& x, Vec& y) {
    std::fill(lin_.begin(), lin_.end(), cplx{});
    scatter(x, lin_);
    apply_L(lin_, lin_out_);
    gather(lin_out_, y);
  }

  // Approximate inverse of (alpha I - beta Lap) on the free nodes: a DST
  // solve on the full square interior in 2D, Jacobi otherwise. Both are SPD.
  void precond(const Vec& r, Vec& z, double alpha, double beta) {
    z.resize(r.size());
    if (!dst_) {
      const double d = alpha - beta * diag_L_;
      for (std::size_t q = 0; q < r.size(); ++q) z[q] = r[q] / d;
      return;
    }
    for (int part = 0; part < 2; ++part) {
      std::fill(block_.begin(), block_.end(), 0.0);
      for (std::size_t q = 0; q < idx_.size(); ++q) {
        const std::size_t n = idx_[q];
        const std::size_t i = n % g_.nx, j = n / g_.nx;
        block_[(j - 1) * n0_ + (i - 1)] = r[2 * q + std::size_t(part)];
      }
      dst_->solve(block_, alpha, beta);
      for (std::size_t q = 0; q < idx_.size(); ++q) {
        const std::size_t n = idx_[q];
        const std::size_t i = n % g_.nx, j = n / g_.nx;
        z[2 * q + std::size_t(part)] = block_[(j - 1) * n0_ + (i - 1)];
      }
    }
  }

  ComplexField to_field(const ComplexField& like, std::vector<cplx> v) const {
    return ComplexField(g_, eps_, std::move(v), like.mask());
  }

 private:
  GridSpec g_;
  double eps_;
  bool helical_;
  int kappa_;
  std::vector<std::uint8_t> active_, free_, amask_;
  std::vector<std::size_t> idx_;
  std::vector<cplx> base_, scratch_, work_;
  std::vector<cplx> lin_, lin_out_;
  std::size_t nt_ = 1;
  double ih2_ = 0, it2_ = 0, vol_ = 0, diag_L_ = 0;
  std::unique_ptr<DirichletSolver> dst_;
  std::size_t n0_ = 0, n1_ = 0;
  std::vector<double> block_;
};

SolveResult flow_impl(Problem& P, const ComplexField& like, const SolveConfig& cfg) {
  cfg.validate();
  const double eps = P.eps();
  const double e2 = eps * eps;
  std::vector<cplx> u = P.base();
  std::vector<cplx> unew = u;
  const auto& idx = P.free_nodes();
  const double dt0 = cfg.explicit_flow ? std::min(cfg.dt_factor * e2, 1.0 / P.rho())
                                       : cfg.dt_factor * e2;
  double dt = dt0;
  const double E0 = P.energy(u);
  double E = E0;
  const double slack = 1e-10 * std::max(std::abs(E0), std::numeric_limits<double>::min());

  // fixed-node contribution of L: L applied to the field with free nodes zeroed
  std::vector<cplx> fixed_only = u, Lfixed(u.size(), cplx{});
  for (std::size_t n : idx) fixed_only[n] = cplx{};
  P.apply_L(fixed_only, Lfixed);

  SolveResult res;
  std::vector<cplx> Lu(u.size(), cplx{});
  Vec b, x;
  int accepted_run = 0;
  double r = P.residual_sup(u);
  res.log.push_back({0, E, r, dt});
  int step = 0;
  while (r > cfg.residual_tol && step < cfg.max_steps) {
    ++step;
    if (cfg.explicit_flow) {
      P.apply_L(u, Lu);
      for (std::size_t n : idx)
        unew[n] = u[n] + dt * (Lu[n] + (1.0 - std::norm(u[n])) * u[n] / e2);
    } else {
      // (I - dt L_ff) x = u + dt (1-|u|^2) u / eps^2 + dt L_fixed
      b.resize(P.unknowns());
      for (std::size_t q = 0; q < idx.size(); ++q) {
        const std::size_t n = idx[q];
        const cplx rhs = u[n] + dt * ((1.0 - std::norm(u[n])) * u[n] / e2 + Lfixed[n]);
        b[2 * q] = rhs.real();
        b[2 * q + 1] = rhs.imag();
      }
      P.gather(u, x);
      Vec tmp;
      LinOp A = [&](const Vec& in, Vec& out) {
        P.apply_L_free(in, tmp);
        out.resize(in.size());
        for (std::size_t q = 0; q < in.size(); ++q) out[q] = in[q] - dt * tmp[q];
      };
      LinOp M = [&](const Vec& in, Vec& out) { P.precond(in, out, 1.0, dt); };
      // The steady residual is about (eps^2/dt) times the linear residual.
      const double bn = std::max(norm2(b), 1e-300);
      const double rtol = std::clamp(0.02 * cfg.residual_tol * dt / e2 / bn, 1e-15, 1e-6);
      const KrylovResult kr = conjugate_gradient(A, M, b, x, rtol, 2000);
      if (!kr.converged && kr.residual > 1e3 * rtol)
        throw ConvergenceError("gradient flow: linear solve did not converge (relative residual " +
                               std::to_string(kr.residual) + ")");
      P.scatter(x, unew);
    }
    const double Enew = P.energy(unew);
    if (!std::isfinite(Enew) || Enew > E + slack) {
      dt *= 0.5;
      accepted_run = 0;
      if (dt < 1e-8 * dt0)
        throw ConvergenceError("gradient flow: energy increase persists as dt underflows (step " +
                               std::to_string(step) + ")");
      unew = u;
      continue;
    }
    u.swap(unew);
    unew = u;
    E = Enew;
    r = P.residual_sup(u);
    res.log.push_back({step, E, r, dt});
    if (++accepted_run >= 10 && dt < dt0) {
      dt = std::min(dt0, 2.0 * dt);
      accepted_run = 0;
    }
  }
  res.steps = step;
  res.residual = r;
  res.converged = r <= cfg.residual_tol;
  res.field = P.to_field(like, std::move(u));
  return res;
}

SolveResult newton_impl(Problem& P, const ComplexField& like, const SolveConfig& cfg) {
  cfg.validate();
  const double e2 = P.eps() * P.eps();
  std::vector<cplx> u = P.base(), trial = u, F(u.size(), cplx{});
  const auto& idx = P.free_nodes();
  SolveResult res;
  auto fnorm = [&](const std::vector<cplx>& v, double& sup) {
    P.residual(v, F);
    double s = 0.0;
    sup = 0.0;
    for (std::size_t n : idx) {
      s += std::norm(F[n]);
      sup = std::max(sup, std::abs(F[n]));
    }
    return std::sqrt(s);
  };
  double sup = 0.0;
  double f2 = fnorm(u, sup);
  res.log.push_back({0, P.energy(u), sup, 0.0});
  int it = 0;
  while (sup > cfg.residual_tol && it < cfg.max_newton) {
    ++it;
    Vec b(P.unknowns()), x(P.unknowns(), 0.0), tmp;
    for (std::size_t q = 0; q < idx.size(); ++q) {
      b[2 * q] = -F[idx[q]].real();
      b[2 * q + 1] = -F[idx[q]].imag();
    }
    // J d = eps^2 L d + (1 - |u|^2) d - 2 Re(conj(u) d) u
    LinOp J = [&](const Vec& in, Vec& out) {
      P.apply_L_free(in, tmp);
      out.resize(in.size());
      for (std::size_t q = 0; q < idx.size(); ++q) {
        const cplx v = u[idx[q]];
        const double dr = in[2 * q], di = in[2 * q + 1];
        const double m = 1.0 - std::norm(v);
        const double rd = v.real() * dr + v.imag() * di;
        out[2 * q] = e2 * tmp[2 * q] + m * dr - 2.0 * rd * v.real();
        out[2 * q + 1] = e2 * tmp[2 * q + 1] + m * di - 2.0 * rd * v.imag();
      }
    };
    LinOp M = [&](const Vec& in, Vec& out) { P.precond(in, out, 1.0, e2); };
    const double rtol = std::clamp(0.05 * cfg.residual_tol / sup, 1e-12, 1e-2);
    const KrylovResult kr = minres(J, M, b, x, rtol, 4000);
    if (!std::isfinite(kr.residual))
      throw ConvergenceError("Newton: linear solve breakdown");
    double lam = cfg.damping;
    double sup_t = 0.0, f2_t = 0.0;
    for (;;) {
      trial = u;
      for (std::size_t q = 0; q < idx.size(); ++q)
        trial[idx[q]] += lam * cplx(x[2 * q], x[2 * q + 1]);
      f2_t = fnorm(trial, sup_t);
      if (f2_t <= (1.0 - 1e-4 * lam) * f2) break;
      if (lam <= 0x1p-20) break;
      lam *= 0.5;
    }
    if (!(f2_t < f2)) {
      if (!kr.converged)
        throw ConvergenceError("Newton: linear solve breakdown (relative residual " +
                               std::to_string(kr.residual) + ")");
      // at the roundoff floor nothing further can be gained
      if (sup <= 1e3 * std::numeric_limits<double>::epsilon()) break;
      throw ConvergenceError("Newton: residual increase after damping floor (sup " +
                             std::to_string(sup) + ")");
    }
    u.swap(trial);
    f2 = f2_t;
    sup = sup_t;
    res.log.push_back({it, P.energy(u), sup, lam});
  }
  res.steps = it;
  res.newton_iterations = it;
  res.residual = sup;
  res.converged = sup <= cfg.residual_tol;
  res.field = P.to_field(like, std::move(u));
  return res;
}

BoundaryData trace_band(const ComplexField& u, int band) {
  BoundaryData bc;
  bc.kind = u.grid().boundary();
  bc.nodes = boundary_nodes(u.grid(), band);
  for (std::size_t n : bc.nodes) bc.values.push_back(u[n]);
  return bc;
}

}  // namespace

std::vector<std::size_t> boundary_nodes(const GridSpec& g, int band) {
  g.validate();
  const auto a = g.active_mask();
  std::vector<std::size_t> out;
  const std::size_t nt = nt_of(g);
  for (std::size_t k = 0; k < nt; ++k)
    for (std::size_t j = 0; j < g.ny; ++j)
      for (std::size_t i = 0; i < g.nx; ++i) {
        const std::size_t n = g.index(i, j, k);
        if (a[n] && !stencil_active(g, a, i, j, band)) out.push_back(n);
      }
  return out;
}

BoundaryData dirichlet_degree_data(int kappa, const GridSpec& grid, Point2 center, int band) {
  BoundaryData bc;
  bc.kind = grid.boundary();
  bc.nodes = boundary_nodes(grid, band);
  bc.values.reserve(bc.nodes.size());
  const std::size_t pn = grid.plane_size();
  for (std::size_t n : bc.nodes) {
    const std::size_t p = n % pn;
    const Point2 z{grid.x(p % grid.nx) - center.x, grid.y(p / grid.nx) - center.y};
    const double r = norm(z);
    if (r < 0.5 * grid.h) throw DomainError("degree data: center lies on the boundary");
    bc.values.push_back(std::pow(cplx(z.x / r, z.y / r), kappa));
  }
  return bc;
}

BoundaryData trace_of(const ComplexField& u, int band) { return trace_band(u, band); }

SolveResult gradient_flow(const ComplexField& u0, const BoundaryData& bc, const SolveConfig& cfg) {
  Problem P(u0, bc, false, 0);
  return flow_impl(P, u0, cfg);
}

SolveResult newton_refine(const ComplexField& u, const BoundaryData& bc, const SolveConfig& cfg) {
  Problem P(u, bc, false, 0);
  return newton_impl(P, u, cfg);
}

namespace {
SolveResult relax_impl(const ComplexField& u0, const BoundaryData& bc, const SolveConfig& cfg,
                       bool helical, int kappa) {
  SolveConfig fc = cfg;
  if (cfg.newton) fc.residual_tol = std::max(cfg.residual_tol, cfg.newton_switch);
  Problem P(u0, bc, helical, kappa);
  SolveResult flow = flow_impl(P, u0, fc);
  if (!cfg.newton || flow.residual <= cfg.residual_tol) return flow;
  Problem Q(flow.field, bc, helical, kappa);
  SolveResult nr = newton_impl(Q, flow.field, cfg);
  nr.steps = flow.steps;
  std::vector<DescentEntry> log = std::move(flow.log);
  for (auto e : nr.log)
    if (e.step > 0) {
      e.step += flow.steps;
      log.push_back(e);
    }
  nr.log = std::move(log);
  return nr;
}
}  // namespace

SolveResult relax(const ComplexField& u0, const BoundaryData& bc, const SolveConfig& cfg) {
  return relax_impl(u0, bc, cfg, false, 0);
}

SolveResult helical_reduced_solve(int kappa, const ComplexField& v0, const SolveConfig& cfg) {
  if (v0.grid().dim() != 2) throw PreconditionError("helical reduction needs a 2D grid");
  return relax_impl(v0, trace_band(v0, 2), cfg, true, kappa);
}

double helical_reduced_residual(const ComplexField& v, int kappa) {
  Problem P(v, trace_band(v, 2), true, kappa);
  return P.residual_sup(v.values());
}

std::string descent_log_csv(const std::vector<DescentEntry>& log) {
  std::ostringstream os;
  os << "step,energy,residual,dt\n";
  char buf[128];
  for (const auto& e : log) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", e.step, e.energy, e.residual, e.dt);
    os << buf;
  }
  return os.str();
}

}  // namespace glv
