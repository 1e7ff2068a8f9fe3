#include "glv/hodge.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "glv/errors.hpp"
#include "glv/operators.hpp"
#include "glv/parallel.hpp"
#include "glv/poisson.hpp"

namespace glv {

namespace {
double quintic(double s) { return s * s * s * (10.0 - 15.0 * s + 6.0 * s * s); }
}  // namespace

double Cutoff::operator()(double x, double y) const {
  const double r = std::hypot(x - center.x, y - center.y);
  if (r <= r_one) return 1.0;
  if (r >= r_zero) return 0.0;
  return 1.0 - quintic((r - r_one) / (r_zero - r_one));
}

double hodge_chi(double t) {
  if (t <= 0.25) return 1.0;
  if (t >= 0.5) return 1.0 / t;
  const double q = quintic((t - 0.25) / 0.25);
  return (1.0 - q) + q / t;
}

namespace {

// ju at a node from central differences (one-sided at the grid edge).
std::array<double, 2> nodal_ju(const ComplexField& u, std::size_t i, std::size_t j) {
  const auto d = node_gradient(u, i, j);
  const cplx v = u.at(i, j);
  return {v.real() * d[0].imag() - v.imag() * d[0].real(),
          v.real() * d[1].imag() - v.imag() * d[1].real()};
}

// jv on the edge from node a to node b (step h along axis `axis`). Where
// both ends have |u| >= 1/2, jv is the phase gradient and the edge value is
// the phase increment over h, so that d jv vanishes identically away from
// the cores. Elsewhere the edge takes the mean of the nodal chi^2 ju.
double edge_jv(const ComplexField& u, std::size_t ia, std::size_t ja, std::size_t ib,
               std::size_t jb, int axis) {
  const cplx a = u.at(ia, ja), b = u.at(ib, jb);
  const double h = u.grid().h;
  if (std::abs(a) >= 0.5 && std::abs(b) >= 0.5) return std::arg(b * std::conj(a)) / h;
  const double ca = hodge_chi(std::abs(a)), cb = hodge_chi(std::abs(b));
  const double ja_ = nodal_ju(u, ia, ja)[std::size_t(axis)];
  const double jb_ = nodal_ju(u, ib, jb)[std::size_t(axis)];
  return 0.5 * (ca * ca * ja_ + cb * cb * jb_);
}

double bilinear(const GridSpec& g, const std::vector<double>& v, double x, double y) {
  const double fx = (x - g.origin_x) / g.h, fy = (y - g.origin_y) / g.h;
  if (!(fx >= 0.0 && fy >= 0.0 && fx <= double(g.nx - 1) && fy <= double(g.ny - 1)))
    throw DomainError("point outside the potential grid");
  const std::size_t i = std::min<std::size_t>(std::size_t(fx), g.nx - 2);
  const std::size_t j = std::min<std::size_t>(std::size_t(fy), g.ny - 2);
  const double a = fx - double(i), b = fy - double(j);
  return (1 - a) * (1 - b) * v[g.index(i, j)] + a * (1 - b) * v[g.index(i + 1, j)] +
         (1 - a) * b * v[g.index(i, j + 1)] + a * b * v[g.index(i + 1, j + 1)];
}

}  // namespace

HodgeParts hodge_decompose(const ComplexField& u, const Cutoff& cutoff) {
  const GridSpec& g = u.grid();
  if (g.dim() != 2) throw PreconditionError("hodge_decompose needs a 2D field (take a slice)");
  for (auto m : u.mask())
    if (!m) throw PreconditionError("hodge_decompose needs a fully active rectangle");
  const std::size_t nx = g.nx, ny = g.ny, N = g.size();
  const double h = g.h;

  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i)
      if (std::abs(u.at(i, j)) <= 0.5 && cutoff(g.x(i), g.y(j)) < 1.0)
        throw DomainError("vorticity set reaches the cutoff ramp");

  HodgeParts P;
  P.grid = g;
  P.cutoff = cutoff;
  P.epsilon = u.epsilon();
  P.dual = GridSpec::square(2, 1.0);
  P.dual.nx = nx - 1;
  P.dual.ny = ny - 1;
  P.dual.h = h;
  P.dual.origin_x = g.origin_x + 0.5 * h;
  P.dual.origin_y = g.origin_y + 0.5 * h;
  P.dual.topology = Topology::rectangle;
  P.dual.validate();
  const GridSpec& dg = P.dual;

  // edge values
  std::vector<double> jx(N, 0.0), jy(N, 0.0);
  std::vector<std::uint8_t> emask(N, 0);
  parallel_for(ny, [&](std::size_t b, std::size_t e) {
    for (std::size_t j = b; j < e; ++j)
      for (std::size_t i = 0; i < nx; ++i) {
        const std::size_t n = g.index(i, j);
        if (i + 1 < nx) jx[n] = edge_jv(u, i, j, i + 1, j, 0);
        if (j + 1 < ny) jy[n] = edge_jv(u, i, j, i, j + 1, 1);
      }
  });

  // phi djv on cells
  const std::size_t cx = nx - 1, cy = ny - 1, C = cx * cy;
  std::vector<double> src(C, 0.0);
  for (std::size_t j = 0; j < cy; ++j)
    for (std::size_t i = 0; i < cx; ++i) {
      const double curl =
          (jx[g.index(i, j)] + jy[g.index(i + 1, j)] - jx[g.index(i, j + 1)] - jy[g.index(i, j)]) /
          h;
      const double s = cutoff(dg.x(i), dg.y(j)) * curl;
      src[dg.index(i, j)] = s;
    }

  // multipole moments of the source about the cutoff centre
  double rmin = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < cy; ++j)
    for (std::size_t i = 0; i < cx; ++i)
      if (i == 0 || j == 0 || i + 1 == cx || j + 1 == cy)
        rmin = std::min(rmin, std::hypot(dg.x(i) - cutoff.center.x, dg.y(j) - cutoff.center.y));
  const double ratio = cutoff.r_zero / rmin;
  if (ratio > 0.97) throw DomainError("grid too small for the cutoff support");
  const int K = std::min(600, int(std::ceil(std::log(1e-13) / std::log(ratio))));
  std::vector<cplx> ak(std::size_t(K) + 1, cplx{});
  const double h2 = h * h;
  const double skip = 1e-13 / h2;
  for (std::size_t j = 0; j < cy; ++j)
    for (std::size_t i = 0; i < cx; ++i) {
      const double s = src[dg.index(i, j)];
      if (std::abs(s) <= skip) continue;
      const cplx w(dg.x(i) - cutoff.center.x, dg.y(j) - cutoff.center.y);
      cplx p = s * h2;
      for (int k = 0; k <= K; ++k) {
        ak[std::size_t(k)] += p;
        p *= w;
      }
    }
  P.source_mass = ak[0].real();
  auto far = [&](double x, double y) {
    const cplx w(x - cutoff.center.x, y - cutoff.center.y);
    const cplx iw = 1.0 / w;
    double v = -ak[0].real() * std::log(std::abs(w));
    cplx p = iw;
    for (int k = 1; k <= K; ++k) {
      v += (ak[std::size_t(k)] * p).real() / k;
      p *= iw;
    }
    return v / (2.0 * std::numbers::pi);
  };

  // beta: -Lap beta = src on interior cells, ring cells from the expansion
  std::vector<double> beta(C, 0.0);
  for (std::size_t j = 0; j < cy; ++j)
    for (std::size_t i = 0; i < cx; ++i)
      if (i == 0 || j == 0 || i + 1 == cx || j + 1 == cy)
        beta[dg.index(i, j)] = far(dg.x(i), dg.y(j));
  {
    const std::size_t bx = cx - 2, by = cy - 2;
    std::vector<double> rhs(bx * by);
    const double ih2 = 1.0 / h2;
    for (std::size_t j = 1; j + 1 < cy; ++j)
      for (std::size_t i = 1; i + 1 < cx; ++i) {
        double r = src[dg.index(i, j)];
        if (i == 1) r += beta[dg.index(0, j)] * ih2;
        if (i + 2 == cx) r += beta[dg.index(cx - 1, j)] * ih2;
        if (j == 1) r += beta[dg.index(i, 0)] * ih2;
        if (j + 2 == cy) r += beta[dg.index(i, cy - 1)] * ih2;
        rhs[(j - 1) * bx + (i - 1)] = r;
      }
    DirichletSolver S(bx, by, h);
    S.solve(rhs, 0.0, 1.0);
    for (std::size_t j = 1; j + 1 < cy; ++j)
      for (std::size_t i = 1; i + 1 < cx; ++i) beta[dg.index(i, j)] = rhs[(j - 1) * bx + (i - 1)];
  }

  // psi: Lap psi = div jv on interior nodes, psi = 0 on the boundary
  std::vector<double> psi(N, 0.0);
  auto divj = [&](std::size_t i, std::size_t j) {
    const std::size_t n = g.index(i, j);
    return (jx[n] - jx[n - 1] + jy[n] - jy[n - nx]) / h;
  };
  {
    const std::size_t bx = nx - 2, by = ny - 2;
    std::vector<double> rhs(bx * by);
    for (std::size_t j = 1; j + 1 < ny; ++j)
      for (std::size_t i = 1; i + 1 < nx; ++i) rhs[(j - 1) * bx + (i - 1)] = -divj(i, j);
    DirichletSolver S(bx, by, h);
    S.solve(rhs, 0.0, 1.0);
    for (std::size_t j = 1; j + 1 < ny; ++j)
      for (std::size_t i = 1; i + 1 < nx; ++i) psi[g.index(i, j)] = rhs[(j - 1) * bx + (i - 1)];
  }

  // solver residuals
  double res = 0.0;
  for (std::size_t j = 1; j + 1 < ny; ++j)
    for (std::size_t i = 1; i + 1 < nx; ++i) {
      const std::size_t n = g.index(i, j);
      const double lap = (psi[n - 1] + psi[n + 1] + psi[n - nx] + psi[n + nx] - 4 * psi[n]) / h2;
      res = std::max(res, std::abs(lap - divj(i, j)));
    }
  for (std::size_t j = 1; j + 1 < cy; ++j)
    for (std::size_t i = 1; i + 1 < cx; ++i) {
      const std::size_t c = dg.index(i, j);
      const double lap =
          (beta[c - 1] + beta[c + 1] + beta[c - cx] + beta[c + cx] - 4 * beta[c]) / h2;
      res = std::max(res, std::abs(-lap - src[c]));
    }
  P.solver_residual = res;

  // remainder h on interior edges
  std::vector<double> hx(N, 0.0), hy(N, 0.0);
  double recon = 0.0;
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t n = g.index(i, j);
      if (i + 1 < nx && j > 0 && j + 1 < ny) {
        const double dpsi = (psi[n + 1] - psi[n]) / h;
        const double dsb = (beta[dg.index(i, j)] - beta[dg.index(i, j - 1)]) / h;
        hx[n] = jx[n] - dpsi - dsb;
        emask[n] |= 1;
        recon = std::max(recon, std::abs(jx[n] - dpsi - dsb - hx[n]));
      }
      if (j + 1 < ny && i > 0 && i + 1 < nx) {
        const double dpsi = (psi[n + nx] - psi[n]) / h;
        const double dsb = -(beta[dg.index(i, j)] - beta[dg.index(i - 1, j)]) / h;
        hy[n] = jy[n] - dpsi - dsb;
        emask[n] |= 2;
        recon = std::max(recon, std::abs(jy[n] - dpsi - dsb - hy[n]));
      }
    }
  P.reconstruction = recon;

  // discrete Hodge Laplacian of h on edges well inside {phi = 1}
  auto divh = [&](std::size_t i, std::size_t j) {
    const std::size_t n = g.index(i, j);
    return (hx[n] - hx[n - 1] + hy[n] - hy[n - nx]) / h;
  };
  auto curlh = [&](std::size_t i, std::size_t j) {
    return (hx[g.index(i, j)] + hy[g.index(i + 1, j)] - hx[g.index(i, j + 1)] -
            hy[g.index(i, j)]) /
           h;
  };
  const double r_in = cutoff.r_one - 3.0 * h;
  auto deep = [&](double x, double y) {
    return std::hypot(x - cutoff.center.x, y - cutoff.center.y) < r_in;
  };
  double defect = 0.0;
  for (std::size_t j = 2; j + 2 < ny; ++j)
    for (std::size_t i = 2; i + 2 < nx; ++i) {
      if (!deep(g.x(i), g.y(j))) continue;
      const double lx = (divh(i + 1, j) - divh(i, j)) / h - (curlh(i, j) - curlh(i, j - 1)) / h;
      const double ly = (divh(i, j + 1) - divh(i, j)) / h + (curlh(i, j) - curlh(i - 1, j)) / h;
      defect = std::max({defect, std::abs(lx), std::abs(ly)});
    }
  P.harmonic_defect = defect;
  P.harmonic_scale = 2.0 / h * res;

  std::vector<std::uint8_t> nmask(N, 1), cmask(C, 1);
  P.psi = ScalarField(g, std::move(psi), nmask);
  P.beta = ScalarField(dg, std::move(beta), std::move(cmask));
  P.jv = OneFormField(g, {std::move(jx), std::move(jy)}, emask);
  P.h = OneFormField(g, {std::move(hx), std::move(hy)}, std::move(emask));
  return P;
}

std::vector<double> beta_at(const HodgeParts& parts, const std::vector<Point2>& points) {
  std::vector<double> out;
  out.reserve(points.size());
  for (const Point2& p : points) {
    if (parts.cutoff(p.x, p.y) < 1.0) throw DomainError("beta_at: point outside {phi = 1}");
    out.push_back(bilinear(parts.dual, parts.beta.values(), p.x, p.y));
  }
  return out;
}

std::vector<double> beta_prediction(const std::vector<VortexCluster>& clusters, double eps) {
  const double L = std::abs(std::log(eps));
  std::vector<double> out;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    double b = clusters[i].degree * L;
    for (std::size_t j = 0; j < clusters.size(); ++j)
      if (j != i)
        b += clusters[j].degree * std::log(1.0 / norm(clusters[i].center - clusters[j].center));
    out.push_back(b);
  }
  return out;
}

double coex_defect(const ComplexField& u, const HodgeParts& parts) {
  const GridSpec& g = parts.grid;
  if (!(u.grid() == g)) throw PreconditionError("coex_defect: field and parts differ in grid");
  const GridSpec& dg = parts.dual;
  const auto& beta = parts.beta.values();
  const double h = g.h;
  const double R = parts.cutoff.r_one;
  const Point2 c = parts.cutoff.center;
  double s = parallel_sum<double>(g.ny, [&](std::size_t b, std::size_t e) {
    double acc = 0.0;
    for (std::size_t j = std::max<std::size_t>(b, 1); j < e && j + 1 < g.ny; ++j)
      for (std::size_t i = 1; i + 1 < g.nx; ++i) {
        const auto ja = nodal_ju(u, i, j);
        // x-edge (i, j) -> (i+1, j)
        if (i + 2 < g.nx && std::hypot(g.x(i) + 0.5 * h - c.x, g.y(j) - c.y) < R) {
          const double ju = 0.5 * (ja[0] + nodal_ju(u, i + 1, j)[0]);
          const double db = (beta[dg.index(i, j)] - beta[dg.index(i, j - 1)]) / h;
          acc += (ju - db) * (ju - db);
        }
        // y-edge (i, j) -> (i, j+1)
        if (j + 2 < g.ny && std::hypot(g.x(i) - c.x, g.y(j) + 0.5 * h - c.y) < R) {
          const double ju = 0.5 * (ja[1] + nodal_ju(u, i, j + 1)[1]);
          const double db = -(beta[dg.index(i, j)] - beta[dg.index(i - 1, j)]) / h;
          acc += (ju - db) * (ju - db);
        }
      }
    return acc;
  });
  return s * h * h / std::abs(std::log(parts.epsilon));
}

double theta_via_beta(const HodgeParts& parts, const std::vector<VortexCluster>& clusters) {
  double s = 0.0;
  for (const auto& c : clusters) {
    if (c.touches_boundary) continue;
    s += beta_at(parts, {c.center})[0] * c.degree;
  }
  return s / std::abs(std::log(parts.epsilon));
}

std::string beta_line_profile(const HodgeParts& parts, Point2 center,
                              const std::vector<double>& radii, double angle) {
  std::ostringstream os;
  os << "r,log_r,beta\n";
  char buf[128];
  for (double r : radii) {
    const Point2 p{center.x + r * std::cos(angle), center.y + r * std::sin(angle)};
    const double b = beta_at(parts, {p})[0];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", r, std::log(r), b);
    os << buf;
  }
  return os.str();
}

}  // namespace glv
