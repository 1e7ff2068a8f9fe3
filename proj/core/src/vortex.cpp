#include "glv/vortex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "glv/errors.hpp"
#include "glv/operators.hpp"
#include "glv/quadrature.hpp"

namespace glv {

std::vector<std::uint8_t> vorticity_mask(const ComplexField& u, double beta, std::size_t k) {
  const GridSpec& g = u.grid();
  std::vector<std::uint8_t> m(g.plane_size(), 0);
  const std::size_t off = k * g.plane_size();
  for (std::size_t p = 0; p < g.plane_size(); ++p)
    m[p] = u.active(off + p) && std::abs(u[off + p]) <= beta;
  return m;
}

int loop_degree(const ComplexField& u, const Circle& loop, std::size_t k) {
  if (loop.samples < 64) throw PreconditionError("degree loop needs at least 64 samples");
  if (!(loop.radius > 0.0)) throw PreconditionError("degree loop radius must be positive");
  const int M = loop.samples;
  cplx first{}, prev{};
  double total = 0.0;
  for (int q = 0; q <= M; ++q) {
    cplx v;
    if (q == M) {
      v = first;
    } else {
      const double ph = 2.0 * std::numbers::pi * q / M;
      const double x = loop.center.x + loop.radius * std::cos(ph);
      const double y = loop.center.y + loop.radius * std::sin(ph);
      v = u.interpolate(x, y, k);
      if (std::abs(v) < 1e-9) {
        std::ostringstream os;
        os << "degree undefined: |u| vanishes on the loop at (" << x << ", " << y << ")";
        throw DegreeUndefinedError(os.str(), x, y);
      }
    }
    if (q == 0) {
      first = prev = v;
      continue;
    }
    double d = std::arg(v * std::conj(prev));
    if (d <= -std::numbers::pi) d = std::numbers::pi;
    total += d;
    prev = v;
  }
  return int(std::lround(total / (2.0 * std::numbers::pi)));
}

namespace {

struct Component {
  std::vector<std::size_t> nodes;  // plane indices
  double mass = 0.0;
  Point2 center{};
  double circum = 0.0;
  bool edge = false;
};

struct Group {
  double mass = 0.0;
  Point2 center{};
  double circum = 0.0;
  std::size_t comps = 0;
  bool edge = false;
};

Group merge(const Group& a, const Group& b) {
  Group m;
  m.mass = a.mass + b.mass;
  const double wa = m.mass > 0 ? a.mass / m.mass : 0.5;
  m.center = wa * a.center + (1.0 - wa) * b.center;
  m.circum = std::max(norm(a.center - m.center) + a.circum, norm(b.center - m.center) + b.circum);
  m.comps = a.comps + b.comps;
  m.edge = a.edge || b.edge;
  return m;
}

}  // namespace

std::vector<VortexCluster> detect_clusters(const ComplexField& u, const ClusterOptions& opt) {
  if (!(opt.delta > 0.0 && opt.delta <= 0.5)) throw PreconditionError("delta out of (0, 1/2]");
  const GridSpec& g = u.grid();
  const GridSpec pg = g.plane();
  const std::size_t k = opt.slice;
  if (k >= (g.dim() == 3 ? g.nt : 1)) throw PreconditionError("slice index out of range");
  const std::size_t off = k * g.plane_size();
  const double e2 = u.epsilon() * u.epsilon();
  const double h2 = g.h * g.h;
  const double level = 1.0 - opt.delta;
  auto inside = [&](std::size_t p) { return u.active(off + p) && std::abs(u[off + p]) < level; };
  auto on_edge = [&](std::size_t i, std::size_t j) {
    if (i == 0 || j == 0 || i + 1 == g.nx || j + 1 == g.ny) return true;
    const std::size_t p = g.index(i, j);
    return !(u.active(off + p - 1) && u.active(off + p + 1) && u.active(off + p - g.nx) &&
             u.active(off + p + g.nx));
  };
  auto w2 = [&](std::size_t p) {
    const double m = 1.0 - std::norm(u[off + p]);
    return m * m / (2.0 * e2);
  };

  // connected components, 4-neighbour
  std::vector<std::int32_t> label(g.plane_size(), -1);
  std::vector<Component> comps;
  std::vector<std::size_t> stack;
  for (std::size_t p0 = 0; p0 < g.plane_size(); ++p0) {
    if (label[p0] >= 0 || !inside(p0)) continue;
    Component c;
    const auto id = std::int32_t(comps.size());
    label[p0] = id;
    stack.assign(1, p0);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      c.nodes.push_back(p);
      const std::size_t i = p % g.nx, j = p / g.nx;
      if (on_edge(i, j)) c.edge = true;
      auto visit = [&](std::size_t q) {
        if (label[q] < 0 && inside(q)) {
          label[q] = id;
          stack.push_back(q);
        }
      };
      if (i > 0) visit(p - 1);
      if (i + 1 < g.nx) visit(p + 1);
      if (j > 0) visit(p - g.nx);
      if (j + 1 < g.ny) visit(p + g.nx);
    }
    double sx = 0, sy = 0, sw = 0;
    for (std::size_t p : c.nodes) {
      const double w = w2(p);
      sx += w * pg.x(p % g.nx);
      sy += w * pg.y(p / g.nx);
      sw += w;
    }
    c.mass = sw * h2;
    c.center = {sx / sw, sy / sw};
    for (std::size_t p : c.nodes)
      c.circum = std::max(c.circum, norm(Point2{pg.x(p % g.nx), pg.y(p / g.nx)} - c.center));
    c.circum += g.h;
    comps.push_back(std::move(c));
  }

  // Vitali-style greedy merge by decreasing mass
  std::vector<std::size_t> order(comps.size());
  for (std::size_t q = 0; q < order.size(); ++q) order[q] = q;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return comps[a].mass > comps[b].mass; });
  std::vector<std::uint8_t> used(comps.size(), 0);
  std::vector<Group> groups;
  for (std::size_t a : order) {
    if (used[a]) continue;
    used[a] = 1;
    const Component& A = comps[a];
    Group grp{A.mass, A.center, A.circum, 1, A.edge};
    const double reach = opt.merge_factor * A.circum;
    for (std::size_t b : order) {
      if (used[b]) continue;
      const Component& B = comps[b];
      if (norm(B.center - A.center) - B.circum <= reach) {
        used[b] = 1;
        grp = merge(grp, Group{B.mass, B.center, B.circum, 1, B.edge});
      }
    }
    groups.push_back(grp);
  }
  // disks of radius disk_factor * circumradius, merged until disjoint
  for (bool again = true; again;) {
    again = false;
    for (std::size_t a = 0; a < groups.size() && !again; ++a)
      for (std::size_t b = a + 1; b < groups.size() && !again; ++b)
        if (norm(groups[a].center - groups[b].center) <
            opt.disk_factor * (groups[a].circum + groups[b].circum)) {
          groups[a] = merge(groups[a], groups[b]);
          groups.erase(groups.begin() + std::ptrdiff_t(b));
          again = true;
        }
  }

  std::vector<double> w2n(g.plane_size(), 0.0);
  for (std::size_t p = 0; p < g.plane_size(); ++p)
    if (u.active(off + p)) w2n[p] = w2(p);

  std::vector<VortexCluster> out;
  for (const Group& grp : groups) {
    VortexCluster c;
    c.center = grp.center;
    c.radius = opt.disk_factor * grp.circum;
    c.components = grp.comps;
    c.touches_boundary = grp.edge;
    RegionWeights w(pg, Region::ball(c.center, c.radius));
    try {
      w.check_inside();
    } catch (const DomainError&) {
      c.touches_boundary = true;
    }
    double mass = 0.0;
    for (std::size_t j = w.row_begin(); j < w.row_end(); ++j)
      for (std::size_t i = w.col_begin(); i < w.col_end(); ++i) {
        const double wt = w(i, j);
        if (wt > 0.0) mass += wt * w2n[g.index(i, j)];
      }
    c.potential_mass = mass * h2;
    if (!c.touches_boundary) {
      try {
        c.degree = loop_degree(u, Circle{c.center, c.radius, 128}, k);
      } catch (const DomainError&) {
        c.touches_boundary = true;
      }
    }
    out.push_back(c);
  }
  return out;
}

std::string clusters_csv(const std::vector<VortexCluster>& cs) {
  std::ostringstream os;
  os << "x,y,radius,degree,potential_mass,components,touches_boundary\n";
  char buf[256];
  for (const auto& c : cs) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d,%.17g,%zu,%d\n", c.center.x, c.center.y,
                  c.radius, c.degree, c.potential_mass, c.components, int(c.touches_boundary));
    os << buf;
  }
  return os.str();
}

ClearingOutReport clearing_out_audit(const ComplexField& u, Point2 x, double r, double eta) {
  const double eps = u.epsilon();
  if (r < eps) throw PreconditionError("clearing-out audit needs r >= eps");
  const int n = u.grid().dim();
  ClearingOutReport rep;
  rep.energy = ball_energy_profile(u, x, {r})[0].energy;
  rep.threshold = eta * std::pow(r, double(n - 2)) * std::log(r / eps);
  rep.modulus = std::abs(u.interpolate(x.x, x.y));
  rep.premise = rep.energy < rep.threshold;
  rep.holds = !rep.premise || rep.modulus > 0.5;
  return rep;
}

PotentialDegreeReport potential_degree_audit(const std::vector<VortexCluster>& clusters,
                                             double delta) {
  PotentialDegreeReport rep;
  int sum = 0;
  for (const auto& c : clusters) {
    if (c.touches_boundary) continue;
    PotentialDegreeReport::Row row;
    row.degree = c.degree;
    row.mass = c.potential_mass;
    row.threshold = 0.5 * std::numbers::pi * std::abs(c.degree) * (1.0 - 5.0 * delta);
    row.pass = row.mass >= row.threshold;
    rep.pass = rep.pass && row.pass;
    rep.min_mass = std::min(rep.min_mass, row.mass);
    rep.abs_degree_sum += std::abs(c.degree);
    sum += c.degree;
    rep.rows.push_back(row);
  }
  rep.degree_sum_sq2 = 2 * sum * sum;
  return rep;
}

PointwiseReport pointwise_bounds_audit(const ComplexField& u, const PointwiseCeilings& ceil) {
  const GridSpec& g = u.grid();
  const double eps = u.epsilon(), e2 = eps * eps;
  const auto inner = interior_mask(g, u.mask());
  PointwiseReport rep;
  rep.c1 = -std::numeric_limits<double>::infinity();
  rep.c3 = -std::numeric_limits<double>::infinity();
  double gmax = 0.0;
  const std::size_t nt = g.dim() == 3 ? g.nt : 1;
  for (std::size_t k = 0; k < nt; ++k)
    for (std::size_t j = 0; j < g.ny; ++j)
      for (std::size_t i = 0; i < g.nx; ++i) {
        const std::size_t n = g.index(i, j, k);
        if (!u.active(n)) continue;
        const double m = std::abs(u[n]);
        rep.c1 = std::max(rep.c1, (m - 1.0) / e2);
        if (!inner[n]) continue;
        const auto d = node_gradient(u, i, j, k);
        double du2 = 0.0;
        for (int a = 0; a < g.dim(); ++a) du2 += std::norm(d[std::size_t(a)]);
        gmax = std::max(gmax, du2);
        rep.c3 = std::max(rep.c3, du2 - (1.0 - m * m) / e2);
      }
  rep.c2 = eps * std::sqrt(gmax);
  rep.finite = std::isfinite(rep.c1) && std::isfinite(rep.c2) && std::isfinite(rep.c3);
  rep.pass = rep.finite && rep.c1 <= ceil.c1 && rep.c2 <= ceil.c2;
  return rep;
}

}  // namespace glv
