#include "glv/ansatz.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "glv/errors.hpp"

namespace glv {

void VortexSpec::validate() const {
  if (centers.size() != degrees.size())
    throw PreconditionError("vortex spec: centers and degrees differ in length");
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (degrees[i] == 0) throw PreconditionError("vortex spec: degrees must be nonzero");
    if (!std::isfinite(centers[i].x) || !std::isfinite(centers[i].y))
      throw PreconditionError("vortex spec: non-finite center");
    for (std::size_t j = 0; j < i; ++j)
      if (centers[i].x == centers[j].x && centers[i].y == centers[j].y)
        throw PreconditionError("vortex spec: centers must be distinct");
  }
  if (separation_exponent && !(*separation_exponent >= 0.0 && *separation_exponent < 1.0))
    throw PreconditionError("separation_exponent out of [0,1)");
}

int VortexSpec::total_degree() const {
  int s = 0;
  for (int d : degrees) s += d;
  return s;
}

VortexSpec VortexSpec::ring(const std::vector<int>& degrees, double radius, double rotation) {
  VortexSpec s;
  s.degrees = degrees;
  const std::size_t m = degrees.size();
  if (m == 1) {
    s.centers = {{0.0, 0.0}};
    return s;
  }
  for (std::size_t j = 0; j < m; ++j) {
    const double ph = rotation + 2.0 * std::numbers::pi * double(j) / double(m);
    s.centers.push_back({radius * std::cos(ph), radius * std::sin(ph)});
  }
  return s;
}

VortexSpec VortexSpec::polygon(const std::vector<int>& degrees, double eps, double sigma,
                               double rotation) {
  if (!(sigma >= 0.0 && sigma < 1.0)) throw PreconditionError("separation_exponent out of [0,1)");
  const std::size_t m = degrees.size();
  const double side = std::pow(eps, sigma);
  const double radius = m > 1 ? side / (2.0 * std::sin(std::numbers::pi / double(m))) : 0.0;
  VortexSpec s = ring(degrees, radius, rotation);
  s.separation_exponent = sigma;
  return s;
}

VortexProduct::VortexProduct(VortexSpec spec, double eps) : spec_(std::move(spec)), eps_(eps) {
  spec_.validate();
  if (!(eps > 0.0)) throw PreconditionError("epsilon must be positive");
  for (int d : spec_.degrees) prof_.push_back(profile_for(std::abs(d)));
}

FieldSample VortexProduct::sample(double x, double y) const {
  const std::size_t m = spec_.centers.size();
  // small fixed buffers; m is a handful in practice
  cplx w[16], wx[16], wy[16];
  std::vector<cplx> W, WX, WY;
  cplx *pw = w, *pwx = wx, *pwy = wy;
  if (m > 16) {
    W.resize(m);
    WX.resize(m);
    WY.resize(m);
    pw = W.data();
    pwx = WX.data();
    pwy = WY.data();
  }
  const double ie = 1.0 / eps_;
  for (std::size_t j = 0; j < m; ++j) {
    const int k = std::abs(spec_.degrees[j]);
    const double dx = x - spec_.centers[j].x, dy = y - spec_.centers[j].y;
    const double r = std::hypot(dx, dy);
    const double rho = r * ie;
    cplx v, vx, vy;
    if (rho < 1e-6) {
      // w ~ a Z^k near the centre
      const cplx Z(dx * ie, dy * ie);
      cplx zk1(1.0, 0.0);
      for (int q = 1; q < k; ++q) zk1 *= Z;
      const double a = prof_[j]->slope();
      v = a * zk1 * Z;
      vx = a * double(k) * zk1 * ie;
      vy = cplx(0.0, 1.0) * vx;
    } else {
      double f, df;
      prof_[j]->eval(rho, f, df);
      const double c = dx / r, s = dy / r;
      const cplx e1(c, s);
      cplx ek(1.0, 0.0);
      for (int q = 0; q < k; ++q) ek *= e1;
      const double fr = df * ie;   // d/dr of f(r/eps)
      const double ft = double(k) * f / r;  // angular part
      v = f * ek;
      vx = ek * cplx(fr * c, -ft * s);
      vy = ek * cplx(fr * s, ft * c);
    }
    if (spec_.degrees[j] < 0) {
      v = std::conj(v);
      vx = std::conj(vx);
      vy = std::conj(vy);
    }
    pw[j] = v;
    pwx[j] = vx;
    pwy[j] = vy;
  }
  FieldSample out{cplx(1.0, 0.0), cplx{}, cplx{}};
  // du = sum_j dw_j prod_{k != j} w_k, built from prefix and suffix products
  cplx prefix(1.0, 0.0);
  cplx suffix_buf[17];
  std::vector<cplx> SB;
  cplx* suffix = suffix_buf;
  if (m > 16) {
    SB.resize(m + 1);
    suffix = SB.data();
  }
  suffix[m] = cplx(1.0, 0.0);
  for (std::size_t j = m; j-- > 0;) suffix[j] = suffix[j + 1] * pw[j];
  for (std::size_t j = 0; j < m; ++j) {
    const cplx others = prefix * suffix[j + 1];
    out.ux += pwx[j] * others;
    out.uy += pwy[j] * others;
    prefix *= pw[j];
  }
  out.u = prefix;
  return out;
}

ComplexField build_vortex_product(const VortexSpec& spec, double eps, const GridSpec& grid) {
  grid.validate();
  if (grid.dim() != 2) throw PreconditionError("vortex product needs a planar grid");
  VortexProduct prod(spec, eps);
  for (const Point2& p : spec.centers) {
    double dist = std::min({p.x - grid.origin_x, grid.x_max() - p.x, p.y - grid.origin_y,
                            grid.y_max() - p.y});
    if (grid.has_disk_mask()) dist = std::min(dist, grid.disk_radius - norm(p - grid.disk_center));
    if (dist < 10.0 * eps) {
      std::ostringstream os;
      os << "vortex center (" << p.x << ", " << p.y << ") within 10 eps of the domain boundary";
      throw DomainError(os.str());
    }
  }
  auto mask = grid.active_mask();
  std::vector<cplx> v(grid.size(), cplx{});
  parallel_for(grid.ny, [&](std::size_t b, std::size_t e) {
    for (std::size_t j = b; j < e; ++j)
      for (std::size_t i = 0; i < grid.nx; ++i) {
        const std::size_t n = grid.index(i, j);
        if (mask[n]) v[n] = prod.value(grid.x(i), grid.y(j));
      }
  });
  return ComplexField(grid, eps, std::move(v), std::move(mask));
}

ComplexField blow_down(const ComplexField& v, double tau, const GridSpec& target) {
  if (!(tau >= 0.0 && tau < 1.0)) throw PreconditionError("blow-down exponent must lie in [0,1)");
  const double eps = v.epsilon();
  const double eps2 = std::pow(eps, 1.0 + tau);
  if (tau == 0.0 && target == v.grid()) return v;
  if (v.grid().dim() != 2 || target.dim() != 2)
    throw PreconditionError("blow-down works on planar fields");
  const double s = std::pow(eps, tau);
  auto mask = target.active_mask();
  std::vector<cplx> out(target.size(), cplx{});
  for (std::size_t j = 0; j < target.ny; ++j)
    for (std::size_t i = 0; i < target.nx; ++i) {
      const std::size_t n = target.index(i, j);
      if (!mask[n]) continue;
      try {
        out[n] = v.interpolate_cubic(target.x(i) / s, target.y(j) / s);
      } catch (const DomainError&) {
        throw DomainError("blow-down footprint exceeds the source field");
      }
    }
  return ComplexField(target, eps2, std::move(out), std::move(mask));
}

}  // namespace glv
