#include "glv/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "glv/errors.hpp"
#include "glv/parallel.hpp"

namespace glv {

double dot(const Vec& a, const Vec& b) {
  return parallel_sum<double>(a.size(), [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
    return s;
  });
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

double norm_inf(const Vec& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

KrylovResult conjugate_gradient(const LinOp& A, const LinOp& precond, const Vec& b, Vec& x,
                                double rtol, int max_iter) {
  const std::size_t n = b.size();
  if (x.size() != n) x.assign(n, 0.0);
  Vec r(n), z(n), p(n), Ap(n);
  A(x, Ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - Ap[i];
  const double bn = std::max(norm2(b), std::numeric_limits<double>::min());
  KrylovResult res;
  double rn = norm2(r);
  if (rn <= rtol * bn) {
    res.converged = true;
    res.residual = rn / bn;
    return res;
  }
  precond(r, z);
  p = z;
  double rz = dot(r, z);
  for (int it = 1; it <= max_iter; ++it) {
    A(p, Ap);
    const double pAp = dot(p, Ap);
    if (!(pAp > 0.0)) throw ConvergenceError("conjugate gradient breakdown: operator not positive");
    const double alpha = rz / pAp;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    rn = norm2(r);
    res.iterations = it;
    res.residual = rn / bn;
    if (rn <= rtol * bn) {
      res.converged = true;
      return res;
    }
    precond(r, z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return res;
}

KrylovResult minres(const LinOp& A, const LinOp& precond, const Vec& b, Vec& x, double rtol,
                    int max_iter) {
  const std::size_t n = b.size();
  if (x.size() != n) x.assign(n, 0.0);
  Vec r1(n), r2(n), y(n), v(n), w(n, 0.0), w1(n), w2(n, 0.0);
  A(x, y);
  for (std::size_t i = 0; i < n; ++i) r1[i] = b[i] - y[i];
  precond(r1, y);
  double beta1 = dot(r1, y);
  if (beta1 < 0.0) throw ConvergenceError("MINRES: preconditioner is not positive definite");
  beta1 = std::sqrt(beta1);
  KrylovResult res;
  if (beta1 == 0.0) {
    res.converged = true;
    return res;
  }
  r2 = r1;
  double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1;
  double cs = -1.0, sn = 0.0;
  const double tiny = std::numeric_limits<double>::epsilon();
  for (int it = 1; it <= max_iter; ++it) {
    const double s = 1.0 / beta;
    for (std::size_t i = 0; i < n; ++i) v[i] = s * y[i];
    A(v, y);
    if (it >= 2)
      for (std::size_t i = 0; i < n; ++i) y[i] -= (beta / oldb) * r1[i];
    const double alfa = dot(v, y);
    for (std::size_t i = 0; i < n; ++i) y[i] -= (alfa / beta) * r2[i];
    std::swap(r1, r2);
    r2 = y;
    precond(r2, y);
    oldb = beta;
    beta = dot(r2, y);
    if (beta < 0.0) throw ConvergenceError("MINRES: preconditioner is not positive definite");
    beta = std::sqrt(beta);
    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    const double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    double gamma = std::hypot(gbar, beta);
    gamma = std::max(gamma, tiny);
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;
    const double denom = 1.0 / gamma;
    std::swap(w1, w2);  // w1 <- old w2
    std::swap(w2, w);   // w2 <- old w
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = (v[i] - oldeps * w1[i] - delta * w2[i]) * denom;
      x[i] += phi * w[i];
    }
    res.iterations = it;
    res.residual = phibar / beta1;
    if (phibar <= rtol * beta1) {
      res.converged = true;
      return res;
    }
    if (beta == 0.0) {
      res.converged = true;
      return res;
    }
  }
  return res;
}

}  // namespace glv
