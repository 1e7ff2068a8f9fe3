#include "glv/profile.hpp"

#include <algorithm>
#include <array>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

#include "glv/errors.hpp"

namespace glv {

namespace {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 2>;

constexpr double kSplitTol = 1e-10;  // trajectories agree to this inside the shooting guess

enum class Fate { over, under, reached };

struct Trajectory {
  Fate fate = Fate::reached;
  double r_event = 0.0;
  std::vector<double> f, df;  // on the mesh, up to the event
};

void series_start(int k, double a, double r, double& f, double& df) {
  const double c = 1.0 / (4.0 * (k + 1));
  const double rk = std::pow(r, k);
  f = a * rk * (1.0 - c * r * r);
  df = a * (k * rk / r - c * (k + 2) * rk * r);
}

Trajectory shoot(int k, double a, double r_max, bool keep) {
  const double k2 = double(k) * k;
  auto rhs = [k2](const State& y, State& dy, double r) {
    dy[0] = y[1];
    dy[1] = -y[1] / r + k2 * y[0] / (r * r) - (1.0 - y[0] * y[0]) * y[0];
  };
  // Controlled steps that land on every mesh point; dense output between
  // steps is not accurate enough for the residual check.
  auto stepper = odeint::make_controlled(1e-14, 1e-13, odeint::runge_kutta_dopri5<State>());
  Trajectory tr;
  const double h = RadialProfile::kStep;
  const std::size_t n = std::size_t(std::llround(r_max / h)) + 1;
  if (keep) {
    tr.f.reserve(n);
    tr.df.reserve(n);
    tr.f.push_back(0.0);
    tr.df.push_back(k == 1 ? a : 0.0);
  }
  State y;
  series_start(k, a, h, y[0], y[1]);
  if (keep) {
    tr.f.push_back(y[0]);
    tr.df.push_back(y[1]);
  }
  double dt = 0.1 * h;
  for (std::size_t q = 1; q + 1 < n; ++q) {
    double r = double(q) * h;
    const double r_next = double(q + 1) * h;
    while (r < r_next) {
      dt = std::min(dt, r_next - r);
      if (r + dt >= r_next) dt = r_next - r;
      const double r_before = r;
      if (stepper.try_step(rhs, y, r, dt) == odeint::success) {
        if (r >= r_next - 1e-15 * r_next) r = r_next;
      } else {
        r = r_before;
      }
    }
    dt = std::max(dt, 1e-6);
    if (keep) {
      tr.f.push_back(y[0]);
      tr.df.push_back(y[1]);
    }
    if (y[0] > 1.0) {
      tr.fate = Fate::over;
      tr.r_event = r_next;
      return tr;
    }
    if (y[1] < 0.0) {
      tr.fate = Fate::under;
      tr.r_event = r_next;
      return tr;
    }
  }
  tr.fate = Fate::reached;
  tr.r_event = r_max;
  return tr;
}

// Newton iteration for the fourth-order five-point discretisation of the ODE
// on mesh points 1..n-2. f(-q) = (-1)^kappa f(q) supplies the ghosts at the
// origin; f[n-1] and the ghost past it come from the far-field series.
void mesh_newton(int k, std::vector<double>& f, double ghost_right) {
  const double h = RadialProfile::kStep, k2 = double(k) * k;
  const double parity = (k % 2 == 0) ? 1.0 : -1.0;
  const std::size_t n = f.size();
  const std::size_t m = n - 2;  // unknowns f[1..n-2]
  auto val = [&](std::ptrdiff_t q) -> double {
    if (q < 0) return parity * f[std::size_t(-q)];
    if (std::size_t(q) == n) return ghost_right;
    return f[std::size_t(q)];
  };
  const double c2[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
  const double c1[5] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
  std::vector<double> F(m);
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 30; ++it) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(5 * m);
    double fmax = 0.0;
    for (std::size_t p = 0; p < m; ++p) {
      const std::ptrdiff_t q = std::ptrdiff_t(p) + 1;
      const double r = double(q) * h;
      double d2 = 0.0, d1 = 0.0;
      for (int o = -2; o <= 2; ++o) {
        const double v = val(q + o);
        d2 += c2[o + 2] * v;
        d1 += c1[o + 2] * v;
      }
      d2 /= h * h;
      d1 /= h;
      const double f0 = f[std::size_t(q)];
      F[p] = d2 + d1 / r - k2 * f0 / (r * r) + (1 - f0 * f0) * f0;
      fmax = std::max(fmax, std::abs(F[p]));
      for (int o = -2; o <= 2; ++o) {
        double w = c2[o + 2] / (h * h) + c1[o + 2] / (h * r);
        if (o == 0) w += -k2 / (r * r) + 1 - 3 * f0 * f0;
        std::ptrdiff_t col = q + o;
        if (col == 0 || std::size_t(col) >= n - 1) continue;  // fixed values
        if (col < 0) {
          col = -col;
          w *= parity;
        }
        trip.emplace_back(int(p), int(col - 1), w);
      }
    }
    // stop at the roundoff floor of the five-point stencil
    if (fmax < 1e-12 || fmax > 0.5 * prev) return;
    prev = fmax;
    const int mi = static_cast<int>(m);
    Eigen::SparseMatrix<double> J(mi, mi);
    J.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success) throw ConvergenceError("profile Newton matrix is singular");
    Eigen::VectorXd rhs(mi);
    for (std::size_t p = 0; p < m; ++p) rhs[int(p)] = -F[p];
    Eigen::VectorXd d = lu.solve(rhs);
    double dmax = 0.0;
    for (std::size_t p = 0; p < m; ++p) {
      f[p + 1] += d[int(p)];
      dmax = std::max(dmax, std::abs(d[int(p)]));
    }
    if (dmax < 1e-15) return;
  }
  throw ConvergenceError("profile Newton iteration did not converge");
}

void fd_derivative(int k, const std::vector<double>& f, std::vector<double>& df) {
  const double h = RadialProfile::kStep;
  const double parity = (k % 2 == 0) ? 1.0 : -1.0;
  const std::size_t n = f.size();
  auto val = [&](std::ptrdiff_t q) { return q < 0 ? parity * f[std::size_t(-q)] : f[std::size_t(q)]; };
  for (std::size_t q = 0; q < n; ++q) {
    const auto s = std::ptrdiff_t(q);
    if (q + 2 < n) {
      df[q] = (val(s - 2) - 8 * val(s - 1) + 8 * val(s + 1) - val(s + 2)) / (12 * h);
    } else {
      df[q] = (25 * f[q] - 48 * f[q - 1] + 36 * f[q - 2] - 16 * f[q - 3] + 3 * f[q - 4]) / (12 * h);
    }
  }
}

}  // namespace

RadialProfile::RadialProfile(int degree, double slope, std::vector<double> f,
                             std::vector<double> df, double residual)
    : degree_(degree), a_(slope), f_(std::move(f)), df_(std::move(df)), residual_(residual) {
  r_max_ = double(f_.size() - 1) * kStep;
  const double k2 = double(degree_) * degree_;
  far_a_ = 0.5 * k2;
  far_b_ = k2 + k2 * k2 / 8.0;
}

void RadialProfile::eval(double r, double& f, double& df) const {
  if (r < 0) r = -r;
  if (r >= r_max_) {
    const double r2 = 1.0 / (r * r);
    f = 1.0 - far_a_ * r2 - far_b_ * r2 * r2;
    df = (2.0 * far_a_ * r2 + 4.0 * far_b_ * r2 * r2) / r;
    return;
  }
  const double s = r / kStep;
  std::size_t q = std::size_t(s);
  if (q + 1 >= f_.size()) q = f_.size() - 2;
  const double t = s - double(q);
  const double f0 = f_[q], f1 = f_[q + 1], d0 = df_[q] * kStep, d1 = df_[q + 1] * kStep;
  const double t2 = t * t, t3 = t2 * t;
  f = (2 * t3 - 3 * t2 + 1) * f0 + (t3 - 2 * t2 + t) * d0 + (-2 * t3 + 3 * t2) * f1 + (t3 - t2) * d1;
  df = ((6 * t2 - 6 * t) * f0 + (3 * t2 - 4 * t + 1) * d0 + (-6 * t2 + 6 * t) * f1 +
        (3 * t2 - 2 * t) * d1) /
       kStep;
}

double RadialProfile::value(double r) const {
  double f, d;
  eval(r, f, d);
  return f;
}

double RadialProfile::derivative(double r) const {
  double f, d;
  eval(r, f, d);
  return d;
}

double RadialProfile::inverse(double target) const {
  if (!(target > 0.0) || !(target < f_.back()))
    throw PreconditionError("profile inverse target out of range");
  const auto it = std::lower_bound(f_.begin(), f_.end(), target);
  std::size_t q = std::size_t(it - f_.begin());
  double lo = double(q - 1) * kStep, hi = double(q) * kStep;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (value(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::string RadialProfile::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "r,f,df\n";
  for (std::size_t q = 0; q < f_.size(); ++q) os << r_at(q) << ',' << f_[q] << ',' << df_[q] << '\n';
  return os.str();
}

double profile_residual(const RadialProfile& p, double s) {
  const double h = RadialProfile::kStep;
  const std::size_t st_max = std::max<std::size_t>(1, std::size_t(std::llround(s / h)));
  const auto& f = p.f_samples();
  const double k2 = double(p.degree()) * p.degree();
  double worst = 0.0;
  // spacing shrinks to r/8 near the origin so the stencil stays off r = 0
  for (std::size_t q = 16; q < f.size(); ++q) {
    const std::size_t st = std::min(st_max, std::max<std::size_t>(1, q / 8));
    if (q + 2 * st >= f.size()) break;
    const double ss = double(st) * h;
    const double r = p.r_at(q);
    const double fm2 = f[q - 2 * st], fm1 = f[q - st], f0 = f[q], fp1 = f[q + st], fp2 = f[q + 2 * st];
    const double d2 = (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * ss * ss);
    const double d1 = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * ss);
    const double res = d2 + d1 / r - k2 * f0 / (r * r) + (1 - f0 * f0) * f0;
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

RadialProfile solve_radial_profile(int kappa, double r_max, double tol) {
  if (kappa < 1) throw PreconditionError("profile degree must be >= 1");
  if (!(r_max >= 20.0)) throw PreconditionError("profile r_max must be >= 20");
  if (!(tol > 1e-12 && tol < 1e-4)) throw PreconditionError("profile tol must lie in (1e-12, 1e-4)");

  double lo = 1e-6, hi = 10.0;
  // Scan the bracket outward until lo turns back and hi overshoots.
  for (int i = 0; i < 20 && shoot(kappa, lo, r_max, false).fate != Fate::under; ++i) lo *= 0.1;
  for (int i = 0; i < 20 && shoot(kappa, hi, r_max, false).fate != Fate::over; ++i) hi *= 10.0;
  if (shoot(kappa, lo, r_max, false).fate != Fate::under ||
      shoot(kappa, hi, r_max, false).fate != Fate::over) {
    std::ostringstream os;
    os << "no shooting bracket found for slope in [" << lo << ", " << hi << "]";
    throw ConvergenceError(os.str());
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const Fate fate = shoot(kappa, mid, r_max, false).fate;
    if (fate == Fate::over) hi = mid;
    else if (fate == Fate::under) lo = mid;
    else { lo = hi = mid; break; }
  }
  Trajectory tl = shoot(kappa, lo, r_max, true);
  Trajectory th = shoot(kappa, hi, r_max, true);
  const std::size_t n = std::size_t(std::llround(r_max / RadialProfile::kStep)) + 1;
  const std::size_t common = std::min(tl.f.size(), th.f.size());
  std::size_t split = common;
  for (std::size_t q = 0; q < common; ++q)
    if (std::abs(tl.f[q] - th.f[q]) > kSplitTol) {
      split = q;
      break;
    }
  if (split < std::size_t(4.0 / RadialProfile::kStep))
    throw ConvergenceError("shooting lost precision before r = 4");
  const double A = 0.5 * kappa * kappa, B = kappa * kappa + std::pow(kappa, 4) / 8.0;
  auto far = [&](double r) { return 1.0 - A / (r * r) - B / std::pow(r, 4); };
  std::vector<double> f(n), df(n);
  for (std::size_t q = 0; q < n; ++q)
    f[q] = q < split ? 0.5 * (tl.f[q] + th.f[q]) : far(double(q) * RadialProfile::kStep);
  f[0] = 0.0;
  mesh_newton(kappa, f, far(double(n) * RadialProfile::kStep));
  fd_derivative(kappa, f, df);
  // slope from the first mesh value and the series
  const double r1 = RadialProfile::kStep;
  const double slope = f[1] / (std::pow(r1, kappa) * (1.0 - r1 * r1 / (4.0 * (kappa + 1))));
  RadialProfile tmp(kappa, slope, f, df, 0.0);
  const double res = profile_residual(tmp, 1.0 / 128.0);
  if (!(res < tol)) {
    std::ostringstream os;
    os << "profile residual " << res << " above tolerance " << tol;
    throw ConvergenceError(os.str());
  }
  for (std::size_t q = 1; q < n; ++q)
    if (!(f[q] > f[q - 1]) || !(f[q] < 1.0))
      throw ConvergenceError("profile is not strictly increasing below 1");
  return RadialProfile(kappa, slope, std::move(f), std::move(df), res);
}

std::shared_ptr<const RadialProfile> profile_for(int kappa) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const RadialProfile>> cache;
  std::lock_guard lk(mu);
  auto it = cache.find(kappa);
  if (it != cache.end()) return it->second;
  auto p = std::make_shared<const RadialProfile>(
      solve_radial_profile(kappa, std::max(40.0, 25.0 * kappa), 1e-8));
  cache.emplace(kappa, p);
  return p;
}

}  // namespace glv
