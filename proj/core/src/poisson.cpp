#include "glv/poisson.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "glv/errors.hpp"

namespace glv {

namespace {
// the FFTW planner is not reentrant
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct DirichletSolver::Plan {
  fftw_plan plan = nullptr;
  double* buf = nullptr;
};

DirichletSolver::DirichletSolver(std::size_t n0, std::size_t n1, double h)
    : n0_(n0), n1_(n1), h_(h), plan_(std::make_unique<Plan>()) {
  if (n0 == 0 || n1 == 0) throw PreconditionError("Dirichlet solver needs a nonempty block");
  std::lock_guard lk(planner_mutex());
  plan_->buf = fftw_alloc_real(n0 * n1);
  if (!plan_->buf) throw Error("FFTW allocation failed");
  plan_->plan = fftw_plan_r2r_2d(int(n1), int(n0), plan_->buf, plan_->buf, FFTW_RODFT00,
                                 FFTW_RODFT00, FFTW_ESTIMATE);
  if (!plan_->plan) throw Error("FFTW plan creation failed");
  auto eig = [h](std::size_t n) {
    std::vector<double> l(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double s = std::sin(std::numbers::pi * double(k + 1) / (2.0 * double(n + 1)));
      l[k] = 4.0 * s * s / (h * h);
    }
    return l;
  };
  lam0_ = eig(n0);
  lam1_ = eig(n1);
}

DirichletSolver::~DirichletSolver() {
  std::lock_guard lk(planner_mutex());
  if (plan_->plan) fftw_destroy_plan(plan_->plan);
  if (plan_->buf) fftw_free(plan_->buf);
}

void DirichletSolver::solve(std::vector<double>& data, double alpha, double beta) {
  const std::size_t n = n0_ * n1_;
  if (data.size() != n) throw PreconditionError("Dirichlet solver: data size mismatch");
  double* b = plan_->buf;
  std::copy(data.begin(), data.end(), b);
  fftw_execute(plan_->plan);
  // RODFT00 applied twice scales by 2(n+1) per axis
  const double norm = 1.0 / (4.0 * double(n0_ + 1) * double(n1_ + 1));
  for (std::size_t j = 0; j < n1_; ++j)
    for (std::size_t i = 0; i < n0_; ++i) {
      const double d = alpha + beta * (lam0_[i] + lam1_[j]);
      b[j * n0_ + i] *= norm / d;
    }
  fftw_execute(plan_->plan);
  std::copy(b, b + n, data.begin());
}

}  // namespace glv
