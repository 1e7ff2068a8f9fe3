#pragma once

#include <functional>
#include <vector>

namespace glv {

using Vec = std::vector<double>;
using LinOp = std::function<void(const Vec& in, Vec& out)>;

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);
double norm_inf(const Vec& a);

struct KrylovResult {
  int iterations = 0;
  double residual = 0.0;  // final relative residual (true for CG, estimate for MINRES)
  bool converged = false;
};

// Preconditioned conjugate gradients for symmetric positive definite A;
// precond applies an SPD approximation of A^{-1}.
KrylovResult conjugate_gradient(const LinOp& A, const LinOp& precond, const Vec& b, Vec& x,
                                double rtol, int max_iter);

// Preconditioned MINRES (Paige-Saunders) for symmetric, possibly indefinite A
// with an SPD preconditioner. Convergence is judged on the preconditioned
// residual norm relative to its initial value.
KrylovResult minres(const LinOp& A, const LinOp& precond, const Vec& b, Vec& x, double rtol,
                    int max_iter);

}  // namespace glv
