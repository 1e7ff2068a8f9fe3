#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace glv {

// Solves (alpha I - beta Lap_h) x = f on an n0 x n1 block of interior nodes
// (x fastest) with homogeneous Dirichlet values just outside the block, using
// the type-I discrete sine transform. Lap_h is the 5-point Laplacian with
// spacing h. The plan is created once; solve() may be called repeatedly but
// not concurrently on the same object.
class DirichletSolver {
 public:
  DirichletSolver(std::size_t n0, std::size_t n1, double h);
  ~DirichletSolver();
  DirichletSolver(const DirichletSolver&) = delete;
  DirichletSolver& operator=(const DirichletSolver&) = delete;

  void solve(std::vector<double>& data, double alpha, double beta);
  std::size_t n0() const { return n0_; }
  std::size_t n1() const { return n1_; }

 private:
  struct Plan;
  std::size_t n0_, n1_;
  double h_;
  std::unique_ptr<Plan> plan_;
  std::vector<double> lam0_, lam1_;  // eigenvalues of -D^2 per axis
};

}  // namespace glv
