#pragma once

#include <memory>
#include <string>
#include <vector>

namespace glv {

// Modulus profile f of the degree-kappa vortex w = f(r) e^{i kappa theta},
// in units where eps = 1:
//   f'' + f'/r - kappa^2 f / r^2 + (1 - f^2) f = 0,  f(0) = 0, f(inf) = 1.
// Samples live on a uniform mesh of step 1/1024 from 0 to r_max; values
// between samples use cubic Hermite interpolation, values past r_max the
// far-field series 1 - A/r^2 - B/r^4.
class RadialProfile {
 public:
  static constexpr double kStep = 1.0 / 1024.0;

  RadialProfile(int degree, double slope, std::vector<double> f, std::vector<double> df,
                double residual);

  int degree() const { return degree_; }
  double slope() const { return a_; }  // f ~ a r^kappa at 0
  double r_max() const { return r_max_; }
  double sup_residual() const { return residual_; }
  std::size_t size() const { return f_.size(); }
  double r_at(std::size_t q) const { return double(q) * kStep; }
  const std::vector<double>& f_samples() const { return f_; }
  const std::vector<double>& df_samples() const { return df_; }

  double value(double r) const;
  double derivative(double r) const;
  // value and derivative in one lookup
  void eval(double r, double& f, double& df) const;

  // r with f(r) = target, target in (0, f(r_max)).
  double inverse(double target) const;

  std::string to_csv() const;

 private:
  int degree_;
  double a_;
  std::vector<double> f_, df_;
  double r_max_;
  double residual_;
  double far_a_, far_b_;
};

// Shooting on the slope a (bisection between overshoot f > 1 and turn-back
// f' < 0) plus a far-field Newton solve past the point where shooting loses
// precision. Throws ConvergenceError if the residual cannot be brought below
// tol.
RadialProfile solve_radial_profile(int kappa, double r_max = 40.0, double tol = 1e-8);

// Sup over mesh points r >= 2 s of the ODE residual, measured with
// fourth-order differences of f at spacing s (independent of the solver).
double profile_residual(const RadialProfile& p, double s);

// Shared cache of profiles by degree; thread safe.
std::shared_ptr<const RadialProfile> profile_for(int kappa);

}  // namespace glv
