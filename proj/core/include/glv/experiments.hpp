#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "glv/field.hpp"
#include "glv/grid.hpp"

namespace glv {

// Predicted against measured. pass is |measured - predicted| <= tolerance;
// one-sided audits set predicted 0 and measure the size of the violation.
struct ExperimentReport {
  std::string name;
  std::vector<std::pair<std::string, std::string>> inputs;  // config echo, in order
  double predicted = 0.0;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  double runtime = 0.0;  // seconds; written to the sidecar log only
  std::vector<std::string> artifacts;
  std::vector<std::pair<std::string, double>> extras;
  std::vector<std::pair<std::string, std::string>> tables;  // name, CSV text

  void input(const std::string& key, const std::string& value);
  void input(const std::string& key, double value);
  void extra(const std::string& key, double value) { extras.emplace_back(key, value); }
  std::optional<double> find_extra(const std::string& key) const;
  // Sets pass from the three numbers.
  void settle();
};

// Energy identity for a product ansatz on D_1, integrated analytically on the
// nodes of the square [-1, 1]^2 with n points per axis:
//   theta_num  = E(D_1) / (pi |log eps|)
//   theta_pred = sum k_j^2 + 2 sum_{i<j} k_i k_j log(1/|p_i - p_j|) / |log eps|
// Centers come either from sigma (regular polygon, neighbours eps^sigma apart)
// or explicitly.
struct IdentityConfig {
  std::vector<int> degrees{1};
  std::optional<double> sigma;
  std::vector<Point2> centers;
  double eps = 1e-3;
  std::size_t n = 8193;
  double tol = 0.0;  // floor of the tolerance max(tol, 4/|log eps|)
  double min_separation = 20.0;  // in units of eps
};
ExperimentReport identity_experiment(const IdentityConfig& cfg);

// Predicted identity value for explicit centers.
double identity_prediction(const std::vector<Point2>& centers, const std::vector<int>& degrees,
                           double eps);

// kappa unit vortices on a regular kappa-gon of circumradius s0 eps^{tau/(1+tau)},
// measured against theta(kappa, tau) = kappa + (kappa^2 - kappa) tau / (1 + tau).
// One report per tau, in input order.
struct SweepConfig {
  int kappa = 2;
  std::vector<double> taus{0.0, 0.25, 0.5, 0.75};
  double eps = 1e-3;
  double s0 = 0.5;
  std::size_t n = 8193;
  double tol = 0.35;
};
double density_formula(int kappa, double tau);
std::vector<ExperimentReport> density_sweep(const SweepConfig& cfg);

// Energy of u on the annulus D_{r_out} \ D_s around center against
// pi k^2 log(r_out / s), k the degree of u on the circle of radius s.
// Tolerance 3 max(1, k^2) max(1, log log(1/s)). Throws DomainError if
// {|u| <= 1/2} meets the annulus D_{r_out} \ D_{eta s}.
ExperimentReport annulus_energy_check(const ComplexField& u, Point2 center, double s,
                                      double eta = 1.0, double r_out = 1.0);

// Sup of the GL residual below which a field counts as a critical point.
inline constexpr double kCertifiedResidual = 1e-6;

// Monotonicity on consecutive radii (a, b): E(B_r)/r^{n-2} nondecreasing, and
//   [E(B_b)/b^{n-2} - E(B_a)/a^{n-2}] / (b - a) >= mean of F - 5% slack,
//   F(r) = r^{2-n} int_{dB_r} |d_nu u|^2 + r^{1-n} int_{B_r} 2W/eps^2,
// the mean of F over [a, b] taken by Simpson's rule. Measured is the number
// of violated steps. Throws PreconditionError unless the residual is
// certified.
ExperimentReport monotonicity_audit(const ComplexField& u, Point2 center,
                                    const std::vector<double>& radii, double t_center = 0.0);

// Minimum of r^{2-n} int_{B_r} 2W/eps^2 over dyadic r in [eps^tau0,
// eps^{delta tau0}] against pi omega_{n-2} kappa^2 / (1 - delta). Measured is
// the excess over that bound.
ExperimentReport w_drop_scan(const ComplexField& u, Point2 center, int kappa, double tau0,
                             double delta, bool certified);

// 2D Pohozaev balance on B_R(center), R = disk radius - 4h for disk grids,
// the largest inscribed radius less 4h otherwise:
//   int_{B_R} (1-|u|^2)^2 / (2 eps^2) = R int_{dB_R} [(|d_tau u|^2 - |d_nu u|^2)/2 + W/eps^2].
// Measured is the relative gap. Requires a certified residual and a unit
// modulus boundary trace.
ExperimentReport pohozaev_check(const ComplexField& u, Point2 center = {});

// Largest eta whose clearing-out premise fails at the center of a single
// degree-kappa vortex on B_r, eta* = E(B_r) / log(r/eps), from radial
// Gauss-Legendre quadrature of the exact profile. Two reports: the final
// eta*/pi against 1 (tolerance 0.25), and the number of trend inversions.
std::vector<ExperimentReport> clearing_threshold_sweep(const std::vector<double>& eps_list,
                                                       int kappa = 1, double r = 0.5);
// E(B_r) of the exact degree-kappa vortex at parameter eps.
double radial_ball_energy(int kappa, double eps, double r);

// Helical ansatz v(z, t) = e^{i kappa t} V(e^{-it} z), V the product of kappa
// unit vortices on the ring of radius c/sqrt|log eps|, c = sqrt(kappa - 1) by
// default (the axis for kappa = 1). For each eps the energy of D_R x S^1, R = eps^{-tau},
// is fitted as C log(1/eps^{1+tau}), and the annulus (D_R \ D_{delta R}) x S^1
// measured. Reports: relative variation of C across the eps list
// (tolerance 0.2), and when the annulus holds no core, the slope of the
// annulus energy against log(1/eps) (tolerance 0.2).
struct HelicalAuditConfig {
  int kappa = 2;
  double tau = 0.5;
  std::vector<double> eps_list{1e-2, 3e-3};
  double delta = 0.5;
  std::optional<double> radius_coefficient;  // c in c / sqrt|log eps|; sqrt(kappa - 1) if unset
};
double helix_radius(int kappa, double eps, std::optional<double> coefficient = std::nullopt);
std::vector<ExperimentReport> helical_energy_audit(const HelicalAuditConfig& cfg);

}  // namespace glv
