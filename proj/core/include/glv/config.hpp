#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "glv/grid.hpp"
#include "glv/solver.hpp"

namespace glv {

// Flat key = value file with [section] headers; '#' starts a comment, as
// does ';' at the start of a line.
// Lists are comma separated; centers are "x y" pairs separated by ';'.
//
//   [run]     experiment, out, seed, tol
//   [model]   eps (one value or a list)
//   [grid]    n, half_width, radius (0: square), nt
//   [vortex]  degrees, separation_exponent, centers, jitter, min_separation
//   [solver]  dt_factor, max_steps, residual_tol, newton, newton_switch,
//             max_newton, explicit
//   [sweep]   kappa, taus, s0
//   [helix]   kappa, tau, delta, radius_coefficient
//   [audit]   radii, s, eta, tau0, delta, field
struct RunConfig {
  std::string experiment;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  double tol = 0.0;

  std::vector<double> eps{1e-3};

  std::size_t n = 0;  // 0: the experiment default
  double half_width = 1.0;
  double radius = 0.0;
  std::size_t nt = 32;

  std::vector<int> degrees{1};
  std::optional<double> separation_exponent;
  std::vector<Point2> centers;
  double jitter = 0.0;
  double min_separation = 20.0;  // identity floor, in units of eps

  SolveConfig solver;

  int sweep_kappa = 2;
  std::vector<double> taus{0.0, 0.25, 0.5, 0.75};
  double s0 = 0.5;

  int helix_kappa = 2;
  double helix_tau = 0.5;
  double helix_delta = 0.5;
  std::optional<double> helix_radius_coefficient;

  std::vector<double> radii;
  double annulus_s = 0.1;
  double eta = 1.0;
  double tau0 = 1.0;
  double w_delta = 0.5;
  std::string field;

  // key = value pairs in file order, as written
  std::vector<std::pair<std::string, std::string>> echo;

  void validate() const;  // throws ConfigError
};

// Names accepted by [run] experiment.
const std::vector<std::string>& experiment_names();

// Throws ConfigError with line and column on malformed input. Unknown keys
// are errors in strict mode and warnings otherwise.
RunConfig parse_config(const std::string& text, bool strict,
                       std::vector<std::string>* warnings = nullptr);
RunConfig load_config(const std::filesystem::path& path, bool strict,
                      std::vector<std::string>* warnings = nullptr);

}  // namespace glv
