#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "glv/field.hpp"
#include "glv/grid.hpp"

namespace glv {

// {|u| <= beta} over active nodes (slice k for cylinder fields).
std::vector<std::uint8_t> vorticity_mask(const ComplexField& u, double beta, std::size_t k = 0);

struct Circle {
  Point2 center{};
  double radius = 0.0;
  int samples = 128;
};

// Winding number of u/|u| along the circle, from bilinear samples. Each
// phase increment lies in (-pi, pi]. Throws DegreeUndefinedError if
// |u| < 1e-9 at a sample, DomainError if the loop leaves the grid.
int loop_degree(const ComplexField& u, const Circle& loop, std::size_t k = 0);

struct VortexCluster {
  Point2 center{};
  double radius = 0.0;
  int degree = 0;
  double potential_mass = 0.0;  // integral of 2W/eps^2 over the disk
  std::size_t components = 0;   // raw components merged into the cluster
  bool touches_boundary = false;
};

struct ClusterOptions {
  double delta = 0.1;
  double merge_factor = 5.0;   // absorb components within this many circumradii
  double disk_factor = 2.0;    // disk radius over the circumradius of the merged set
  std::size_t slice = 0;
};

// Components of {|u| < 1 - delta}, merged greedily by decreasing potential
// mass into pairwise disjoint disks; each disk carries its boundary degree.
// Clusters whose component meets the edge of the active set, or whose disk
// leaves it, are flagged and given degree 0.
std::vector<VortexCluster> detect_clusters(const ComplexField& u, const ClusterOptions& opt = {});

std::string clusters_csv(const std::vector<VortexCluster>& c);

struct ClearingOutReport {
  double energy = 0.0;     // E(B_r(x))
  double threshold = 0.0;  // eta r^{n-2} log(r/eps)
  double modulus = 0.0;    // |u(x)|
  bool premise = false;    // energy below threshold
  bool holds = false;      // premise implies |u(x)| > 1/2
};

// Energy of u on B_r(x) from grid differences (r >= eps).
ClearingOutReport clearing_out_audit(const ComplexField& u, Point2 x, double r, double eta);

struct PotentialDegreeReport {
  struct Row {
    int degree = 0;
    double mass = 0.0;
    double threshold = 0.0;
    bool pass = false;
  };
  std::vector<Row> rows;
  double min_mass = std::numeric_limits<double>::infinity();
  int abs_degree_sum = 0;       // sum |kappa_j|
  int degree_sum_sq2 = 0;       // 2 |sum kappa_j|^2
  bool pass = true;
};

// potential_mass >= (pi/2) |kappa| (1 - 5 delta) per unflagged cluster.
PotentialDegreeReport potential_degree_audit(const std::vector<VortexCluster>& clusters,
                                             double delta);

struct PointwiseCeilings {
  double c1 = 10.0;  // (|u| - 1)/eps^2
  double c2 = 10.0;  // eps |du|
};

struct PointwiseReport {
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;
  bool finite = true;
  bool pass = true;  // finite and within the c1, c2 ceilings; c3 is only reported
};

// Fitted constants of the pointwise bounds over active nodes (du on the
// interior, central differences).
PointwiseReport pointwise_bounds_audit(const ComplexField& u, const PointwiseCeilings& ceil = {});

}  // namespace glv
