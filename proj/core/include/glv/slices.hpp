#pragma once

#include <string>
#include <vector>

#include "glv/field.hpp"

namespace glv {

// Per-slice audit of a cylinder field. For the slice at t and dyadic radii
// r = 2^-m in [ht, 1/2] the three defining quantities of a good slice are
// evaluated on the slab (t - r, t + r) x D, D the unit disk (or the whole
// cross-section when it is smaller), with r^{2-n} = 1/r:
//   energy:  |(1/r) int e - 2 pi theta |log eps|| / |log eps|
//   second:  (1/r) int (|d_t u|^2 + |jv - d*beta|^2 + |e - |d*beta|^2/2|) / |log eps|
//   third:   (1/r) int (W/eps^2 + |beta|)
// theta is the mean per-slice density. Slab integrals sum whole slices with
// the covered fraction of each t-cell.
struct SliceReport {
  double t = 0.0;
  double energy_theta = 0.0;  // int_slice e / (pi |log eps|)
  double par_energy = 0.0;    // int_slice |d_t u|^2
  double w_mass = 0.0;        // int_slice 2W/eps^2
  double xi_mass = 0.0;       // int_slice |beta|
  double sup_energy = 0.0;
  double sup_second = 0.0;
  double sup_third = 0.0;
  bool hodge_ok = true;       // false if the slice could not be decomposed

  bool good_energy(double delta) const { return sup_energy < delta; }
  bool good_second(double delta) const { return hodge_ok && sup_second < delta; }
  bool good_third(double K) const { return hodge_ok && sup_third < K; }
  bool is_good(double delta, double K) const {
    return good_energy(delta) && good_second(delta) && good_third(K);
  }
};

struct SliceScan {
  std::vector<SliceReport> slices;
  double theta = 0.0;
  double good_fraction(double delta, double K) const;
};

SliceScan good_slice_scan(const ComplexField& u);

std::string slice_scan_csv(const SliceScan& scan, double delta, double K);

// L2 ratio over sample points of slice k of |grad xi_ab| for the pairs
// (x,t), (y,t) against the (x,y) pair, from the Newtonian kernel
//   grad xi_ab(x) = -(1/4 pi) int phi djv_ab(x') (x - x')/|x - x'|^3 dx'
// with the nearest periodic image in t. Reported only.
double offslice_xi_ratio(const ComplexField& u, std::size_t k = 0, int points_per_axis = 24);

}  // namespace glv
