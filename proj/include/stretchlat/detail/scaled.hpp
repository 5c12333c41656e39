#pragma once
#include <cstdint>
#include <span>
#include <vector>

#include "stretchlat/body.hpp"
#include "stretchlat/stretch.hpp"

namespace stretchlat::detail {

// Membership sums within this band of 1 are handed to the exact rational
// arbiter (superellipsoids with even integer exponents). Fast-path float
// decisions outside the band are reliable: the summation error for d <= 16
// is orders of magnitude below it.
inline constexpr double kBoundaryBand = 1e-9;

// Everything needed to test k in t*A*Omega, with rounding fixed once:
// radius[i] = t * a_i * b_i evaluated left to right. Every membership
// decision in the library goes through sd_contains so all callers agree
// on the same floating-point boundary.
struct ScaledDomain {
  BodySpec body;  // owned: section/subset reductions rebind it
  std::vector<double> a;
  double t = 1.0;
  std::vector<double> radius;
  std::vector<double> inv_ta;
  std::vector<int> pint;  // integer exponent, or -1 when fractional
  bool exact_ready = false;

  int dim() const { return body.dim; }
};

ScaledDomain make_scaled(const BodySpec& body, std::span<const double> a, double t);
ScaledDomain make_scaled(const BodySpec& body, const StretchFactor& A, double t);

// Re-aims an existing domain at a new stretch/dilation without reallocating;
// produces bit-identical radii to a fresh make_scaled with the same inputs.
// Hot path of the 2-D sweep optimizer.
void rescale_scaled(ScaledDomain& S, std::span<const double> a, double t);

// Restriction to the axes not listed in `drop` (0-based, sorted, unique):
// the section of the domain by the dropped coordinate hyperplanes.
ScaledDomain reduce_scaled(const ScaledDomain& S, const std::vector<int>& drop);

inline double ipow(double x, int n) {
  double r = 1.0;
  while (n > 0) {
    if (n & 1) r *= x;
    x *= x;
    n >>= 1;
  }
  return r;
}

// sum_i |k_i/radius_i|^{p_i}; superellipsoid only.
double membership_sum(const ScaledDomain& S, std::span<const int64_t> k);

bool sd_contains(const ScaledDomain& S, std::span<const int64_t> k);

// Largest m >= 0 with m*e_i in the domain (always >= 0 since t > 0).
int64_t axis_max(const ScaledDomain& S, int i);

}  // namespace stretchlat::detail
