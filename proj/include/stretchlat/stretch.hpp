#pragma once
#include <vector>

namespace stretchlat {

// Volume-preserving anisotropic scaling A = diag(a_1..a_d) with det A = 1.
// a_star = max_i 1/a_i is the quantity the balancing bounds are phrased in.
struct StretchFactor {
  std::vector<double> diag;
  double a_star = 1.0;

  int dim() const { return static_cast<int>(diag.size()); }

  static StretchFactor identity(int d);

  // Renormalizes so the product of the entries is 1 (to ~1e-12 relative);
  // rejects inputs whose product deviates from 1 by more than 1e-6.
  static StretchFactor from_diag(std::vector<double> a);

  // Entries already satisfy det = 1 to high accuracy (e.g. constructed as
  // {a, 1/a}); stored as-is so downstream evaluations reuse the exact values.
  static StretchFactor from_diag_unchecked(std::vector<double> a);
};

}  // namespace stretchlat
