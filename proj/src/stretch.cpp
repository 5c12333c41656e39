#include "stretchlat/stretch.hpp"

#include <cmath>

#include "stretchlat/errors.hpp"

namespace stretchlat {

static void check_entries(const std::vector<double>& a) {
  if (a.empty()) throw InputError("StretchFactor: empty diagonal");
  for (double v : a)
    if (!(std::isfinite(v) && v > 0.0)) throw InputError("StretchFactor: entries must be positive and finite");
}

static double max_inverse(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, 1.0 / v);
  return m;
}

StretchFactor StretchFactor::identity(int d) {
  if (d < 1) throw InputError("StretchFactor: dimension must be >= 1");
  StretchFactor A;
  A.diag.assign(static_cast<size_t>(d), 1.0);
  A.a_star = 1.0;
  return A;
}

StretchFactor StretchFactor::from_diag(std::vector<double> a) {
  check_entries(a);
  double logsum = 0.0;
  for (double v : a) logsum += std::log(v);
  if (std::fabs(std::expm1(logsum)) > 1e-6)
    throw InputError("StretchFactor: product of entries deviates from 1 by more than 1e-6");
  const double g = std::exp(logsum / static_cast<double>(a.size()));
  for (double& v : a) v /= g;
  StretchFactor A;
  A.diag = std::move(a);
  A.a_star = max_inverse(A.diag);
  return A;
}

StretchFactor StretchFactor::from_diag_unchecked(std::vector<double> a) {
  check_entries(a);
  double prod = 1.0;
  for (double v : a) prod *= v;
  if (std::fabs(prod - 1.0) > 1e-9)
    throw InputError("StretchFactor: entries are not determinant-1 to 1e-9");
  StretchFactor A;
  A.diag = std::move(a);
  A.a_star = max_inverse(A.diag);
  return A;
}

}  // namespace stretchlat
