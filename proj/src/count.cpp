#include "stretchlat/count.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "stretchlat/detail/scaled.hpp"

namespace stretchlat {

using detail::ipow;
using detail::kBoundaryBand;
using detail::make_scaled;
using detail::reduce_scaled;
using detail::ScaledDomain;
using detail::sd_contains;

namespace {

// A prefix whose partial membership sum exceeds this can be skipped without
// consulting the predicate: the arbiter band around 1 is 1e-9 and the float
// summation error is ~1e-15, so nothing inside can be missed.
constexpr double kSkipThreshold = 1.0 + 2e-9;

struct Tallies {
  int64_t slices = 0;
  int64_t corrections = 0;
};

void check_capacity(const ScaledDomain& S) {
  double box = 1.0;
  for (int i = 0; i < S.dim(); ++i) {
    const double r = S.radius[static_cast<size_t>(i)];
    if (!(r >= 0.0) || r >= 9.0e15)
      throw CapacityError("axis range exceeds the exact integer range of double");
    box *= 2.0 * r + 3.0;
  }
  if (box > 4.0e18) throw CapacityError("lattice box exceeds the int64 range");
}

// Real half-width of the slice along `axis` with the other coordinates fixed
// at k; generic bodies only (superellipsoids use the closed-form residual).
double generic_slice_width(const ScaledDomain& S, const std::vector<int64_t>& k, int axis) {
  const int d = S.dim();
  std::vector<double> y(static_cast<size_t>(d));
  for (int i = 0; i < d; ++i)
    y[static_cast<size_t>(i)] =
        static_cast<double>(k[static_cast<size_t>(i)]) * S.inv_ta[static_cast<size_t>(i)];
  auto g = [&](double s) {
    y[static_cast<size_t>(axis)] = s * S.inv_ta[static_cast<size_t>(axis)];
    return gauge(S.body, y);
  };
  if (g(0.0) > 1.0) return -1.0;
  double lo = 0.0, hi = S.radius[static_cast<size_t>(axis)] + 1.0;
  if (g(hi) <= 1.0) return hi;
  for (int iter = 0; iter < 64; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) <= 1.0 ? lo : hi) = mid;
  }
  return lo;
}

// Number of lattice points of the slice along `axis`: prefix coordinates are
// already set in k. sigma is the prefix membership sum (superellipsoid).
int64_t slice_points(const ScaledDomain& S, std::vector<int64_t>& k, int axis, double sigma,
                     LatticeSet set, Tallies& tally) {
  ++tally.slices;
  const int64_t nmin = (set == LatticeSet::Positive) ? 1 : 0;
  const int64_t cap = static_cast<int64_t>(std::floor(S.radius[static_cast<size_t>(axis)])) + 2;

  int64_t n;
  if (S.body.family == BodyFamily::Superellipsoid) {
    const double resid = 1.0 - sigma;
    if (resid <= 0.0) {
      n = 0;
    } else {
      const double pa = S.body.p[static_cast<size_t>(axis)];
      n = static_cast<int64_t>(
          std::floor(S.radius[static_cast<size_t>(axis)] * std::pow(resid, 1.0 / pa)));
    }
  } else {
    n = static_cast<int64_t>(std::floor(generic_slice_width(S, k, axis)));
  }
  n = std::clamp(n, nmin - 1, cap);

  k[static_cast<size_t>(axis)] = n + 1;
  while (n + 1 <= cap && sd_contains(S, k)) {
    ++n;
    k[static_cast<size_t>(axis)] = n + 1;
    ++tally.corrections;
  }
  k[static_cast<size_t>(axis)] = n;
  while (n >= nmin && !sd_contains(S, k)) {
    --n;
    k[static_cast<size_t>(axis)] = n;
    ++tally.corrections;
  }
  k[static_cast<size_t>(axis)] = 0;

  switch (set) {
    case LatticeSet::Full:
      return n >= 0 ? 2 * n + 1 : 0;
    case LatticeSet::Positive:
      return n >= 1 ? n : 0;
    default:  // Nonnegative
      return n + 1;
  }
}

double axis_term(const ScaledDomain& S, int axis, int64_t kv) {
  const double r =
      std::fabs(static_cast<double>(kv)) / S.radius[static_cast<size_t>(axis)];
  const int pi = S.pint[static_cast<size_t>(axis)];
  return (pi >= 0) ? ipow(r, pi) : std::pow(r, S.body.p[static_cast<size_t>(axis)]);
}

// Iterate prefix axes perm[level..d-1], then solve perm[0]. For Full the
// prefix coordinates are folded onto k >= 0 with weight 2 for k > 0 (the body
// is symmetric in every coordinate, and so is the predicate).
int64_t level_sum(const ScaledDomain& S, const std::vector<int>& perm, size_t level,
                  std::vector<int64_t>& k, double sigma, LatticeSet set, Tallies& tally) {
  if (level == perm.size()) return slice_points(S, k, perm[0], sigma, set, tally);
  const int axis = perm[level];
  const bool se = S.body.family == BodyFamily::Superellipsoid;
  const int64_t hi = static_cast<int64_t>(std::floor(S.radius[static_cast<size_t>(axis)])) + 1;
  const int64_t lo = (set == LatticeSet::Positive) ? 1 : 0;
  int64_t total = 0;
  for (int64_t kv = lo; kv <= hi; ++kv) {
    double sigma2 = sigma;
    if (se) {
      sigma2 += axis_term(S, axis, kv);
      if (sigma2 > kSkipThreshold) break;  // terms grow with kv >= 0
    }
    k[static_cast<size_t>(axis)] = kv;
    const int64_t weight = (set == LatticeSet::Full && kv > 0) ? 2 : 1;
    total += weight * level_sum(S, perm, level + 1, k, sigma2, set, tally);
  }
  k[static_cast<size_t>(axis)] = 0;
  return total;
}

// Generic prefix sum for non-superellipsoids: sigma stays 0, pruning happens
// inside the slice solve.
int64_t count_core(const ScaledDomain& S, LatticeSet set, bool parallel, Tallies& tally) {
  const int d = S.dim();
  if (d == 0) return 1;  // the origin
  std::vector<int> perm(static_cast<size_t>(d));
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](int x, int y) {
    return S.radius[static_cast<size_t>(x)] > S.radius[static_cast<size_t>(y)];
  });
  std::vector<int64_t> k(static_cast<size_t>(d), 0);
  if (d == 1) return slice_points(S, k, perm[0], 0.0, set, tally);

  const int axis = perm[1];
  const int64_t hi = static_cast<int64_t>(std::floor(S.radius[static_cast<size_t>(axis)])) + 1;
  const int64_t lo = (set == LatticeSet::Positive) ? 1 : 0;
  int64_t total = 0, slices = 0, corrections = 0;

#ifdef _OPENMP
#pragma omp parallel for reduction(+ : total, slices, corrections) schedule(static) if (parallel)
#endif
  for (int64_t kv = lo; kv <= hi; ++kv) {
    const double sigma =
        (S.body.family == BodyFamily::Superellipsoid) ? axis_term(S, axis, kv) : 0.0;
    if (sigma > kSkipThreshold) continue;
    Tallies local;
    std::vector<int64_t> kk(static_cast<size_t>(d), 0);
    kk[static_cast<size_t>(axis)] = kv;
    const int64_t weight = (set == LatticeSet::Full && kv > 0) ? 2 : 1;
    total += weight * level_sum(S, perm, 2, kk, sigma, set, local);
    slices += local.slices;
    corrections += local.corrections;
  }
  (void)parallel;
  tally.slices += slices;
  tally.corrections += corrections;
  return total;
}

int64_t sections_union_core(const ScaledDomain& S, bool parallel, Tallies& tally) {
  const int d = S.dim();
  // Inclusion-exclusion over the nonempty axis subsets: points with at least
  // one vanishing coordinate are the union of the section sublattices.
  int64_t total = 0;
  for (unsigned mask = 1; mask < (1u << d); ++mask) {
    std::vector<int> drop;
    for (int i = 0; i < d; ++i)
      if (mask & (1u << i)) drop.push_back(i);
    const ScaledDomain R = reduce_scaled(S, drop);
    const int64_t c = count_core(R, LatticeSet::Full, parallel, tally);
    total += (drop.size() % 2 == 1) ? c : -c;
  }
  return total;
}

CountResult count_impl(const CountRequest& req, bool parallel) {
  req.body.validate();
  if (req.stretch.dim() != req.body.dim)
    throw InputError("count: stretch dimension does not match the body");
  if (req.body.dim < 2) throw InputError("count: requests need d >= 2");
  const ScaledDomain S = make_scaled(req.body, req.stretch, req.t);
  check_capacity(S);
  CountResult res;
  Tallies tally;
  res.count = (req.set == LatticeSet::SectionsUnion) ? sections_union_core(S, parallel, tally)
                                                     : count_core(S, req.set, parallel, tally);
  res.slices_visited = tally.slices;
  res.boundary_corrections = tally.corrections;
  return res;
}

}  // namespace

CountResult count(const CountRequest& req) { return count_impl(req, true); }

CountResult count_serial(const CountRequest& req) { return count_impl(req, false); }

CountResult count_bruteforce(const CountRequest& req) {
  req.body.validate();
  if (req.stretch.dim() != req.body.dim)
    throw InputError("count: stretch dimension does not match the body");
  if (req.body.dim < 2) throw InputError("count: requests need d >= 2");
  const ScaledDomain S = make_scaled(req.body, req.stretch, req.t);
  check_capacity(S);
  const int d = S.dim();

  std::vector<int64_t> mx(static_cast<size_t>(d)), lo(static_cast<size_t>(d));
  double points = 1.0;
  for (int i = 0; i < d; ++i) {
    mx[static_cast<size_t>(i)] = detail::axis_max(S, i);
    switch (req.set) {
      case LatticeSet::Positive:
        lo[static_cast<size_t>(i)] = 1;
        break;
      case LatticeSet::Nonnegative:
        lo[static_cast<size_t>(i)] = 0;
        break;
      default:
        lo[static_cast<size_t>(i)] = -mx[static_cast<size_t>(i)];
        break;
    }
    points *= static_cast<double>(mx[static_cast<size_t>(i)] - lo[static_cast<size_t>(i)] + 1);
  }
  if (points > 1.0e8) throw CapacityError("brute force box exceeds 1e8 points");

  CountResult res;
  std::vector<int64_t> k(static_cast<size_t>(d), 0);
  std::function<void(int)> scan = [&](int axis) {
    if (axis == d) {
      ++res.slices_visited;
      if (req.set == LatticeSet::SectionsUnion) {
        bool on_section = false;
        for (int i = 0; i < d; ++i)
          if (k[static_cast<size_t>(i)] == 0) {
            on_section = true;
            break;
          }
        if (!on_section) return;
      }
      if (sd_contains(S, k)) ++res.count;
      return;
    }
    for (int64_t kv = lo[static_cast<size_t>(axis)]; kv <= mx[static_cast<size_t>(axis)]; ++kv) {
      k[static_cast<size_t>(axis)] = kv;
      scan(axis + 1);
    }
    k[static_cast<size_t>(axis)] = 0;
  };
  scan(0);
  return res;
}

int64_t count_axis_subsets(const BodySpec& body, const StretchFactor& A, double t,
                           const std::vector<int>& zero_axes) {
  body.validate();
  if (A.dim() != body.dim) throw InputError("count: stretch dimension does not match the body");
  std::vector<int> drop = zero_axes;
  std::sort(drop.begin(), drop.end());
  if (std::adjacent_find(drop.begin(), drop.end()) != drop.end())
    throw InputError("count_axis_subsets: repeated axis");
  const ScaledDomain S = make_scaled(body, A, t);
  check_capacity(S);
  const ScaledDomain R = reduce_scaled(S, drop);
  Tallies tally;
  return count_core(R, LatticeSet::Positive, false, tally);
}

}  // namespace stretchlat
