#include "stretchlat/detail/scaled.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>

namespace stretchlat::detail {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

void rescale_scaled(ScaledDomain& S, std::span<const double> a, double t) {
  // The single rounding authority: radius_i = t * a_i * b_i left to right.
  // Every membership decision derives from these doubles.
  for (size_t i = 0; i < a.size(); ++i) {
    if (!(std::isfinite(a[i]) && a[i] > 0.0)) throw InputError("stretch entries must be positive");
    S.a[i] = a[i];
    S.radius[i] = t * a[i] * S.body.b[i];
    S.inv_ta[i] = 1.0 / (t * a[i]);
  }
  S.t = t;
}

ScaledDomain make_scaled(const BodySpec& body, std::span<const double> a, double t) {
  body.validate();
  if (static_cast<int>(a.size()) != body.dim)
    throw InputError("stretch dimension does not match the body");
  if (!(std::isfinite(t) && t > 0.0)) throw InputError("dilation t must be positive and finite");
  ScaledDomain S;
  S.body = body;
  S.a.resize(a.size());
  S.radius.resize(a.size());
  S.inv_ta.resize(a.size());
  S.pint.assign(a.size(), -1);
  for (size_t i = 0; i < a.size(); ++i) {
    if (body.family == BodyFamily::Superellipsoid) {
      const double pi = body.p[i];
      if (pi == std::round(pi) && pi < 64.0) S.pint[i] = static_cast<int>(pi);
    }
  }
  S.exact_ready = body.exponents_even_int();
  rescale_scaled(S, a, t);
  return S;
}

ScaledDomain make_scaled(const BodySpec& body, const StretchFactor& A, double t) {
  return make_scaled(body, std::span<const double>(A.diag), t);
}

ScaledDomain reduce_scaled(const ScaledDomain& S, const std::vector<int>& drop) {
  for (size_t i = 0; i < drop.size(); ++i) {
    if (drop[i] < 0 || drop[i] >= S.dim()) throw InputError("axis subset out of range");
    if (i > 0 && drop[i] <= drop[i - 1]) throw InputError("axis subset must be sorted and unique");
  }
  std::vector<char> dropped(static_cast<size_t>(S.dim()), 0);
  for (int j : drop) dropped[static_cast<size_t>(j)] = 1;

  ScaledDomain R;
  R.t = S.t;
  R.body.family = S.body.family;
  R.body.max_derivative_order = S.body.max_derivative_order;
  for (int i = 0; i < S.dim(); ++i) {
    if (dropped[static_cast<size_t>(i)]) continue;
    R.body.b.push_back(S.body.b[static_cast<size_t>(i)]);
    if (S.body.family == BodyFamily::Superellipsoid)
      R.body.p.push_back(S.body.p[static_cast<size_t>(i)]);
    R.a.push_back(S.a[static_cast<size_t>(i)]);
    R.radius.push_back(S.radius[static_cast<size_t>(i)]);
    R.inv_ta.push_back(S.inv_ta[static_cast<size_t>(i)]);
    R.pint.push_back(S.pint[static_cast<size_t>(i)]);
  }
  R.body.dim = static_cast<int>(R.body.b.size());
  if (S.body.family == BodyFamily::GenericConvex) {
    const int full_dim = S.dim();
    R.body.gauge_oracle = [oracle = S.body.gauge_oracle, dropped,
                           full_dim](std::span<const double> y) {
      std::vector<double> x(static_cast<size_t>(full_dim), 0.0);
      size_t j = 0;
      for (int i = 0; i < full_dim; ++i)
        if (!dropped[static_cast<size_t>(i)]) x[static_cast<size_t>(i)] = y[j++];
      return oracle(x);
    };
  }
  R.exact_ready = S.exact_ready;
  return R;
}

double membership_sum(const ScaledDomain& S, std::span<const int64_t> k) {
  double s = 0.0;
  for (int i = 0; i < S.dim(); ++i) {
    const double r =
        std::fabs(static_cast<double>(k[static_cast<size_t>(i)])) / S.radius[static_cast<size_t>(i)];
    const int pi = S.pint[static_cast<size_t>(i)];
    s += (pi >= 0) ? ipow(r, pi) : std::pow(r, S.body.p[static_cast<size_t>(i)]);
  }
  return s;
}

// --- double-double arithmetic (Dekker/Knuth). The membership sum of a point
// near the boundary is an exact dyadic rational; ~106 bits certify its side
// of 1 whenever it is farther than kDDCertify away, which keeps big-rational
// work off the bisection hot path of the sweep optimizer.
namespace {

struct DD {
  double hi = 0.0, lo = 0.0;
};

inline DD quick_two_sum(double a, double b) {  // requires |a| >= |b|
  const double s = a + b;
  return {s, b - (s - a)};
}

inline DD two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline DD two_prod(double a, double b) {
  constexpr double kSplit = 134217729.0;  // 2^27 + 1, Veltkamp
  const double p = a * b;
  const double ta = kSplit * a, ah = ta - (ta - a), al = a - ah;
  const double tb = kSplit * b, bh = tb - (tb - b), bl = b - bh;
  return {p, ((ah * bh - p) + ah * bl + al * bh) + al * bl};
}

inline DD dd_add(DD x, DD y) {
  DD s = two_sum(x.hi, y.hi);
  s.lo += x.lo + y.lo;
  return quick_two_sum(s.hi, s.lo);
}

inline DD dd_mul(DD x, DD y) {
  DD p = two_prod(x.hi, y.hi);
  p.lo += x.hi * y.lo + x.lo * y.hi;
  return quick_two_sum(p.hi, p.lo);
}

inline DD dd_div(double a, double b) {
  const double q0 = a / b;
  const DD p = two_prod(q0, b);
  const double e = (a - p.hi) - p.lo;
  return quick_two_sum(q0, e / b);
}

inline DD dd_ipow(DD x, int n) {
  DD r{1.0, 0.0};
  while (n > 0) {
    if (n & 1) r = dd_mul(r, x);
    x = dd_mul(x, x);
    n >>= 1;
  }
  return r;
}

// Accumulated double-double rounding stays below ~1e-27 here; decisions at
// least this far from the boundary are certain. -1 inside, +1 outside,
// 0 undecided (fall through to the rational arbiter).
constexpr double kDDCertify = 1e-24;

int dd_boundary_side(const ScaledDomain& S, std::span<const int64_t> k) {
  DD sum{0.0, 0.0};
  for (int i = 0; i < S.dim(); ++i) {
    const int64_t ki = k[static_cast<size_t>(i)];
    if (ki == 0) continue;
    const DD ratio = dd_div(std::fabs(static_cast<double>(ki)), S.radius[static_cast<size_t>(i)]);
    sum = dd_add(sum, dd_ipow(ratio, S.pint[static_cast<size_t>(i)]));
  }
  const DD diff = dd_add(sum, DD{-1.0, 0.0});
  if (diff.hi > kDDCertify) return +1;
  if (diff.hi < -kDDCertify) return -1;
  return 0;
}

}  // namespace

// Exact decision of sum_i (|k_i|/c_i)^{p_i} <= 1 treating the rounded doubles
// c_i as exact binary rationals, so the float fast path and the arbiter
// describe the same body.
static bool exact_contains(const ScaledDomain& S, std::span<const int64_t> k) {
  cpp_rational sum = 0;
  for (int i = 0; i < S.dim(); ++i) {
    const int64_t ki = k[static_cast<size_t>(i)];
    if (ki == 0) continue;
    const cpp_rational ratio =
        cpp_rational(cpp_int(ki < 0 ? -ki : ki)) / cpp_rational(S.radius[static_cast<size_t>(i)]);
    cpp_rational pw = 1;
    for (int e = 0; e < S.pint[static_cast<size_t>(i)]; ++e) pw *= ratio;
    sum += pw;
    if (sum > 1) return false;
  }
  return sum <= 1;
}

bool sd_contains(const ScaledDomain& S, std::span<const int64_t> k) {
  if (S.body.family == BodyFamily::Superellipsoid) {
    const double s = membership_sum(S, k);
    if (S.exact_ready && std::fabs(s - 1.0) <= kBoundaryBand) {
      const int side = dd_boundary_side(S, k);
      if (side != 0) return side < 0;
      return exact_contains(S, k);
    }
    return s <= 1.0;
  }
  double y[16];
  for (int i = 0; i < S.dim(); ++i)
    y[i] = static_cast<double>(k[static_cast<size_t>(i)]) * S.inv_ta[static_cast<size_t>(i)];
  return gauge(S.body, std::span<const double>(y, static_cast<size_t>(S.dim()))) <= 1.0;
}

int64_t axis_max(const ScaledDomain& S, int i) {
  const double c = S.radius[static_cast<size_t>(i)];
  if (!(c < 9.0e15)) throw CapacityError("axis range exceeds the exact integer range of double");
  std::vector<int64_t> k(static_cast<size_t>(S.dim()), 0);
  int64_t m = static_cast<int64_t>(std::floor(c));
  if (m < 0) m = 0;
  k[static_cast<size_t>(i)] = m + 1;
  while (sd_contains(S, k)) {
    ++m;
    k[static_cast<size_t>(i)] = m + 1;
  }
  k[static_cast<size_t>(i)] = m;
  while (m > 0 && !sd_contains(S, k)) {
    --m;
    k[static_cast<size_t>(i)] = m;
  }
  return m;
}

}  // namespace stretchlat::detail
