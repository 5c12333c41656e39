#include "stretchlat/body.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "stretchlat/detail/scaled.hpp"
#include "stretchlat/series.hpp"

namespace stretchlat {

static constexpr int kMaxDim = 16;

// ---------------------------------------------------------------- BodySpec

BodySpec BodySpec::superellipsoid(Vec p, Vec b) {
  BodySpec body;
  body.family = BodyFamily::Superellipsoid;
  body.dim = static_cast<int>(b.size());
  body.p = std::move(p);
  body.b = std::move(b);
  body.validate();
  return body;
}

BodySpec BodySpec::generic(int dim, std::function<double(std::span<const double>)> g,
                           int max_derivative_order, Vec box) {
  BodySpec body;
  body.family = BodyFamily::GenericConvex;
  body.dim = dim;
  body.b = std::move(box);
  body.gauge_oracle = std::move(g);
  body.max_derivative_order = max_derivative_order;
  body.validate();
  return body;
}

bool BodySpec::exponents_even_int() const {
  if (family != BodyFamily::Superellipsoid) return false;
  for (double pi : p) {
    const double r = std::round(pi);
    if (std::fabs(pi - r) > 0.0) return false;
    if (std::llround(r) % 2 != 0) return false;
  }
  return true;
}

bool BodySpec::uniform_exponent() const {
  if (family != BodyFamily::Superellipsoid || p.empty()) return false;
  for (double pi : p)
    if (pi != p[0]) return false;
  return true;
}

double BodySpec::containment_radius() const {
  double c = 0.0;
  for (double bi : b) c = std::max(c, bi);
  return c;
}

void BodySpec::validate() const {
  if (dim < 1 || dim > kMaxDim) throw InputError("BodySpec: dimension must be in [1, 16]");
  if (static_cast<int>(b.size()) != dim) throw InputError("BodySpec: b must have d entries");
  for (double bi : b)
    if (!(std::isfinite(bi) && bi > 0.0)) throw InputError("BodySpec: semiaxes must be positive");
  if (family == BodyFamily::Superellipsoid) {
    if (static_cast<int>(p.size()) != dim) throw InputError("BodySpec: p must have d entries");
    for (double pi : p)
      if (!(std::isfinite(pi) && pi >= 2.0)) throw InputError("BodySpec: exponents must be >= 2");
  } else {
    if (!gauge_oracle) throw InputError("BodySpec: generic body needs a gauge oracle");
    if (max_derivative_order < 2) throw InputError("BodySpec: smoothness certificate must be >= 2");
  }
}

// ----------------------------------------------------------------- parsing

static std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

static double parse_double(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw InputError("trailing characters");
    return v;
  } catch (const InputError&) {
    throw InputError("body spec: bad number '" + s + "' in " + what);
  } catch (const std::exception&) {
    throw InputError("body spec: bad number '" + s + "' in " + what);
  }
}

static Vec parse_list(const std::string& s, const std::string& what) {
  Vec out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(trim(item), what));
  if (out.empty()) throw InputError("body spec: empty list for " + what);
  return out;
}

BodySpec parse_body_spec(const std::string& text) {
  BodySpec body;
  bool have_family = false, have_d = false, have_p = false, have_b = false;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ';')) {
    field = trim(field);
    if (field.empty()) continue;
    size_t eq = field.find('=');
    if (eq == std::string::npos) throw InputError("body spec: expected key=value, got '" + field + "'");
    std::string key = trim(field.substr(0, eq));
    std::string value = trim(field.substr(eq + 1));
    if (key == "family") {
      if (value != "superellipsoid")
        throw InputError("body spec: unknown family '" + value + "' (text form supports superellipsoid)");
      have_family = true;
    } else if (key == "d") {
      body.dim = static_cast<int>(parse_double(value, "d"));
      have_d = true;
    } else if (key == "p") {
      body.p = parse_list(value, "p");
      have_p = true;
    } else if (key == "b") {
      body.b = parse_list(value, "b");
      have_b = true;
    } else {
      throw InputError("body spec: unknown key '" + key + "'");
    }
  }
  if (!have_family || !have_d || !have_p || !have_b)
    throw InputError("body spec: family, d, p, b are all required");
  body.family = BodyFamily::Superellipsoid;
  body.validate();
  return body;
}

std::string body_spec_to_string(const BodySpec& body) {
  auto list = [](const Vec& v) {
    std::string s;
    char buf[40];
    for (size_t i = 0; i < v.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", v[i]);
      if (i) s += ',';
      s += buf;
    }
    return s;
  };
  if (body.family != BodyFamily::Superellipsoid)
    return "family=generic; d=" + std::to_string(body.dim) + "; b=" + list(body.b);
  return "family=superellipsoid; d=" + std::to_string(body.dim) + "; p=" + list(body.p) +
         "; b=" + list(body.b);
}

// ------------------------------------------------------------------- gauge

static double gauge_superellipsoid(const BodySpec& body, std::span<const double> x) {
  const int d = body.dim;
  double umax = 0.0;
  std::array<double, kMaxDim> u{};
  for (int i = 0; i < d; ++i) {
    u[static_cast<size_t>(i)] = std::fabs(x[static_cast<size_t>(i)]) / body.b[static_cast<size_t>(i)];
    umax = std::max(umax, u[static_cast<size_t>(i)]);
  }
  if (umax == 0.0) return 0.0;

  if (body.uniform_exponent()) {
    const double p = body.p[0];
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += std::pow(u[static_cast<size_t>(i)] / umax, p);
    return umax * std::pow(s, 1.0 / p);
  }

  // Mixed exponents: solve f(lam) = sum_i (u_i/(umax*lam))^{p_i} = 1 for
  // lam in [1, d^{1/pmin}]. f is convex decreasing, so Newton from the left
  // endpoint increases monotonically toward the root; a bisection bracket
  // guards the first steps.
  std::array<double, kMaxDim> w{};
  double pmin = body.p[0];
  for (int i = 0; i < d; ++i) {
    w[static_cast<size_t>(i)] = std::pow(u[static_cast<size_t>(i)] / umax, body.p[static_cast<size_t>(i)]);
    pmin = std::min(pmin, body.p[static_cast<size_t>(i)]);
  }
  double lo = 1.0, hi = std::pow(static_cast<double>(d), 1.0 / pmin) * (1.0 + 1e-12);
  double lam = 1.0;
  for (int iter = 0; iter < 200; ++iter) {
    double f = -1.0, fp = 0.0;
    for (int i = 0; i < d; ++i) {
      const double pi = body.p[static_cast<size_t>(i)];
      const double term = w[static_cast<size_t>(i)] * std::pow(lam, -pi);
      f += term;
      fp -= pi * term / lam;
    }
    if (f > 0.0)
      lo = lam;
    else
      hi = lam;
    double next = lam - f / fp;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - lam) <= 1e-16 * lam) {
      lam = next;
      break;
    }
    lam = next;
  }
  return umax * lam;
}

double gauge(const BodySpec& body, std::span<const double> x) {
  if (static_cast<int>(x.size()) != body.dim) throw InputError("gauge: dimension mismatch");
  for (double v : x)
    if (!std::isfinite(v)) throw InputError("gauge: non-finite coordinate");
  if (body.family == BodyFamily::GenericConvex) return body.gauge_oracle(x);
  return gauge_superellipsoid(body, x);
}

bool contains(const BodySpec& body, const StretchFactor& A, double t,
              std::span<const int64_t> k) {
  const detail::ScaledDomain S = detail::make_scaled(body, A, t);
  if (static_cast<int>(k.size()) != body.dim) throw InputError("contains: dimension mismatch");
  return detail::sd_contains(S, k);
}

// ----------------------------------------------------- boundary geometry

namespace detail {

double det_columns(std::vector<Vec> cols) {
  const int n = static_cast<int>(cols.size());
  double det = 1.0;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::fabs(cols[static_cast<size_t>(c)][static_cast<size_t>(r)]) >
          std::fabs(cols[static_cast<size_t>(c)][static_cast<size_t>(piv)]))
        piv = r;
    if (cols[static_cast<size_t>(c)][static_cast<size_t>(piv)] == 0.0) return 0.0;
    if (piv != c) {
      for (int j = c; j < n; ++j)
        std::swap(cols[static_cast<size_t>(j)][static_cast<size_t>(c)],
                  cols[static_cast<size_t>(j)][static_cast<size_t>(piv)]);
      det = -det;
    }
    const double pivot = cols[static_cast<size_t>(c)][static_cast<size_t>(c)];
    det *= pivot;
    for (int j = c + 1; j < n; ++j) {
      const double f = cols[static_cast<size_t>(j)][static_cast<size_t>(c)] / pivot;
      for (int r = c; r < n; ++r)
        cols[static_cast<size_t>(j)][static_cast<size_t>(r)] -=
            f * cols[static_cast<size_t>(c)][static_cast<size_t>(r)];
    }
  }
  return det;
}

}  // namespace detail

static double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

static double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

// Pivoted modified Gram-Schmidt: orthonormal basis of span(seeds) ∩ ortho_to⊥.
static std::vector<Vec> complement_basis(std::vector<Vec> cand, const std::vector<Vec>& ortho_to,
                                         int want) {
  for (auto& c : cand)
    for (const auto& w : ortho_to) {
      const double pr = dot(c, w);
      for (size_t i = 0; i < c.size(); ++i) c[i] -= pr * w[i];
    }
  std::vector<Vec> out;
  std::vector<char> used(cand.size(), 0);
  while (static_cast<int>(out.size()) < want) {
    int best = -1;
    double best_norm = 1e-8;
    for (size_t i = 0; i < cand.size(); ++i) {
      if (used[i]) continue;
      const double n = norm(cand[i]);
      if (n > best_norm) {
        best_norm = n;
        best = static_cast<int>(i);
      }
    }
    if (best < 0) throw AnalysisError("boundary frame: degenerate tangent basis");
    used[static_cast<size_t>(best)] = 1;
    Vec u = cand[static_cast<size_t>(best)];
    for (int pass = 0; pass < 2; ++pass) {  // re-orthogonalize for stability
      for (const auto& w : out) {
        const double pr = dot(u, w);
        for (size_t i = 0; i < u.size(); ++i) u[i] -= pr * w[i];
      }
    }
    const double n = norm(u);
    for (double& v : u) v /= n;
    out.push_back(std::move(u));
    for (size_t i = 0; i < cand.size(); ++i) {
      if (used[i]) continue;
      const double pr = dot(cand[i], out.back());
      for (size_t j = 0; j < cand[i].size(); ++j) cand[i][j] -= pr * out.back()[j];
    }
  }
  return out;
}

static Vec outward_normal(const BodySpec& body, const Vec& P) {
  const int d = body.dim;
  Vec g(static_cast<size_t>(d), 0.0);
  if (body.family == BodyFamily::Superellipsoid) {
    for (int i = 0; i < d; ++i) {
      const double bi = body.b[static_cast<size_t>(i)];
      const double pi = body.p[static_cast<size_t>(i)];
      const double ui = std::fabs(P[static_cast<size_t>(i)]) / bi;
      if (ui > 0.0)
        g[static_cast<size_t>(i)] =
            (pi / bi) * std::pow(ui, pi - 1.0) * (P[static_cast<size_t>(i)] > 0.0 ? 1.0 : -1.0);
    }
  } else {
    const double h = 1e-6 * std::max(1.0, norm(P));
    Vec x = P;
    for (int i = 0; i < d; ++i) {
      x[static_cast<size_t>(i)] = P[static_cast<size_t>(i)] + h;
      const double fp = gauge(body, x);
      x[static_cast<size_t>(i)] = P[static_cast<size_t>(i)] - h;
      const double fm = gauge(body, x);
      x[static_cast<size_t>(i)] = P[static_cast<size_t>(i)];
      g[static_cast<size_t>(i)] = (fp - fm) / (2.0 * h);
    }
  }
  const double gn = norm(g);
  if (!(gn > 1e-12)) throw NumericalError("boundary normal: vanishing gradient");
  for (double& v : g) v /= gn;
  return g;
}

BoundaryPoint boundary_point_from_direction(const BodySpec& body, std::span<const double> v,
                                            int section_axis) {
  body.validate();
  const int d = body.dim;
  if (d < 2) throw InputError("boundary point: requires d >= 2");
  if (static_cast<int>(v.size()) != d) throw InputError("boundary point: dimension mismatch");
  double vmax = 0.0;
  for (double c : v) {
    if (!std::isfinite(c)) throw InputError("boundary point: non-finite direction");
    vmax = std::max(vmax, std::fabs(c));
  }
  if (vmax < 1e-12) throw InputError("boundary point: zero direction");

  const double g = gauge(body, v);
  BoundaryPoint bp;
  bp.point.assign(v.begin(), v.end());
  for (double& c : bp.point) c /= g;

  // Snap tiny coordinates so section membership is decided exactly.
  double pmax = 0.0;
  for (double c : bp.point) pmax = std::max(pmax, std::fabs(c));
  for (double& c : bp.point)
    if (std::fabs(c) <= 1e-14 * pmax) c = 0.0;

  if (section_axis >= 0) {
    if (section_axis >= d) throw InputError("boundary point: section axis out of range");
    if (bp.point[static_cast<size_t>(section_axis)] != 0.0)
      throw InputError("boundary point: point does not lie on the requested section");
  } else {
    for (int i = 0; i < d; ++i)
      if (bp.point[static_cast<size_t>(i)] == 0.0) {
        section_axis = i;
        break;
      }
  }
  bp.section_axis = section_axis;

  bp.normal = outward_normal(body, bp.point);
  if (section_axis >= 0) {
    // By coordinate symmetry the normal lies in the section hyperplane.
    if (std::fabs(bp.normal[static_cast<size_t>(section_axis)]) > 1e-9)
      throw AnalysisError("boundary frame: normal not tangent to the section hyperplane");
    bp.normal[static_cast<size_t>(section_axis)] = 0.0;
    const double nn = norm(bp.normal);
    for (double& c : bp.normal) c /= nn;
  }

  auto unit_vector = [d](int i) {
    Vec e(static_cast<size_t>(d), 0.0);
    e[static_cast<size_t>(i)] = 1.0;
    return e;
  };

  if (d == 2) {
    bp.frame = {Vec{-bp.normal[1], bp.normal[0]}};
  } else if (section_axis >= 0) {
    std::vector<Vec> seeds;
    for (int i = 0; i < d; ++i)
      if (i != section_axis) seeds.push_back(unit_vector(i));
    bp.frame = complement_basis(std::move(seeds), {bp.normal}, d - 2);
    bp.frame.push_back(unit_vector(section_axis));
  } else {
    std::vector<Vec> seeds;
    for (int i = 0; i < d; ++i) seeds.push_back(unit_vector(i));
    bp.frame = complement_basis(std::move(seeds), {bp.normal}, d - 1);
  }

  // Orientation: {u_1, .., u_{d-1}, -normal} must be positively oriented.
  std::vector<Vec> cols = bp.frame;
  Vec minus_n = bp.normal;
  for (double& c : minus_n) c = -c;
  cols.push_back(minus_n);
  if (detail::det_columns(cols) < 0.0)
    for (double& c : bp.frame.back()) c = -c;

  return bp;
}

// --------------------------------------------------------- graph derivatives

namespace detail {

double graph_height(const BodySpec& body, const BoundaryPoint& P, std::span<const double> v) {
  const int d = body.dim;
  Vec x(static_cast<size_t>(d));
  auto f = [&](double s) {
    for (int i = 0; i < d; ++i)
      x[static_cast<size_t>(i)] = P.point[static_cast<size_t>(i)] + v[static_cast<size_t>(i)] -
                                  s * P.normal[static_cast<size_t>(i)];
    return gauge(body, x) - 1.0;
  };
  double fa = f(0.0);
  if (fa <= 0.0) return 0.0;
  double a = 0.0;
  double b = std::max(fa, 1e-18);
  double fb = f(b);
  int guard = 0;
  while (fb > 0.0) {
    b *= 2.0;
    fb = f(b);
    if (++guard > 80 || b > 8.0 * body.containment_radius() + 8.0)
      throw NumericalError("graph height: failed to bracket the boundary");
  }
  // Regula falsi with periodic bisection; converge to ~1e-16 absolute.
  for (int iter = 0; iter < 200 && (b - a) > 1e-16 * (1.0 + b); ++iter) {
    double m;
    if (iter % 3 == 2 || fb == fa)
      m = 0.5 * (a + b);
    else
      m = (a * fb - b * fa) / (fb - fa);
    if (!(m > a && m < b)) m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm > 0.0) {
      a = m;
      fa = fm;
    } else {
      b = m;
      fb = fm;
    }
  }
  return 0.5 * (a + b);
}

static double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

static double fd_stencil(const std::function<double(double)>& phi, int m, double h) {
  // Central difference (staggered for odd m): sum_i (-1)^i C(m,i) phi((m/2-i)h).
  double sum = 0.0;
  double binom = 1.0;
  for (int i = 0; i <= m; ++i) {
    const double off = (0.5 * m - i) * h;
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    sum += sign * binom * phi(off);
    binom = binom * (m - i) / (i + 1);
  }
  return sum / ipow(h, m);
}

static double fd_graph_derivative(const BodySpec& body, const BoundaryPoint& P,
                                  std::span<const double> x, int m) {
  const int d = body.dim;
  double xr = 0.0;
  for (double c : x) xr += c * c;
  xr = std::sqrt(xr);
  if (xr == 0.0) return 0.0;

  Vec X(static_cast<size_t>(d), 0.0);
  for (int j = 0; j < d - 1; ++j)
    for (int i = 0; i < d; ++i)
      X[static_cast<size_t>(i)] +=
          (x[static_cast<size_t>(j)] / xr) * P.frame[static_cast<size_t>(j)][static_cast<size_t>(i)];

  Vec v(static_cast<size_t>(d));
  std::function<double(double)> phi = [&](double s) {
    for (int i = 0; i < d; ++i) v[static_cast<size_t>(i)] = s * X[static_cast<size_t>(i)];
    return graph_height(body, P, v);
  };

  const double h = std::min(std::pow(std::numeric_limits<double>::epsilon(), 1.0 / (m + 2)), 0.01);
  const double a0 = fd_stencil(phi, m, h);
  const double a1 = fd_stencil(phi, m, 2.0 * h);
  const double a2 = fd_stencil(phi, m, 4.0 * h);
  const double r1 = (4.0 * a0 - a1) / 3.0;
  const double r1b = (4.0 * a1 - a2) / 3.0;
  const double r2 = (16.0 * r1 - r1b) / 15.0;
  return r2 * ipow(xr, m);
}

static double series_graph_derivative(const BodySpec& body, const BoundaryPoint& P,
                                      std::span<const double> x, int m) {
  const int d = body.dim;
  double xr = 0.0;
  for (double c : x) xr += c * c;
  xr = std::sqrt(xr);
  if (xr == 0.0) return 0.0;
  Vec X(static_cast<size_t>(d), 0.0);
  for (int j = 0; j < d - 1; ++j)
    for (int i = 0; i < d; ++i)
      X[static_cast<size_t>(i)] +=
          (x[static_cast<size_t>(j)] / xr) * P.frame[static_cast<size_t>(j)][static_cast<size_t>(i)];
  const std::vector<double> c = graph_taylor(body, P, X, m);
  return c[static_cast<size_t>(m)] * factorial(m) * ipow(xr, m);
}

double graph_derivative_via(const BodySpec& body, const BoundaryPoint& P,
                            std::span<const double> x, int order, DerivativeBackend backend) {
  body.validate();
  if (order < 0) throw InputError("graph derivative: negative order");
  if (static_cast<int>(x.size()) != body.dim - 1)
    throw InputError("graph derivative: direction must have d-1 frame coordinates");
  for (double c : x)
    if (!std::isfinite(c)) throw InputError("graph derivative: non-finite direction");
  if (static_cast<int>(P.point.size()) != body.dim ||
      static_cast<int>(P.frame.size()) != body.dim - 1)
    throw InputError("graph derivative: boundary point/frame dimension mismatch");
  if (std::fabs(gauge(body, P.point) - 1.0) > 1e-9)
    throw InputError("graph derivative: point is not on the boundary");

  if (order <= 1) return 0.0;  // Phi(0) = 0 and the tangency kills order 1

  if (backend == DerivativeBackend::Auto)
    backend = (body.family == BodyFamily::Superellipsoid && body.exponents_even_int())
                  ? DerivativeBackend::TaylorSeries
                  : DerivativeBackend::FiniteDifference;

  if (backend == DerivativeBackend::TaylorSeries) {
    if (!(body.family == BodyFamily::Superellipsoid && body.exponents_even_int()))
      throw InputError("graph derivative: Taylor backend needs even integer exponents");
    return series_graph_derivative(body, P, x, order);
  }
  if (body.family == BodyFamily::GenericConvex && order > body.max_derivative_order)
    throw InputError("graph derivative: order exceeds the smoothness certificate");
  return fd_graph_derivative(body, P, x, order);
}

}  // namespace detail

double graph_derivative(const BodySpec& body, const BoundaryPoint& P,
                        std::span<const double> x, int order) {
  return detail::graph_derivative_via(body, P, x, order, detail::DerivativeBackend::Auto);
}

}  // namespace stretchlat
