#include "stretchlat/measure.hpp"

#include <cmath>
#include <functional>

namespace stretchlat {

// ------------------------------------------------- 16-point Gauss-Legendre

static constexpr int kGL = 8;
static constexpr double kGLx[kGL] = {
    0.0950125098376374401853193, 0.2816035507792589132304605, 0.4580167776572273863424194,
    0.6178762444026437484466718, 0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542,
};
static constexpr double kGLw[kGL] = {
    0.1894506104550684962853967, 0.1826034150449235888667637, 0.1691565193950025381893121,
    0.1495959888165767320815017, 0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806,
};

static double gl_panels(const std::function<double(double)>& f, double a, double b, int panels) {
  const double w = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * w;
    for (int i = 0; i < kGL; ++i)
      sum += kGLw[i] * (f(mid + 0.5 * w * kGLx[i]) + f(mid - 0.5 * w * kGLx[i]));
  }
  return sum * 0.5 * w;
}

static double adaptive_gl(const std::function<double(double)>& f, double a, double b,
                          double rel_tol) {
  double prev = gl_panels(f, a, b, 1);
  for (int panels = 2; panels <= 4096; panels *= 2) {
    const double cur = gl_panels(f, a, b, panels);
    if (std::fabs(cur - prev) <= rel_tol * (std::fabs(cur) + 1e-300)) return cur;
    prev = cur;
  }
  throw NumericalError("quadrature did not reach the requested tolerance");
}

// ------------------------------------------------------------------ volume

static double volume_closed_form(const BodySpec& body) {
  double inv_sum = 0.0, logv = 0.0;
  for (int i = 0; i < body.dim; ++i) {
    const double pi = body.p[static_cast<size_t>(i)];
    inv_sum += 1.0 / pi;
    logv += std::log(2.0 * body.b[static_cast<size_t>(i)]) + std::lgamma(1.0 + 1.0 / pi);
  }
  logv -= std::lgamma(1.0 + inv_sum);
  return std::exp(logv);
}

static double volume_quadrature(const BodySpec& body) {
  const int d = body.dim;
  if (d == 1) {
    const double x[1] = {1.0};
    return 2.0 / gauge(body, std::span<const double>(x, 1));
  }
  if (d == 2) {
    auto f = [&](double th) {
      const double x[2] = {std::cos(th), std::sin(th)};
      const double r = 1.0 / gauge(body, std::span<const double>(x, 2));
      return r * r;
    };
    return 2.0 * adaptive_gl(f, 0.0, std::asin(1.0), 1e-9);
  }
  if (d == 3) {
    // octant, spherical: V = 8/3 * Int r^3 sin(phi) dphi dtheta
    auto outer = [&](double th) {
      auto inner = [&](double ph) {
        const double x[3] = {std::sin(ph) * std::cos(th), std::sin(ph) * std::sin(th),
                             std::cos(ph)};
        const double r = 1.0 / gauge(body, std::span<const double>(x, 3));
        return r * r * r * std::sin(ph);
      };
      return adaptive_gl(inner, 0.0, std::asin(1.0), 1e-10);
    };
    return (8.0 / 3.0) * adaptive_gl(outer, 0.0, std::asin(1.0), 1e-9);
  }
  throw InputError("volume quadrature supports d <= 3");
}

double volume(const BodySpec& body) {
  body.validate();
  if (body.family == BodyFamily::Superellipsoid) return volume_closed_form(body);
  return volume_quadrature(body);
}

BodySpec section_body(const BodySpec& body, int j) {
  body.validate();
  if (j < 0 || j >= body.dim) throw InputError("section axis out of range");
  if (body.dim < 2) throw InputError("section of a 1-dimensional body");
  BodySpec s;
  s.family = body.family;
  s.dim = body.dim - 1;
  s.max_derivative_order = body.max_derivative_order;
  for (int i = 0; i < body.dim; ++i) {
    if (i == j) continue;
    s.b.push_back(body.b[static_cast<size_t>(i)]);
    if (body.family == BodyFamily::Superellipsoid) s.p.push_back(body.p[static_cast<size_t>(i)]);
  }
  if (body.family == BodyFamily::GenericConvex) {
    const int full_dim = body.dim;
    s.gauge_oracle = [oracle = body.gauge_oracle, j, full_dim](std::span<const double> y) {
      std::vector<double> x(static_cast<size_t>(full_dim), 0.0);
      size_t q = 0;
      for (int i = 0; i < full_dim; ++i)
        if (i != j) x[static_cast<size_t>(i)] = y[q++];
      return oracle(x);
    };
  }
  return s;
}

double section_measure(const BodySpec& body, int j) { return volume(section_body(body, j)); }

SectionMeasures section_measures(const BodySpec& body) {
  SectionMeasures m;
  m.volume = volume(body);
  m.sections.resize(static_cast<size_t>(body.dim));
  for (int j = 0; j < body.dim; ++j) m.sections[static_cast<size_t>(j)] = section_measure(body, j);
  m.method = body.family == BodyFamily::Superellipsoid ? MeasureMethod::ClosedForm
                                                       : MeasureMethod::Quadrature;
  return m;
}

StretchFactor balanced_factor(const BodySpec& body) {
  body.validate();
  if (body.dim < 2) throw InputError("balanced factor needs d >= 2");
  std::vector<double> a(static_cast<size_t>(body.dim));
  double logsum = 0.0;
  for (int j = 0; j < body.dim; ++j) {
    a[static_cast<size_t>(j)] = section_measure(body, j);
    logsum += std::log(a[static_cast<size_t>(j)]);
  }
  const double g = std::exp(logsum / body.dim);
  for (double& v : a) v /= g;
  return StretchFactor::from_diag(std::move(a));
}

}  // namespace stretchlat
