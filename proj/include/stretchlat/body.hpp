#pragma once
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "stretchlat/errors.hpp"
#include "stretchlat/stretch.hpp"

namespace stretchlat {

using Vec = std::vector<double>;

enum class BodyFamily { Superellipsoid, GenericConvex };

// A compact convex body with 0 in the interior, symmetric about every
// coordinate hyperplane, described through its gauge (Minkowski functional)
// gauge(x) = inf { s > 0 : x in s*Omega }.
//
// Superellipsoid: { x : sum_i |x_i/b_i|^{p_i} <= 1 }, p_i >= 2, b_i > 0.
// GenericConvex: caller-supplied gauge oracle. The caller certifies symmetry,
// convexity and smoothness up to `max_derivative_order`; `b` must bound the
// body per axis (|x_i| <= b_i whenever gauge(x) <= 1), with equality preferred
// since counting ranges are derived from it.
struct BodySpec {
  BodyFamily family = BodyFamily::Superellipsoid;
  int dim = 0;
  Vec p;
  Vec b;
  std::function<double(std::span<const double>)> gauge_oracle;
  int max_derivative_order = 12;

  static BodySpec superellipsoid(Vec p, Vec b);
  static BodySpec generic(int dim, std::function<double(std::span<const double>)> gauge,
                          int max_derivative_order, Vec box);

  bool exponents_even_int() const;  // all p_i even integers (exact arithmetic available)
  bool uniform_exponent() const;    // all p_i equal
  double containment_radius() const;
  void validate() const;            // throws InputError
};

// Text form: "family=superellipsoid; d=3; p=4,4,2; b=1,1,1".
BodySpec parse_body_spec(const std::string& text);
std::string body_spec_to_string(const BodySpec& body);

// Gauge functional; 1-homogeneous, 0 only at 0. Relative accuracy ~1e-14 for
// superellipsoids (closed form for uniform p, safeguarded Newton otherwise).
double gauge(const BodySpec& body, std::span<const double> x);

// Membership of an integer point in the closed stretched dilate t*A*Omega.
// For superellipsoids with even integer exponents, points whose membership sum
// lands within 1e-9 of the boundary are decided in exact rational arithmetic.
bool contains(const BodySpec& body, const StretchFactor& A, double t,
              std::span<const int64_t> k);

// A boundary point with an adapted orthonormal frame: `frame` holds d-1
// tangent vectors and {frame[0..d-2], -normal} is positively oriented. When
// section_axis = j >= 0 the point lies on the section {x_j = 0} and
// frame[0..d-3] spans the tangent space of that section curve/surface.
struct BoundaryPoint {
  Vec point;
  Vec normal;
  std::vector<Vec> frame;
  int section_axis = -1;
};

// Scales v onto the boundary (gauge = 1) and builds the adapted frame.
// section_axis = -1 auto-detects the lowest vanishing coordinate, if any.
BoundaryPoint boundary_point_from_direction(const BodySpec& body, std::span<const double> v,
                                            int section_axis = -1);

// j-th derivative (d/ds)^j Phi(s x)|_{s=0} of the boundary graph over the
// tangent plane at P; x is given in frame coordinates. Superellipsoids with
// even integer exponents use an exact-coefficient Taylor solve of the defining
// polynomial; other bodies fall back to Richardson-extrapolated finite
// differences (orders above ~6 get noisy there, bounded by the certificate).
double graph_derivative(const BodySpec& body, const BoundaryPoint& P,
                        std::span<const double> x, int order);

namespace detail {

enum class DerivativeBackend { Auto, TaylorSeries, FiniteDifference };

double graph_derivative_via(const BodySpec& body, const BoundaryPoint& P,
                            std::span<const double> x, int order, DerivativeBackend backend);

// Graph height phi solving gauge(P + v - phi * normal) = 1 for a tangent
// offset v (ambient coordinates), by bracketing + bisection/secant.
double graph_height(const BodySpec& body, const BoundaryPoint& P, std::span<const double> v);

double det_columns(std::vector<Vec> cols);  // small dense determinant, partial pivoting

}  // namespace detail
}  // namespace stretchlat
