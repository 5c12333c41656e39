#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "stretchlat/body.hpp"
#include "stretchlat/measure.hpp"

using namespace stretchlat;

namespace {

constexpr double kPi = std::numbers::pi;

// Independent evaluation of the Dirichlet-integral closed form
// vol = 2^d (prod b_i) (prod Gamma(1+1/p_i)) / Gamma(1 + sum 1/p_i).
double gamma_form_volume(const Vec& p, const Vec& b) {
  double v = 1.0, inv_sum = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    v *= 2.0 * b[i] * std::tgamma(1.0 + 1.0 / p[i]);
    inv_sum += 1.0 / p[i];
  }
  return v / std::tgamma(1.0 + inv_sum);
}

// Monte Carlo volume over the bounding box with a fixed seed.
double mc_volume(const BodySpec& body, int n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  double box = 1.0;
  std::vector<std::uniform_real_distribution<double>> dist;
  for (int i = 0; i < body.dim; ++i) {
    box *= 2.0 * body.b[i];
    dist.emplace_back(-body.b[i], body.b[i]);
  }
  int64_t hits = 0;
  std::vector<double> x(body.dim);
  for (int s = 0; s < n; ++s) {
    for (int i = 0; i < body.dim; ++i) x[i] = dist[i](rng);
    if (gauge(body, x) <= 1.0) ++hits;
  }
  return box * static_cast<double>(hits) / n;
}

BodySpec generic_ellipse() {
  return BodySpec::generic(
      2, [](std::span<const double> x) { return std::sqrt(x[0] * x[0] / 4.0 + x[1] * x[1]); },
      12, {2.0, 1.0});
}

BodySpec generic_ball() {
  return BodySpec::generic(
      3,
      [](std::span<const double> x) {
        return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
      },
      12, {1.0, 1.0, 1.0});
}

}  // namespace

TEST_CASE("closed-form volumes") {
  CHECK(volume(BodySpec::superellipsoid({2, 2}, {1, 1})) == doctest::Approx(kPi).epsilon(1e-14));
  CHECK(volume(BodySpec::superellipsoid({2, 2}, {2, 1})) ==
        doctest::Approx(2.0 * kPi).epsilon(1e-14));
  CHECK(volume(BodySpec::superellipsoid({2, 2, 2}, {1, 1, 1})) ==
        doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-14));

  for (const auto& [p, b] : std::vector<std::pair<Vec, Vec>>{
           {{4, 4}, {1, 1}},
           {{2, 4}, {1.5, 0.7}},
           {{4, 4, 4}, {1, 1, 2}},
           {{6, 2, 4}, {0.5, 2, 1}},
           {{3.5, 5}, {1, 1}},  // fractional exponents use the same formula
       }) {
    const BodySpec body = BodySpec::superellipsoid(p, b);
    CHECK(volume(body) == doctest::Approx(gamma_form_volume(p, b)).epsilon(1e-12));
  }
}

TEST_CASE("volumes agree with Monte Carlo") {
  // 2e6 samples give ~4 sigma of roughly 1e-2 relative here.
  const BodySpec a = BodySpec::superellipsoid({2, 4}, {1.5, 0.7});
  CHECK(volume(a) == doctest::Approx(mc_volume(a, 2000000, 11)).epsilon(0.01));
  const BodySpec c = BodySpec::superellipsoid({4, 2, 6}, {1, 0.5, 2});
  CHECK(volume(c) == doctest::Approx(mc_volume(c, 2000000, 13)).epsilon(0.015));
}

TEST_CASE("generic bodies integrate to the closed form") {
  CHECK(volume(generic_ellipse()) == doctest::Approx(2.0 * kPi).epsilon(1e-6));
  CHECK(volume(generic_ball()) == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-6));
  const SectionMeasures sm = section_measures(generic_ellipse());
  CHECK(sm.method == MeasureMethod::Quadrature);
  CHECK(sm.sections[0] == doctest::Approx(2.0).epsilon(1e-6));  // {x_1 = 0}: |y| <= 1
  CHECK(sm.sections[1] == doctest::Approx(4.0).epsilon(1e-6));  // {x_2 = 0}: |x| <= 2
}

TEST_CASE("section measures and section bodies") {
  const BodySpec body = BodySpec::superellipsoid({4, 4, 2}, {1, 1, 3});
  const SectionMeasures sm = section_measures(body);
  REQUIRE(sm.sections.size() == 3);
  CHECK(sm.method == MeasureMethod::ClosedForm);
  // Section by {x_3 = 0} is the quartic disc; by {x_1 = 0} a (4,2) body with b=(1,3).
  CHECK(sm.sections[2] == doctest::Approx(gamma_form_volume({4, 4}, {1, 1})).epsilon(1e-12));
  CHECK(sm.sections[0] == doctest::Approx(gamma_form_volume({4, 2}, {1, 3})).epsilon(1e-12));
  CHECK(section_measure(body, 1) == doctest::Approx(sm.sections[1]).epsilon(1e-14));

  const BodySpec s0 = section_body(body, 0);
  CHECK(s0.dim == 2);
  CHECK(s0.p == Vec{4, 2});
  CHECK(s0.b == Vec{1, 3});
  const BodySpec s2 = section_body(body, 2);
  CHECK(s2.p == Vec{4, 4});
  CHECK(s2.b == Vec{1, 1});

  // 2-d sections are segments of length 2 b_other.
  const SectionMeasures sm2 = section_measures(BodySpec::superellipsoid({2, 4}, {1.5, 0.7}));
  CHECK(sm2.sections[0] == doctest::Approx(1.4).epsilon(1e-14));
  CHECK(sm2.sections[1] == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("balanced stretch equalizes sections") {
  // Ellipse b=(2, 1/2): sections (1, 4), so B = (1/2, 2).
  const BodySpec ell = BodySpec::superellipsoid({2, 2}, {2, 0.5});
  const StretchFactor B = balanced_factor(ell);
  CHECK(B.diag[0] == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(B.diag[1] == doctest::Approx(2.0).epsilon(1e-13));

  // p=4 ball with b=(1,1,2): sections scale (2,2,1), B = (2^{1/3}, 2^{1/3}, 2^{-2/3}).
  const BodySpec q = BodySpec::superellipsoid({4, 4, 4}, {1, 1, 2});
  const StretchFactor Bq = balanced_factor(q);
  CHECK(Bq.diag[0] == doctest::Approx(std::pow(2.0, 1.0 / 3.0)).epsilon(1e-13));
  CHECK(Bq.diag[1] == doctest::Approx(std::pow(2.0, 1.0 / 3.0)).epsilon(1e-13));
  CHECK(Bq.diag[2] == doctest::Approx(std::pow(2.0, -2.0 / 3.0)).epsilon(1e-13));

  // det B = 1 and the stretched body B*Omega has equal sections: |Omega_j|
  // scales by prod_{i != j} B_ii = 1/B_jj.
  for (const BodySpec& body : {BodySpec::superellipsoid({2, 4, 6}, {0.8, 1.7, 0.6}),
                               BodySpec::superellipsoid({2, 2}, {3, 0.4})}) {
    const StretchFactor B2 = balanced_factor(body);
    double det = 1.0;
    for (double x : B2.diag) det *= x;
    CHECK(det == doctest::Approx(1.0).epsilon(1e-12));
    const SectionMeasures sm = section_measures(body);
    Vec scaled(body.dim);
    for (int j = 0; j < body.dim; ++j) scaled[j] = sm.sections[j] / B2.diag[j];
    for (int j = 1; j < body.dim; ++j)
      CHECK(scaled[j] == doctest::Approx(scaled[0]).epsilon(1e-12));
  }

  // A body that is already balanced has B = identity.
  const StretchFactor Bd = balanced_factor(BodySpec::superellipsoid({2, 2}, {1, 1}));
  CHECK(Bd.diag[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(Bd.diag[1] == doctest::Approx(1.0).epsilon(1e-14));
}
