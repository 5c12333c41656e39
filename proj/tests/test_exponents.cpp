#include <cmath>
#include <vector>

#include "doctest.h"
#include "stretchlat/body.hpp"
#include "stretchlat/errors.hpp"
#include "stretchlat/exponents.hpp"

using namespace stretchlat;

namespace {

std::vector<int> mt(const BodySpec& body, std::vector<double> v,
                    MultitypeStrategy strategy = MultitypeStrategy::Auto) {
  const BoundaryPoint P = boundary_point_from_direction(body, v, -1);
  return multitype_at(body, P, strategy).multitype;
}

}  // namespace

TEST_CASE("multitype at axis and diagonal points") {
  const BodySpec quartic = BodySpec::superellipsoid({4, 4}, {1, 1});
  CHECK(mt(quartic, {1, 0}) == std::vector<int>{4});
  CHECK(mt(quartic, {0, 1}) == std::vector<int>{4});
  CHECK(mt(quartic, {1, 1}) == std::vector<int>{2});
  CHECK(mt(quartic, {1, -0.3}) == std::vector<int>{2});

  // Mixed exponents: degeneracy sits only at the quartic axis.
  const BodySpec mixed = BodySpec::superellipsoid({2, 4}, {1, 1});
  CHECK(mt(mixed, {1, 0}) == std::vector<int>{4});
  CHECK(mt(mixed, {0, 1}) == std::vector<int>{2});
  CHECK(mt(mixed, {1, 1}) == std::vector<int>{2});

  const BodySpec body3 = BodySpec::superellipsoid({4, 4, 2}, {1, 1, 1});
  CHECK(mt(body3, {1, 0, 0}) == std::vector<int>{2, 4});
  CHECK(mt(body3, {0, 1, 0}) == std::vector<int>{2, 4});
  CHECK(mt(body3, {0, 0, 1}) == std::vector<int>{4, 4});
  CHECK(mt(body3, {1, 1, 0}) == std::vector<int>{2, 2});

  // nu and nu_tail follow the sorted orders.
  const BoundaryPoint e1 = boundary_point_from_direction(body3, std::vector<double>{1, 0, 0});
  const MultitypeReport r1 = multitype_at(body3, e1);
  CHECK(r1.nu == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(r1.nu_tail == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(nu_at(body3, e1).first == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(nu_at(body3, e1).second == doctest::Approx(0.25).epsilon(1e-12));

  const BoundaryPoint e3 = boundary_point_from_direction(body3, std::vector<double>{0, 0, 1});
  const MultitypeReport r3 = multitype_at(body3, e3);
  CHECK(r3.nu == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r3.nu_tail == doctest::Approx(0.25).epsilon(1e-12));

  // The flag records what survives each order: past order 2 only the quartic
  // direction stays flat, past order 4 nothing does.
  REQUIRE(r1.flag.size() == 2);
  CHECK(r1.flag.front().order == 2);
  CHECK(r1.flag.front().basis.size() == 1);
  CHECK(r1.flag.back().order == 4);
  CHECK(r1.flag.back().basis.empty());
}

TEST_CASE("analytic and numeric strategies agree") {
  const BodySpec body = BodySpec::superellipsoid({2, 4, 6}, {1.0, 0.5, 2.0});
  for (const std::vector<double>& v :
       {std::vector<double>{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {0, 1, 1},
        {1, 0, 1}, {1, 1, 1}, {0.3, -0.8, 0.52}, {-1, 0.1, 0.1}}) {
    const BoundaryPoint P = boundary_point_from_direction(body, v, -1);
    const MultitypeReport both = multitype_at(body, P, MultitypeStrategy::Both);
    const MultitypeReport ana = multitype_at(body, P, MultitypeStrategy::Analytic);
    const MultitypeReport num = multitype_at(body, P, MultitypeStrategy::Numeric);
    CHECK(both.multitype == ana.multitype);
    CHECK(both.multitype == num.multitype);
  }
  CHECK_THROWS_AS(
      mt(BodySpec::generic(
             2, [](std::span<const double> x) { return std::hypot(x[0], x[1]); }, 8, {1, 1}),
         {1, 0}, MultitypeStrategy::Analytic),
      InputError);
}

TEST_CASE("exponent tables of the reference bodies") {
  struct Row {
    BodySpec body;
    double nu, mu, gamma;
  };
  const std::vector<Row> rows = {
      {BodySpec::superellipsoid({2, 2}, {1, 1}), 0.5, 0.5, 1.0 / 6.0},
      {BodySpec::superellipsoid({4, 4}, {1, 1}), 0.25, 0.5, 0.125},
      {BodySpec::superellipsoid({2, 2, 2}, {1, 1, 1}), 1.0, 1.0, 0.25},
      {BodySpec::superellipsoid({4, 4, 4}, {1, 1, 1}), 0.5, 0.75, 1.0 / 6.0},
  };
  for (const Row& row : rows) {
    const ExponentReport rep = exponent_report(row.body);
    CHECK(rep.nu == doctest::Approx(row.nu).epsilon(1e-9));
    CHECK(rep.mu == doctest::Approx(row.mu).epsilon(1e-9));
    CHECK(rep.gamma == doctest::Approx(row.gamma).epsilon(1e-9));
    CHECK(rep.sample_count > 0);
    // gamma = min{ nu/2, mu/(2(d - mu)) } by definition.
    const double d = row.body.dim;
    CHECK(rep.gamma ==
          doctest::Approx(std::min(rep.nu / 2.0, rep.mu / (2.0 * (d - rep.mu)))).epsilon(1e-12));
    // The minimizers are genuine boundary points achieving the minima.
    CHECK(nu_at(row.body, rep.nu_minimizer).first == doctest::Approx(rep.nu).epsilon(1e-9));
    CHECK(0.5 + nu_at(row.body, rep.mu_minimizer).second ==
          doctest::Approx(rep.mu).epsilon(1e-9));
  }

  // Half-axis lengths do not change the exponents.
  const ExponentReport stretched =
      exponent_report(BodySpec::superellipsoid({4, 4, 4}, {1, 1, 2}));
  CHECK(stretched.nu == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(stretched.mu == doctest::Approx(0.75).epsilon(1e-9));
}

TEST_CASE("exponent report invariants") {
  for (const BodySpec& body :
       {BodySpec::superellipsoid({4, 4, 2}, {1, 1, 1}),
        BodySpec::superellipsoid({2, 4, 4}, {1, 1, 1}),
        BodySpec::superellipsoid({2, 6}, {1.3, 0.4})}) {
    const ExponentReport rep = exponent_report(body);
    const double d = body.dim;
    // Each order is >= 2, so nu <= (d-1)/2, with equality iff every sampled
    // point has a nondegenerate second fundamental form.
    CHECK(rep.nu <= (d - 1) / 2.0 + 1e-12);
    CHECK(rep.mu <= d / 2.0 + 1e-12);
    CHECK(rep.gamma > 0.0);
    CHECK(rep.gamma <= rep.nu / 2.0 + 1e-12);
  }

  // Permuting the axes permutes nothing that matters.
  const ExponentReport a = exponent_report(BodySpec::superellipsoid({4, 4, 2}, {1, 1, 1}));
  const ExponentReport b = exponent_report(BodySpec::superellipsoid({2, 4, 4}, {1, 1, 1}));
  CHECK(a.nu == doctest::Approx(b.nu).epsilon(1e-9));
  CHECK(a.mu == doctest::Approx(b.mu).epsilon(1e-9));
  CHECK(a.gamma == doctest::Approx(b.gamma).epsilon(1e-9));
  CHECK(a.nu == doctest::Approx(0.5).epsilon(1e-9));   // {4,4} at e3
  CHECK(a.mu == doctest::Approx(0.75).epsilon(1e-9));  // tail 1/4 at the quartic axes

  // The sphere is the nondegenerate case: nu = (d-1)/2 exactly.
  const ExponentReport s = exponent_report(BodySpec::superellipsoid({2, 2, 2}, {1, 2, 3}));
  CHECK(s.nu == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("numeric strategy rejects directions flat beyond the derivative cap") {
  // p = 10 twin probed only up to order 8: the axis direction never certifies.
  const BodySpec flat = BodySpec::generic(
      2,
      [](std::span<const double> x) {
        return std::pow(std::pow(std::fabs(x[0]), 10) + std::pow(std::fabs(x[1]), 10), 0.1);
      },
      8, {1, 1});
  CHECK_THROWS_AS(mt(flat, {1, 0}, MultitypeStrategy::Numeric), AnalysisError);
  // Away from the axes the same body is curved and certifies fine.
  CHECK(mt(flat, {1, 1}, MultitypeStrategy::Numeric) == std::vector<int>{2});
}

TEST_CASE("section multitype interlacing") {
  const BodySpec body = BodySpec::superellipsoid({4, 4, 2}, {1, 1, 1});
  // P = e1 lies on the section {x_3 = 0}; the section is the quartic disc.
  const BoundaryPoint P =
      boundary_point_from_direction(body, std::vector<double>{1, 0, 0}, 2);
  const SectionMultitypeCheck chk = section_multitype_check(body, 2, P);
  CHECK(chk.section_multitype == std::vector<int>{4});
  CHECK(chk.full_multitype == std::vector<int>{2, 4});
  CHECK(chk.holds);

  const BoundaryPoint Pd =
      boundary_point_from_direction(body, std::vector<double>{1, 1, 0}, 2);
  const SectionMultitypeCheck chk2 = section_multitype_check(body, 2, Pd);
  CHECK(chk2.section_multitype == std::vector<int>{2});
  CHECK(chk2.full_multitype == std::vector<int>{2, 2});
  CHECK(chk2.holds);

  CHECK_THROWS_AS(section_multitype_check(BodySpec::superellipsoid({2, 2}, {1, 1}), 0,
                                          boundary_point_from_direction(
                                              BodySpec::superellipsoid({2, 2}, {1, 1}),
                                              std::vector<double>{0, 1}, 0)),
                  InputError);
  // Point not on the requested section.
  CHECK_THROWS_AS(
      section_multitype_check(body, 0,
                              boundary_point_from_direction(body, std::vector<double>{1, 0, 0})),
      InputError);
}
