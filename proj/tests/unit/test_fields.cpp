#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "ghlab/fields.hpp"

using namespace ghl;
using ghl::testing::Gen;
using ghl::testing::max_abs_diff;

namespace {

FieldConfig with_weak(FieldSpec e, FieldSpec b, double eps = 0.1,
                      std::optional<UnitAxis> drift = std::nullopt) {
  return FieldConfig(eps, UnitAxis(e1), drift, e, b, 2.0);
}

}  // namespace

TEST_SUITE("fields") {

TEST_CASE("weak field examples") {
  const FieldConfig c = with_weak(FieldSpec::uniform({1, 0, 0}), FieldSpec::zero());
  const FieldSample s = c.eval_weak(0.7, {3, -2, 5});
  CHECK(s.E == Vec3{1, 0, 0});
  CHECK(s.B == Vec3{0, 0, 0});

  const FieldSpec gauss = FieldSpec::gaussian({1, 0, 0}, {0, 0, 0}, 1.0);
  CHECK(gauss(0.0, {0, 0, 0}) == Vec3{1, 0, 0});
  CHECK(std::abs(gauss(0.0, {1, 1, 0}).x - std::exp(-2.0)) < 1e-15);

  const double b0 = 0.37;
  const FieldConfig cb = with_weak(FieldSpec::zero(), FieldSpec::uniform({b0, 0, 0}));
  CHECK(cb.eval_weak(1.9, {1, 2, 3}).B == Vec3{b0, 0, 0});

  const FieldSpec trig = FieldSpec::trig({0, 2, 0}, {1, 0, 0}, 0.5, 0.25);
  CHECK(std::abs(trig(0.4, {0.3, 0, 0}).y - 2.0 * std::cos(0.3 - 0.2 + 0.25)) < 1e-15);
}

TEST_CASE("evaluation outside the horizon is rejected") {
  const FieldConfig c = with_weak(FieldSpec::uniform({1, 0, 0}), FieldSpec::zero());
  CHECK_THROWS_AS(c.eval_weak(-1e-3, {}), std::out_of_range);
  CHECK_THROWS_AS(c.eval_weak(2.5, {}), std::out_of_range);
  CHECK_NOTHROW(c.eval_weak(2.0, {}));
}

TEST_CASE("configuration invariants") {
  CHECK_THROWS_AS(FieldConfig::strong_only(0.0, UnitAxis(e1), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(FieldConfig::strong_only(-0.1, UnitAxis(e1), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(FieldConfig::strong_only(0.1, UnitAxis(e1), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(FieldConfig::strong_only(0.1, UnitAxis(e1), 1.0, UnitAxis::normalized({1, 1, 0})),
                  std::invalid_argument);
  CHECK_NOTHROW(FieldConfig::strong_only(0.1, UnitAxis(e1), 1.0, UnitAxis(e2)));
  CHECK_THROWS_AS(with_weak(FieldSpec::gaussian({1, 0, 0}, {}, 0.0), FieldSpec::zero()),
                  std::invalid_argument);
  CHECK_THROWS_AS(with_weak(FieldSpec::uniform({NAN, 0, 0}), FieldSpec::zero()), std::invalid_argument);
}

TEST_CASE("field kind names round trip") {
  for (FieldKind k : {FieldKind::zero, FieldKind::uniform, FieldKind::gaussian, FieldKind::trig}) {
    CHECK(field_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(field_kind_from_string("dipole"), std::invalid_argument);
}

TEST_CASE("total force examples") {
  const FieldConfig c = FieldConfig::strong_only(0.3, UnitAxis(e1), 1.0);
  CHECK(c.total_force(0.0, {}, e1) == Vec3{0, 0, 0});
  const FieldConfig c1 = FieldConfig::strong_only(1.0, UnitAxis(e1), 1.0);
  CHECK(max_abs_diff(c1.total_force(0.0, {}, e2), cross(e2, e1)) == 0.0);
  CHECK(max_abs_diff(c1.total_force(0.0, {}, e2), {0, 0, -1}) == 0.0);
  const FieldConfig cd = FieldConfig::strong_only(0.5, UnitAxis(e1), 1.0, UnitAxis(e2));
  CHECK(max_abs_diff(cd.total_force(0.0, {}, {}), {0, 2, 0}) < 1e-15);
}

TEST_CASE("total force has zero velocity divergence") {
  Gen g;
  const double h = 1e-4;
  for (int i = 0; i < 500; ++i) {
    const UnitAxis m = g.axis();
    const bool drift = i % 2 == 1;
    const FieldConfig c(g.uniform(0.01, 1.0), m, drift ? std::optional(g.perpendicular(m)) : std::nullopt,
                        FieldSpec::trig(g.vec(1.0), g.vec(3.0), g.uniform(-1, 1), g.uniform(0, 3)),
                        FieldSpec::gaussian(g.vec(1.0), g.vec(1.0), g.uniform(0.5, 2.0)), 1.0);
    const double t = g.uniform(0.0, 1.0);
    const Vec3 x = g.vec(2.0), v = g.vec(3.0);
    double div = 0.0;
    for (int a = 0; a < 3; ++a) {
      Vec3 vp = v, vm = v;
      vp[a] += h;
      vm[a] -= h;
      div += (c.total_force(t, x, vp)[a] - c.total_force(t, x, vm)[a]) / (2.0 * h);
    }
    CHECK(std::abs(div) < 1e-6);
  }
}

}  // TEST_SUITE
