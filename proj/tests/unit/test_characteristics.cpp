#include <doctest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "ghlab/characteristics.hpp"
#include "oracles.hpp"

using namespace ghl;
using ghl::testing::Gen;
using ghl::testing::helix_e1;
using ghl::testing::max_abs_diff;

namespace {

constexpr double pi = std::numbers::pi;

double phase_distance(const PhasePoint& a, const PhasePoint& b) {
  return std::max(max_abs_diff(a.x, b.x), max_abs_diff(a.v, b.v));
}

IntegratorSettings split(double dt) {
  IntegratorSettings s;
  s.dt = dt;
  return s;
}

IntegratorSettings rk4(double eps, int per_period) {
  IntegratorSettings s;
  s.scheme = Scheme::rk4_oracle;
  s.substeps_per_gyroperiod = per_period;
  s.dt = 2.0 * pi * eps / per_period;
  return s;
}

FieldConfig smooth_fields(double eps, double horizon = 1.0,
                          std::optional<UnitAxis> drift = std::nullopt) {
  return FieldConfig(eps, UnitAxis(e1), drift,
                     FieldSpec::trig({0.3, 0.2, -0.1}, {1.0, 0.5, -0.7}, 0.8, 0.1),
                     FieldSpec::trig({0.2, -0.1, 0.15}, {-0.4, 0.9, 0.3}, 0.5, 0.3), horizon);
}

}  // namespace

TEST_SUITE("characteristics") {

TEST_CASE("fast flow examples") {
  const UnitAxis m(e1);
  const Vec3 v{0.3, -1.2, 0.7};
  CHECK(max_abs_diff(fast_flow(v, 0.4, 0.4, m), v) == 0.0);
  CHECK(max_abs_diff(fast_flow({0, 1, 0}, pi / 2, 0.0, m), {0, 0, -1}) < 1e-15);
  CHECK(max_abs_diff(fast_flow(v, 1.1 + 2 * pi, 0.2, m), fast_flow(v, 1.1, 0.2, m)) < 1e-14);
}

TEST_CASE("fast flow matches its closed form and the rotation") {
  Gen g;
  const UnitAxis m(e1);
  for (int i = 0; i < 500; ++i) {
    const Vec3 v = g.vec(3.0);
    const double tau = g.angle(), s = g.angle();
    const double d = tau - s;
    const Vec3 expected{v.x, v.y * std::cos(d) + v.z * std::sin(d), -v.y * std::sin(d) + v.z * std::cos(d)};
    CHECK(max_abs_diff(fast_flow(v, tau, s, m), expected) < 1e-13);
    const UnitAxis a = g.axis();
    CHECK(max_abs_diff(fast_flow(v, 0.0, tau, a), rotate_about_axis(v, tau, a)) < 1e-13);
  }
}

TEST_CASE("fast flow solves dV/dtau = V x M") {
  Gen g;
  const double h = 1e-5;
  for (int i = 0; i < 200; ++i) {
    const UnitAxis m = g.axis();
    const Vec3 v = g.vec(2.0);
    const double tau = g.angle(), s = g.angle();
    const Vec3 d = (fast_flow(v, tau + h, s, m) - fast_flow(v, tau - h, s, m)) / (2 * h);
    CHECK(max_abs_diff(d, cross(fast_flow(v, tau, s, m), m.direction())) < 1e-8);
  }
}

TEST_CASE("drift flow examples") {
  const UnitAxis m(e1), n(e2);
  const Vec3 v{0.5, 0.2, -0.4};
  CHECK(max_abs_diff(fast_flow_drift(v, 0.9, 0.9, m, n), v) < 1e-15);
  CHECK(max_abs_diff(fast_flow_drift({0, 0, 0}, 0.0, pi / 2, m, n), {0, -1, -1}) < 1e-15);
  CHECK(max_abs_diff(fast_flow_drift(v, 0.3 + 2 * pi, 1.0, m, n), fast_flow_drift(v, 0.3, 1.0, m, n)) <
        1e-14);
  CHECK_THROWS_AS(fast_flow_drift(v, 0.0, 1.0, m, UnitAxis::normalized({1, 1, 0})), std::invalid_argument);
}

TEST_CASE("drift flow matches its closed form and solves dV/dtau = n + V x M") {
  Gen g;
  const UnitAxis m(e1), n(e2);
  const double h = 1e-5;
  for (int i = 0; i < 500; ++i) {
    const Vec3 v = g.vec(2.0);
    const double tau = g.angle(), s = g.angle();
    const double d = tau - s;
    const Vec3 expected{v.x, v.y * std::cos(d) + (v.z + 1) * std::sin(d),
                        -v.y * std::sin(d) + (v.z + 1) * std::cos(d) - 1};
    CHECK(max_abs_diff(fast_flow_drift(v, tau, s, m, n), expected) < 1e-13);

    const UnitAxis a = g.axis();
    const UnitAxis b = g.perpendicular(a);
    const Vec3 dv = (fast_flow_drift(v, tau + h, s, a, b) - fast_flow_drift(v, tau - h, s, a, b)) / (2 * h);
    CHECK(max_abs_diff(dv, b.direction() + cross(fast_flow_drift(v, tau, s, a, b), a.direction())) < 1e-8);
  }
  // u(v, tau) in the drift case, written out for M = e1, n = e2.
  const Vec3 v{0.1, 0.7, -0.3};
  const double tau = 0.8;
  const Vec3 u{v.x, v.y * std::cos(tau) - (v.z + 1) * std::sin(tau),
               v.y * std::sin(tau) + (v.z + 1) * std::cos(tau) - 1};
  CHECK(max_abs_diff(drift_rotation(v, tau, m, n), u) < 1e-15);
}

TEST_CASE("integrator settings validation") {
  IntegratorSettings s;
  CHECK_NOTHROW(s.validate());
  s.dt = 0.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = {};
  s.substeps_per_gyroperiod = 4;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = rk4(0.05, 16);
  CHECK_NOTHROW(s.validate(0.05));
  s.dt *= 1.01;
  CHECK_THROWS_AS(s.validate(0.05), std::invalid_argument);
}

TEST_CASE("push_full examples without weak fields") {
  const double eps = 0.1;
  const FieldConfig c = FieldConfig::strong_only(eps, UnitAxis(e1), 10.0);
  const PhasePoint p0{{0.2, -0.1, 0.4}, {1, 0, 0}};
  const PhasePoint p = push_full(p0, c, 0.0, 3.0, split(1e-2));
  CHECK(max_abs_diff(p.x, p0.x + 3.0 * e1) < 1e-13);
  CHECK(p.v == p0.v);

  const PhasePoint q0{{}, {0, 1, 0}};
  const PhasePoint q = push_full(q0, c, 0.0, 2 * pi * eps, split(2 * pi * eps / 64));
  CHECK(max_abs_diff(q.v, q0.v) < 1e-12);
  for (double t : {0.05, 0.37, 1.3}) {
    const PhasePoint r = push_full(q0, c, 0.0, t, split(1e-2));
    CHECK(max_abs_diff(r.v, fast_flow(q0.v, t / eps, 0.0, UnitAxis(e1))) < 1e-12);
  }
}

TEST_CASE("push_full with a parallel electric field") {
  const FieldConfig c(0.05, UnitAxis(e1), std::nullopt, FieldSpec::uniform(e1), FieldSpec::zero(), 2.0);
  const FieldConfig c0 = FieldConfig::strong_only(0.05, UnitAxis(e1), 2.0);
  Gen g;
  for (int i = 0; i < 50; ++i) {
    const PhasePoint p0{g.vec(1.0), g.vec(1.0)};
    const double t = g.uniform(0.1, 2.0);
    const PhasePoint p = push_full(p0, c, 0.0, t, split(1e-2));
    const PhasePoint q = push_full(p0, c0, 0.0, t, split(1e-2));
    CHECK(std::abs(p.v.x - (p0.v.x + t)) < 1e-12);
    CHECK(std::abs(p.v.y - q.v.y) < 1e-12);
    CHECK(std::abs(p.v.z - q.v.z) < 1e-12);
    CHECK(std::abs(p.x.x - (p0.x.x + p0.v.x * t + 0.5 * t * t)) < 1e-12);
  }
}

TEST_CASE("push_full follows the closed-form helix for random data") {
  Gen g;
  for (bool drift : {false, true}) {
    for (int i = 0; i < 100; ++i) {
      const double eps = g.uniform(0.01, 0.5);
      const FieldConfig c =
          FieldConfig::strong_only(eps, UnitAxis(e1), 5.0, drift ? std::optional(UnitAxis(e2)) : std::nullopt);
      const PhasePoint p0{g.vec(1.0), g.vec(2.0)};
      const double t = g.uniform(0.0, 5.0);
      const PhasePoint p = push_full(p0, c, 0.0, t, split(g.uniform(1e-3, 0.1)));
      CHECK(phase_distance(p, helix_e1(p0, t, eps, drift)) < 1e-12 * std::max(1.0, norm(p.x)));
    }
  }
}

TEST_CASE("stepped exact_split without weak fields stays on the helix") {
  // The generic overload takes every split step even when the kicks vanish.
  Gen g;
  auto zero = [](double, const Vec3&) { return FieldSample{}; };
  for (bool drift : {false, true}) {
    const double eps = 0.05, t = 100 * 2 * pi * eps;
    const FieldConfig c = FieldConfig::strong_only(eps, UnitAxis(e1), t, drift ? std::optional(UnitAxis(e2)) : std::nullopt);
    for (int i = 0; i < 20; ++i) {
      const PhasePoint p0{g.vec(1.0), g.vec(1.5)};
      const PhasePoint p = push_full(p0, c, zero, 0.0, t, split(2 * pi * eps / 16));
      const PhasePoint q = push_full(p0, c, 0.0, t, split(2 * pi * eps / 16));
      CHECK(phase_distance(p, helix_e1(p0, t, eps, drift)) < 1e-12 * std::max(1.0, norm(p.x)));
      CHECK(phase_distance(q, helix_e1(p0, t, eps, drift)) < 1e-12);
    }
  }
}

TEST_CASE("push_full backward then forward returns the start") {
  Gen g;
  for (Scheme scheme : {Scheme::exact_split, Scheme::rk4_oracle}) {
    for (int i = 0; i < 20; ++i) {
      const bool drift = i % 2 == 1;
      const double eps = g.uniform(0.05, 0.2);
      const FieldConfig c = smooth_fields(eps, 1.0, drift ? std::optional(UnitAxis(e2)) : std::nullopt);
      // exact_split is time-symmetric; rk4 is not, so it runs at a step whose
      // truncation error sits below the tolerance.
      const IntegratorSettings s = scheme == Scheme::exact_split ? split(2 * pi * eps / 64) : rk4(eps, 1024);
      const PhasePoint p0{g.vec(1.0), g.vec(1.0)};
      const double t0 = g.uniform(0.0, 0.5), t1 = g.uniform(0.5, 1.0);
      const PhasePoint back = push_full(push_full(p0, c, t0, t1, s), c, t1, t0, s);
      CHECK(phase_distance(back, p0) < 1e-10);
    }
  }
}

TEST_CASE("exact_split is second order against a fine rk4 reference") {
  const double eps = 0.05;
  const FieldConfig c = smooth_fields(eps);
  const IntegratorSettings ref = rk4(eps, 2048);
  Gen g;
  std::vector<PhasePoint> starts;
  std::vector<PhasePoint> refs;
  for (int i = 0; i < 8; ++i) {
    starts.push_back({g.vec(1.0), g.vec(1.0)});
    refs.push_back(push_full(starts.back(), c, 0.0, 1.0, ref));
  }
  auto error = [&](int per_period) {
    IntegratorSettings s = split(2 * pi * eps / per_period);
    s.substeps_per_gyroperiod = per_period;
    double e = 0.0;
    for (std::size_t i = 0; i < starts.size(); ++i) {
      e = std::max(e, phase_distance(push_full(starts[i], c, 0.0, 1.0, s), refs[i]));
    }
    return e;
  };
  const double e64 = error(64), e128 = error(128), e256 = error(256), e512 = error(512);
  MESSAGE("split error vs rk4 reference: " << e64 << " " << e128 << " " << e256 << " " << e512);
  for (double ratio : {e64 / e128, e128 / e256, e256 / e512}) {
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
  }
  CHECK(e512 <= 1e-6);
}

TEST_CASE("rk4 oracle is fourth order in the step") {
  const double eps = 0.05;
  const FieldConfig c = smooth_fields(eps);
  const PhasePoint p0{{0.1, -0.2, 0.3}, {0.4, 0.5, -0.6}};
  const PhasePoint ref = push_full(p0, c, 0.0, 0.5, rk4(eps, 4096));
  const double e1 = phase_distance(push_full(p0, c, 0.0, 0.5, rk4(eps, 64)), ref);
  const double e2 = phase_distance(push_full(p0, c, 0.0, 0.5, rk4(eps, 128)), ref);
  CHECK(e1 / e2 > 12.0);
  CHECK(e1 / e2 < 20.0);
}

TEST_CASE("speed is conserved without electric fields") {
  Gen g;
  for (int i = 0; i < 100; ++i) {
    const UnitAxis m = g.axis();
    const FieldConfig c(g.uniform(0.01, 0.5), m, std::nullopt, FieldSpec::zero(),
                        FieldSpec::trig(g.vec(1.0), g.vec(2.0), 0.3, 0.1), 2.0);
    const PhasePoint p0{g.vec(1.0), g.vec(2.0)};
    const PhasePoint p = push_full(p0, c, 0.0, 2.0, split(g.uniform(1e-3, 5e-2)));
    CHECK(std::abs(norm(p.v) - norm(p0.v)) < 1e-12 * std::max(1.0, norm(p0.v)));
  }
}

TEST_CASE("gyro-period average velocity is the E x B drift") {
  Gen g;
  const double eps = 0.05;
  const double period = 2 * pi * eps;
  const FieldConfig c = FieldConfig::strong_only(eps, UnitAxis(e1), 1.0, UnitAxis(e2));
  for (int i = 0; i < 100; ++i) {
    const PhasePoint p0{g.vec(1.0), {0.0, g.uniform(-2, 2), g.uniform(-2, 2)}};
    const double t0 = g.uniform(0.0, 0.5);
    const PhasePoint p = push_full(p0, c, t0, t0 + period, split(period / 64));
    const Vec3 mean_v = (p.x - p0.x) / period;
    CHECK(max_abs_diff(mean_v, cross(e2, e1)) < 1e-10);
    CHECK(max_abs_diff(mean_v, {0, 0, -1}) < 1e-10);
  }
}

TEST_CASE("velocity bound rejects runaway trajectories") {
  const FieldConfig c(0.1, UnitAxis(e1), std::nullopt, FieldSpec::uniform({100, 0, 0}), FieldSpec::zero(), 1.0);
  IntegratorSettings s = split(1e-2);
  s.velocity_bound = 10.0;
  CHECK_THROWS_AS(push_full(PhasePoint{{}, {}}, c, 0.0, 1.0, s), NumericalError);
}

TEST_CASE("limit characteristics examples") {
  const FieldConfig c0 = FieldConfig::strong_only(0.1, UnitAxis(e1), 2.0);
  const IntegratorSettings s = split(1e-2);
  const PhasePoint p0{{0.5, -0.2, 0.1}, {0.7, 0.4, -0.9}};
  const PhasePoint p = push_limit(p0, c0, 0.0, 1.5, s);
  CHECK(max_abs_diff(p.x, p0.x + 1.5 * Vec3{0.7, 0, 0}) < 1e-14);
  CHECK(p.v == p0.v);

  const FieldConfig ce(0.1, UnitAxis(e1), std::nullopt, FieldSpec::uniform(e1), FieldSpec::zero(), 2.0);
  const PhasePoint q = push_limit(p0, ce, 0.0, 1.5, s);
  CHECK(std::abs(q.v.x - (0.7 + 1.5)) < 1e-13);
  CHECK(std::abs(q.x.x - (0.5 + 0.7 * 1.5 + 0.5 * 1.5 * 1.5)) < 1e-13);
  CHECK(q.v.y == p0.v.y);
  CHECK(q.v.z == p0.v.z);
  CHECK(q.x.y == p0.x.y);
  CHECK(q.x.z == p0.x.z);

  const double b0 = 0.8;
  const FieldConfig cb(0.1, UnitAxis(e1), std::nullopt, FieldSpec::zero(),
                       FieldSpec::uniform({b0, 0.3, -0.2}), 2.0);
  for (double t : {0.3, 1.0, 2.0}) {
    const PhasePoint r = push_limit(p0, cb, 0.0, t, split(1e-3));
    CHECK(std::abs(std::hypot(r.v.y, r.v.z) - std::hypot(0.4, -0.9)) < 1e-10);
    // dV/dt = V x (b0 e1): rotation by -b0 t about e1, independent of eps.
    CHECK(max_abs_diff(r.v, rotate_about_axis(p0.v, -b0 * t, UnitAxis(e1))) < 1e-10);
  }
  const FieldConfig cb2 = FieldConfig(0.001, UnitAxis(e1), std::nullopt, FieldSpec::zero(),
                                      FieldSpec::uniform({b0, 0, 0}), 2.0);
  CHECK(push_limit(p0, cb, 0.0, 1.0, s).v == push_limit(p0, cb2, 0.0, 1.0, s).v);
}

TEST_CASE("drift limit characteristics examples") {
  const IntegratorSettings s = split(1e-2);
  const PhasePoint p0{{0.5, -0.2, 0.1}, {0.7, 0.4, -0.9}};
  const FieldConfig c0 = FieldConfig::strong_only(0.1, UnitAxis(e1), 2.0, UnitAxis(e2));
  const PhasePoint p = push_limit_drift(p0, c0, 0.0, 1.5, s);
  CHECK(max_abs_diff(p.x, p0.x + 1.5 * Vec3{0.7, 0, -1}) < 1e-14);
  CHECK(max_abs_diff(p.v, p0.v) == 0.0);

  const FieldConfig ce(0.1, UnitAxis(e1), UnitAxis(e2), FieldSpec::uniform(e1), FieldSpec::zero(), 2.0);
  CHECK(std::abs(push_limit_drift(p0, ce, 0.0, 1.5, s).v.x - (0.7 + 1.5)) < 1e-13);

  CHECK_THROWS_AS(push_limit_drift(p0, FieldConfig::strong_only(0.1, UnitAxis(e1), 2.0), 0.0, 1.0, s),
                  std::invalid_argument);
}

TEST_CASE("drift limit force from a perpendicular magnetic field") {
  // With B = b2 e2 the drift velocity -e3 gives (-e3) x (b2 e2) = +b2 e1.
  const double b2 = 0.5;
  const LimitDynamics dyn{UnitAxis(e1), UnitAxis(e2)};
  const Vec3 v{0.3, -0.4, 0.6};
  const PhasePoint r = dyn.rhs(FieldSample{{}, {0, b2, 0}}, v);
  CHECK(max_abs_diff(r.v, {b2, 0, 0}) < 1e-15);
  CHECK(max_abs_diff(r.x, {0.3, 0, -1}) < 1e-15);

  // The finite-eps dynamics agree: the averaged parallel velocity grows at +b2.
  const FieldConfig c(0.002, UnitAxis(e1), UnitAxis(e2), FieldSpec::zero(), FieldSpec::uniform({0, b2, 0}), 1.0);
  const double t = 0.5;
  const PhasePoint f = push_full(PhasePoint{{}, {}}, c, 0.0, t, split(2 * pi * 0.002 / 64));
  const PhasePoint l = push_limit_drift(PhasePoint{{}, {}}, c, 0.0, t, split(1e-3));
  CHECK(std::abs(l.v.x - b2 * t) < 1e-12);
  CHECK(std::abs(f.v.x - b2 * t) < 0.02);
  CHECK(max_abs_diff(f.x, l.x) < 0.02);
}

TEST_CASE("drift limit dynamics in a rotated frame") {
  // The frame-free force must commute with rigid rotations of (M, n, E, B, v).
  Gen g;
  for (int i = 0; i < 200; ++i) {
    const UnitAxis m = g.axis();
    const UnitAxis n = g.perpendicular(m);
    const Vec3 b3 = cross(m.direction(), n.direction());
    const Vec3 E = g.vec(1.0), B = g.vec(1.0), v = g.vec(2.0);
    auto to_local = [&](const Vec3& a) { return Vec3{dot(a, m.direction()), dot(a, n.direction()), dot(a, b3)}; };
    const PhasePoint global = LimitDynamics(m, n).rhs({E, B}, v);
    const PhasePoint local = LimitDynamics(UnitAxis(e1), UnitAxis(e2)).rhs({to_local(E), to_local(B)}, to_local(v));
    CHECK(max_abs_diff(to_local(global.x), local.x) < 1e-13);
    CHECK(max_abs_diff(to_local(global.v), local.v) < 1e-13);
  }
}

}  // TEST_SUITE
