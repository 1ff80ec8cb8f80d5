#include <doctest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "ghlab/linear_solver.hpp"
#include "ghlab/twoscale.hpp"
#include "oracles.hpp"

using namespace ghl;
using ghl::testing::Gen;
using ghl::testing::helix_e1;
using ghl::testing::max_abs_diff;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

VelocityFunction gaussian_f0() { return maxwellian({0.1, -0.2, 0.0}, 0.5, {0.3, 0.6, 0.0}, 0.5); }

LinearProblem free_problem(double eps, bool drift = false) {
  return {FieldConfig::strong_only(eps, UnitAxis(e1), 3.0, drift ? std::optional(UnitAxis(e2)) : std::nullopt),
          gaussian_f0(), drift ? Variant::magnetic_plus_drift : Variant::magnetic_only};
}

LinearProblem weak_problem(double eps, bool drift = false) {
  return {FieldConfig(eps, UnitAxis(e1), drift ? std::optional(UnitAxis(e2)) : std::nullopt,
                      FieldSpec::trig({0.3, 0.2, -0.1}, {1.0, 0.5, -0.7}, 0.8, 0.1),
                      FieldSpec::uniform({0.4, 0.0, 0.0}), 3.0),
          gaussian_f0(), drift ? Variant::magnetic_plus_drift : Variant::magnetic_only};
}

IntegratorSettings fine(double eps) {
  IntegratorSettings s;
  s.dt = two_pi * eps / 64;
  s.substeps_per_gyroperiod = 64;
  return s;
}

}  // namespace

TEST_SUITE("linear-solver") {

TEST_CASE("variant and drift axis must agree") {
  LinearProblem p = free_problem(0.1);
  p.variant = Variant::magnetic_plus_drift;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  CHECK_THROWS_AS(LinearSolver{p}, std::invalid_argument);
  CHECK_NOTHROW(free_problem(0.1, true).validate());
}

TEST_CASE("initial values") {
  Gen g;
  for (bool drift : {false, true}) {
    const LinearSolver s(weak_problem(0.1, drift), fine(0.1));
    for (int i = 0; i < 100; ++i) {
      const Vec3 x = g.vec(1.0), v = g.vec(1.5);
      CHECK(s.f_eps(0.0, x, v) == s.problem().f0(x, v));
      CHECK(s.G(0.0, x, v) == doctest::Approx(s.problem().f0(x, v) / two_pi).epsilon(1e-15));
    }
  }
  const VelocityFunction gyro = bi_maxwellian({}, 0.5, UnitAxis(e1), 0.4, 0.6, 0.2);
  const LinearSolver s(LinearProblem{FieldConfig::strong_only(0.1, UnitAxis(e1), 1.0), gyro}, fine(0.1));
  for (int i = 0; i < 100; ++i) {
    const Vec3 x = g.vec(1.0), v = g.vec(1.5);
    CHECK(s.f_limit(0.0, x, v) == gyro(x, v));
  }
}

TEST_CASE("f_eps without weak fields is the initial data along the backward helix") {
  Gen g;
  for (bool drift : {false, true}) {
    for (int i = 0; i < 200; ++i) {
      const double eps = g.uniform(0.02, 0.3);
      const LinearSolver s(free_problem(eps, drift), fine(eps));
      const Vec3 x = g.vec(1.0), v = g.vec(1.5);
      const double t = g.uniform(0.0, 3.0);
      const PhasePoint o = helix_e1({x, v}, -t, eps, drift);
      const double ref = s.problem().f0(o.x, o.v);
      CHECK(std::abs(s.f_eps(t, x, v) - ref) <= 1e-10 * std::max(ref, 1e-3));
    }
  }
}

TEST_CASE("f_limit without weak fields is free parallel streaming") {
  Gen g;
  const GyroQuadrature q(64);
  for (bool drift : {false, true}) {
    const LinearSolver s(free_problem(0.1, drift), fine(0.1));
    const VelocityFunction bar =
        limit_initial_data(gaussian_f0(), UnitAxis(e1), q, drift ? std::optional(UnitAxis(e2)) : std::nullopt);
    for (int i = 0; i < 200; ++i) {
      const Vec3 x = g.vec(1.0), v = g.vec(1.5);
      const double t = g.uniform(0.0, 3.0);
      const Vec3 transport = drift ? Vec3{v.x, 0.0, -1.0} : Vec3{v.x, 0.0, 0.0};
      const double ref = bar(x - t * transport, v);
      CHECK(std::abs(s.f_limit(t, x, v) - ref) <= 1e-12 * std::max(ref, 1e-3));
    }
  }
}

TEST_CASE("f_limit does not depend on epsilon") {
  Gen g;
  for (bool drift : {false, true}) {
    const LinearSolver a(weak_problem(0.2, drift), fine(0.2));
    const LinearSolver b(weak_problem(0.013, drift), fine(0.2));
    for (int i = 0; i < 100; ++i) {
      const Vec3 x = g.vec(1.0), v = g.vec(1.5);
      const double t = g.uniform(0.0, 3.0);
      CHECK(a.f_limit(t, x, v) == b.f_limit(t, x, v));
      CHECK(a.G(t, x, v) == b.G(t, x, v));
    }
  }
}

TEST_CASE("evaluations stay nonnegative") {
  Gen g;
  for (bool drift : {false, true}) {
    const LinearSolver s(weak_problem(0.1, drift), fine(0.1));
    for (int i = 0; i < 300; ++i) {
      const Vec3 x = g.vec(3.0), v = g.vec(3.0);
      const double t = g.uniform(0.0, 3.0);
      CHECK(s.f_eps(t, x, v) >= 0.0);
      CHECK(s.f_limit(t, x, v) >= 0.0);
      CHECK(s.G(t, x, v) >= 0.0);
    }
  }
}

TEST_CASE("limit origins commute with the gyro rotation") {
  Gen g;
  for (bool drift : {false, true}) {
    const LinearSolver s(weak_problem(0.1, drift), fine(0.1));
    for (int i = 0; i < 100; ++i) {
      const Vec3 x = g.vec(1.0), v = g.vec(1.5);
      const double t = g.uniform(0.0, 3.0), tau = g.angle();
      auto u = [&](const Vec3& w) {
        return drift ? drift_rotation(w, tau, UnitAxis(e1), UnitAxis(e2)) : rotate_about_axis(w, tau, UnitAxis(e1));
      };
      const PhasePoint a = s.origin_limit(t, x, u(v));
      const PhasePoint b = s.origin_limit(t, x, v);
      CHECK(max_abs_diff(a.x, b.x) < 1e-11);
      CHECK(max_abs_diff(a.v, u(b.v)) < 1e-11);
    }
  }
}

TEST_CASE("translation invariance with constant weak fields") {
  Gen g;
  LinearProblem p = free_problem(0.1);
  p.cfg = FieldConfig(0.1, UnitAxis(e1), std::nullopt, FieldSpec::uniform({0.3, 0.2, -0.1}),
                      FieldSpec::uniform({0.4, 0.1, 0.2}), 3.0);
  const LinearSolver s(p, fine(0.1));
  REQUIRE(s.translation_invariant());
  CHECK_FALSE(LinearSolver(weak_problem(0.1), fine(0.1)).translation_invariant());
  for (int i = 0; i < 100; ++i) {
    const Vec3 x = g.vec(2.0), v = g.vec(1.5);
    const double t = g.uniform(0.0, 3.0);
    const PhasePoint a = s.origin_full(t, x, v), b = s.origin_full(t, {}, v);
    CHECK(max_abs_diff(a.x, b.x + x) < 1e-12);
    CHECK(max_abs_diff(a.v, b.v) < 1e-12);
    const PhasePoint c = s.origin_limit(t, x, v), d = s.origin_limit(t, {}, v);
    CHECK(max_abs_diff(c.x, d.x + x) < 1e-12);
    CHECK(max_abs_diff(c.v, d.v) < 1e-12);
  }
}

TEST_CASE("integral of F over tau equals the weak-* limit") {
  Gen g;
  const GyroQuadrature q(64);
  for (bool drift : {false, true}) {
    const LinearSolver s(weak_problem(0.1, drift), fine(0.1));
    for (int i = 0; i < 200; ++i) {
      const Vec3 x = g.vec(1.0), v = g.vec(1.5);
      const double t = g.uniform(0.0, 3.0);
      CHECK(projection_residual(s, t, x, v, q) <= 1e-10);
    }
  }
}

TEST_CASE("drift-case G solves its transport equation") {
  // dG/dt + (u1 e1 - e3) . grad_x G + [(E1 + B2) e1 + (u1, u2, u3 + 1) x (B1 e1)] . grad_u G = 0
  // for M = e1, n = e2, checked by central differences.
  const double eps = 0.1;
  LinearProblem p = weak_problem(eps, true);
  p.cfg = FieldConfig(eps, UnitAxis(e1), UnitAxis(e2), FieldSpec::trig({0.3, 0.2, -0.1}, {1.0, 0.5, -0.7}, 0.8, 0.1),
                      FieldSpec::uniform({0.4, 0.25, -0.3}), 3.0);
  IntegratorSettings s = fine(eps);
  s.dt = 1e-3;
  const LinearSolver solver(p, s);
  Gen g;
  const double h = 1e-3;
  for (int i = 0; i < 50; ++i) {
    const Vec3 x = g.vec(0.5), u = g.vec(1.0);
    const double t = g.uniform(0.2, 2.5);
    auto G = [&](double tt, const Vec3& xx, const Vec3& uu) { return solver.G(tt, xx, uu); };
    const double dt = (G(t + h, x, u) - G(t - h, x, u)) / (2 * h);
    Vec3 gx, gu;
    for (int a = 0; a < 3; ++a) {
      Vec3 xp = x, xm = x, up = u, um = u;
      xp[a] += h;
      xm[a] -= h;
      up[a] += h;
      um[a] -= h;
      gx[a] = (G(t, xp, u) - G(t, xm, u)) / (2 * h);
      gu[a] = (G(t, x, up) - G(t, x, um)) / (2 * h);
    }
    const FieldSample f = p.cfg.eval_weak(t, x);
    const Vec3 transport{u.x, 0.0, -1.0};
    const Vec3 force = Vec3{f.E.x + f.B.y, 0, 0} + cross(Vec3{u.x, u.y, u.z + 1.0}, Vec3{f.B.x, 0, 0});
    const double residual = dt + dot(transport, gx) + dot(force, gu);
    const double scale = std::abs(dt) + norm(gx) + norm(gu);
    CHECK(std::abs(residual) <= 1e-5 * std::max(scale, 1e-3));
  }
}

}  // TEST_SUITE
