#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "generators.hpp"
#include "ghlab/csv.hpp"
#include "ghlab/twoscale.hpp"
#include "oracles.hpp"

using namespace ghl;
using ghl::testing::Gen;

namespace {

constexpr double pi = std::numbers::pi;
constexpr double kHorizon = 3.0;

const Vec3 kDrift{0.3, 0.6, 0.0};

LinearProblem default_problem(double eps = 0.2) {
  return {FieldConfig::strong_only(eps, UnitAxis(e1), kHorizon), maxwellian({0, 0, 0}, 0.5, kDrift, 0.5),
          Variant::magnetic_only};
}

QuadSpec coarse() {
  QuadSpec q;
  q.nodes_t = 6;
  q.nodes_x = 6;
  q.nodes_v = 6;
  q.micro_t = 8;
  q.gyro_nodes = 16;
  return q;
}

QuadSpec dense(int n) {
  QuadSpec q;
  q.nodes_t = n;
  q.nodes_x = n;
  q.nodes_v = n;
  return q;
}

const TestFunction& suite_member(const std::vector<TestFunction>& suite, const std::string& id) {
  for (const TestFunction& f : suite) {
    if (f.id == id) return f;
  }
  throw std::runtime_error("no test function " + id);
}

}  // namespace

TEST_SUITE("twoscale-diagnostics") {

TEST_CASE("bump shape") {
  const Bump b{0.5, 2.0};
  CHECK(b(0.5) == 1.0);
  CHECK(b(2.5) == 0.0);
  CHECK(b(-1.5) == 0.0);
  CHECK(b(3.0) == 0.0);
  CHECK(b(1.0) == doctest::Approx(std::exp(1.0 - 1.0 / (1.0 - 0.0625))));
  CHECK(b.lo() == -1.5);
  CHECK(b.hi() == 2.5);
}

TEST_CASE("test functions are periodic in tau and vanish outside their box") {
  Gen g;
  const auto suite = default_test_suite(kHorizon);
  REQUIRE(suite.size() == 6);
  for (const TestFunction& f : suite) {
    CHECK_NOTHROW(f.validate());
    const PhaseBox box = f.support();
    for (int i = 0; i < 200; ++i) {
      const double t = g.uniform(0, kHorizon), tau = g.angle();
      const Vec3 x = g.vec(4.0), v = g.vec(4.0);
      CHECK(std::abs(f(t, tau + 2 * pi, x, v) - f(t, tau, x, v)) < 1e-14);
      if (!box.contains(x, v)) CHECK(f(t, tau, x, v) == 0.0);
    }
    CHECK(f(-0.1, 0.0, {}, {}) == 0.0);
  }
  int weak = 0;
  for (const TestFunction& f : suite) weak += f.tau_harmonics() == 0;
  CHECK(weak == 3);
  CHECK(suite[3].tau_harmonics() == 1);
  CHECK(suite[5].tau_harmonics() == 2);
  for (TauMode m : {TauMode::one, TauMode::cos1, TauMode::sin1, TauMode::cos2}) {
    CHECK(tau_mode_from_string(to_string(m)) == m);
  }
  TestFunction bad = suite[0];
  bad.x[1].half_width = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("zero test function pairs to zero") {
  TestFunction phi = default_test_suite(kHorizon)[0];
  phi.amplitude = 0.0;
  const auto rows = pair_weak(default_problem(), phi, {0.2, 0.1}, coarse());
  REQUIRE(rows.size() == 2);
  for (const PairingResult& r : rows) {
    CHECK(r.value == 0.0);
    CHECK(r.reference == 0.0);
    CHECK(r.abs_error == 0.0);
  }
}

TEST_CASE("pairing rows report the absolute error") {
  const auto suite = default_test_suite(kHorizon);
  const auto rows = pair_twoscale(default_problem(), suite[3], {0.2, 0.1}, coarse());
  for (const PairingResult& r : rows) {
    CHECK(r.abs_error == std::abs(r.value - r.reference));
    CHECK(r.nodes_t > 0);
    CHECK(r.nodes_x == 6);
  }
  CHECK(rows[0].reference == rows[1].reference);
}

TEST_CASE("weak pairing refuses tau-dependent test functions") {
  const auto suite = default_test_suite(kHorizon);
  CHECK_THROWS_AS(pair_weak(default_problem(), suite[3], {0.2}, coarse()), std::invalid_argument);
}

TEST_CASE("epsilon lists must decrease") {
  const auto suite = default_test_suite(kHorizon);
  CHECK_THROWS_AS(pair_weak(default_problem(), suite[0], {0.1, 0.2}, coarse()), std::invalid_argument);
  CHECK_THROWS_AS(pair_weak(default_problem(), suite[0], {0.1, -0.05}, coarse()), std::invalid_argument);
}

TEST_CASE("budget and resolution limits fail loudly") {
  const auto suite = default_test_suite(kHorizon);
  QuadSpec q = coarse();
  q.node_budget = 1000;
  CHECK_THROWS_AS(pair_weak(default_problem(), suite[0], {0.2}, q), std::invalid_argument);
  q = coarse();
  q.max_nodes_t = 100;
  CHECK_THROWS_AS(pair_weak(default_problem(), suite[0], {0.2, 0.01}, q), std::invalid_argument);
  q.gyro_nodes = 2;
  CHECK_THROWS_AS(q.validate(), std::invalid_argument);
}

TEST_CASE("stratified time rule resolves the fast period") {
  const auto suite = default_test_suite(kHorizon);
  const auto rows = pair_twoscale(default_problem(), suite[3], {0.2, 0.05}, coarse());
  for (const PairingResult& r : rows) {
    const double spacing = kHorizon / r.nodes_t;
    CHECK(spacing <= 2 * pi * r.epsilon / coarse().micro_t * (1 + 1e-12));
  }
}

TEST_CASE("tau-free two-scale pairing reduces to the weak pairing") {
  const auto suite = default_test_suite(kHorizon);
  const auto a = pair_weak(default_problem(), suite[1], {0.2, 0.1}, coarse());
  const auto b = pair_twoscale(default_problem(), suite[1], {0.2, 0.1}, coarse());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].value == b[i].value);
    CHECK(a[i].reference == b[i].reference);
  }
  // The F side of a tau-free function is the weak-* limit paired with phi.
  const LinearSolver solver(default_problem());
  const double rhs = pairing_rhs(solver, suite[1], coarse());
  QuadSpec q = coarse();
  q.gyro_nodes = 64;
  CHECK(std::abs(pairing_rhs(solver, suite[1], q) - rhs) < 1e-10 * std::abs(rhs));
}

TEST_CASE("cos tau pairing with gyrotropic data vanishes on both sides") {
  LinearProblem p = default_problem(0.1);
  p.f0 = bi_maxwellian({}, 0.5, UnitAxis(e1), 0.5, 0.5, 0.3);
  const auto suite = default_test_suite(kHorizon);
  TestFunction psi = suite[0];
  psi.tau = TauMode::cos1;
  const auto rows = pair_twoscale(p, psi, {0.1, 0.05, 0.025}, coarse());
  for (const PairingResult& r : rows) CHECK(std::abs(r.reference) < 1e-14);
  CHECK(rows[2].abs_error < rows[0].abs_error);
}

TEST_CASE("cos tau pairing with non-gyrotropic data has a nonzero limit") {
  const auto suite = default_test_suite(kHorizon);
  const double rhs = pairing_rhs(LinearSolver(default_problem()), suite[3], coarse());
  CHECK(std::abs(rhs) > 1e-2);
}

TEST_CASE("F side matches an independent dense quadrature") {
  const auto suite = default_test_suite(kHorizon);
  const LinearSolver solver(default_problem());
  for (const char* id : {"bump_a_cos", "bump_b_sin", "bump_c_cos2"}) {
    const TestFunction& psi = suite_member(suite, id);
    const double oracle = ghl::testing::free_maxwellian_twoscale(psi, {}, 0.5, kDrift, 0.5);
    const double rhs = pairing_rhs(solver, psi, dense(32));
    CHECK(std::abs(rhs - oracle) <= 1e-8);
  }
}

TEST_CASE("drift variant dispatches the drift solvers") {
  LinearProblem plain = default_problem(0.1);
  LinearProblem drift = plain;
  drift.cfg = FieldConfig::strong_only(0.1, UnitAxis(e1), kHorizon, UnitAxis(e2));
  drift.variant = Variant::magnetic_plus_drift;
  const auto suite = default_test_suite(kHorizon);
  const auto a = pair_weak(plain, suite[0], {0.1}, coarse());
  const auto b = pair_weak(drift, suite[0], {0.1}, coarse());
  CHECK(a[0].reference != b[0].reference);
  // Drift-case weak-* limit: free transport along (v1, 0, -1) of the averaged data.
  const LinearSolver s(drift);
  const GyroQuadrature q(64);
  const VelocityFunction bar = limit_initial_data(drift.f0, UnitAxis(e1), q, UnitAxis(e2));
  const Vec3 x{0.2, -0.1, 0.3}, v{0.4, 0.2, -0.5};
  CHECK(std::abs(s.f_limit(1.0, x, v) - bar(x - Vec3{0.4, 0.0, -1.0}, v)) < 1e-12);
}

TEST_CASE("convergence sweep plumbing") {
  const std::vector<double> eps{0.2, 0.1, 0.05, 0.025};
  CHECK(convergence_sweep(default_problem(), {}, eps, coarse()).rows.empty());
  const SweepReport r = convergence_sweep(default_problem(), default_test_suite(kHorizon), eps, coarse());
  CHECK(r.rows.size() == 24);
  for (std::size_t i = 0; i < r.rows.size(); ++i) CHECK(r.rows[i].epsilon == eps[i % 4]);
  for (const std::string& id : r.non_monotone) {
    bool found = false;
    for (std::size_t i = 1; i < r.rows.size(); ++i) {
      if (r.rows[i].test_id == id && r.rows[i - 1].test_id == id &&
          r.rows[i].abs_error > r.rows[i - 1].abs_error) {
        found = true;
      }
    }
    CHECK(found);
  }
}

TEST_CASE("pairing CSV format") {
  const auto dir = std::filesystem::temp_directory_path() / "ghlab_pairing_csv";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "pairing.csv").string();
  PairingResult r{"bump_a", 0.1, 1.0 / 3.0, 0.25, 1.0 / 12.0, 40, 16, 16, 2.5};
  write_pairing_csv(path, {r});
  const CsvTable t = read_csv(path);
  REQUIRE(t.header.size() == 9);
  CHECK(t.header[0] == "test_id");
  CHECK(t.header[8] == "seconds");
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0][2] == "3.3333333333333331e-01");
  CHECK(std::stod(t.rows[0][2]) == 1.0 / 3.0);
  CHECK(std::stod(t.rows[0][8]) == 0.0);
  write_pairing_csv(path, {r}, true);
  CHECK(std::stod(read_csv(path).rows[0][8]) == 2.5);
}

TEST_CASE("L2 norm at t = 0 and its homogeneity") {
  const LinearProblem p = default_problem(0.2);
  QuadSpec q = dense(48);
  const double sx = 0.5, sv = 0.5;
  const double exact = std::pow(4 * pi * sx * sx, -1.5) * std::pow(4 * pi * sv * sv, -1.5);
  const double n0 = l2_norm_f(p, 0.0, q);
  CHECK(std::abs(n0 - exact) < 1e-10 * exact);
  LinearProblem scaled = p;
  scaled.f0 = p.f0.scaled(3.0);
  CHECK(std::abs(l2_norm_f(scaled, 0.0, q) - 9.0 * n0) < 1e-12 * n0);
}

TEST_CASE("evolved support contains the pushed support") {
  Gen g;
  for (bool drift : {false, true}) {
    LinearProblem p = default_problem(0.1);
    p.cfg = FieldConfig(0.1, UnitAxis(e1), drift ? std::optional(UnitAxis(e2)) : std::nullopt,
                        FieldSpec::uniform({0.3, 0.2, -0.1}), FieldSpec::uniform({0.4, 0.0, 0.3}), kHorizon);
    p.variant = drift ? Variant::magnetic_plus_drift : Variant::magnetic_only;
    const PhaseBox& s = p.f0.support;
    IntegratorSettings set;
    set.dt = 2 * pi * 0.1 / 32;
    for (int i = 0; i < 500; ++i) {
      const PhasePoint p0{{g.uniform(s.x_lo.x, s.x_hi.x), g.uniform(s.x_lo.y, s.x_hi.y), g.uniform(s.x_lo.z, s.x_hi.z)},
                          {g.uniform(s.v_lo.x, s.v_hi.x), g.uniform(s.v_lo.y, s.v_hi.y), g.uniform(s.v_lo.z, s.v_hi.z)}};
      const double t = g.uniform(0.0, kHorizon);
      const PhasePoint q = push_full(p0, p.cfg, 0.0, t, set);
      CHECK(evolved_support(p, t).contains(q.x, q.v));
    }
  }
}

TEST_CASE("rho oscillation pairing") {
  const Grid3 grid = Grid3::cube(8);
  RhoSeries zero{0.05, {}, {}};
  const double dt = 2 * pi * 0.05 / 20;
  for (int n = 0; n <= 200; ++n) {
    zero.times.push_back(n * dt);
    zero.rho.emplace_back(grid.size(), 1.7);
  }
  CHECK(rho_oscillation_pairing(zero, grid, [](double, const Vec3&) { return 0.0; }) == 0.0);

  // Constant rho against phi(t) = t: int_0^T rho t cos(t / eps) dt in closed form.
  const double eps = zero.epsilon, T = zero.times.back();
  const double closed = 1.7 * (eps * T * std::sin(T / eps) + eps * eps * (std::cos(T / eps) - 1.0));
  const double value = rho_oscillation_pairing(zero, grid, [](double t, const Vec3&) { return t; });
  CHECK(std::abs(value - std::abs(closed)) < 1e-12);

  RhoSeries coarse_series = zero;
  for (double& t : coarse_series.times) t *= 2.0;
  CHECK_THROWS_AS(rho_oscillation_pairing(coarse_series, grid, [](double, const Vec3&) { return 1.0; }),
                  std::invalid_argument);
  const auto rows = rho_tau_independence({zero, zero}, grid, [](double t, const Vec3&) { return t; });
  CHECK(rows.size() == 2);
  CHECK(rows[1].magnitude == value);
}

}  // TEST_SUITE

TEST_SUITE("twoscale-convergence") {

TEST_CASE("doubling the quadrature changes the pairings by less than 1e-6") {
  const auto suite = default_test_suite(kHorizon);
  const LinearSolver solver(default_problem());
  for (const char* id : {"bump_a", "bump_a_cos"}) {
    const TestFunction& psi = suite_member(suite, id);
    const double a = pairing_rhs(solver, psi, dense(32));
    const double b = pairing_rhs(solver, psi, dense(64));
    MESSAGE(std::string(id) << ": F side 32 -> 64 nodes changes by " << std::abs(a - b));
    CHECK(std::abs(a - b) < 1e-6);
  }
  QuadSpec q32 = dense(32), q64 = dense(64);
  const TestFunction& phi = suite_member(suite, "bump_a");
  const double a = pairing_lhs(solver, phi, q32);
  const double b = pairing_lhs(solver, phi, q64);
  MESSAGE("bump_a: f_eps side 32 -> 64 nodes changes by " << std::abs(a - b));
  CHECK(std::abs(a - b) < 1e-6);
}

TEST_CASE("L2 norm of f_eps is conserved") {
  for (double eps : {0.2, 0.05}) {
    LinearProblem p = default_problem(eps);
    p.cfg = FieldConfig(eps, UnitAxis(e1), std::nullopt, FieldSpec::uniform({0.3, 0.2, -0.1}),
                        FieldSpec::uniform({0.4, 0.0, 0.3}), kHorizon);
    QuadSpec q;
    q.nodes_x = 96;
    q.nodes_v = 48;
    IntegratorSettings s;
    s.dt = 2 * pi * eps / 32;
    s.substeps_per_gyroperiod = 32;
    const double n0 = l2_norm_f(p, 0.0, q, s);
    for (double t : {0.5, 1.0}) {
      const double nt = l2_norm_f(p, t, q, s);
      MESSAGE("eps " << eps << " t " << t << " relative change " << std::abs(nt - n0) / n0);
      CHECK(std::abs(nt - n0) <= 1e-6 * n0);
    }
  }
}

}  // TEST_SUITE
