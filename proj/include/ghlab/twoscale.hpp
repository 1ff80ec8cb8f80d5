#pragma once

// Pairings of f^eps with fixed and oscillating test functions against the
// weak-* and two-scale limits, L2 norms, and the rho oscillation diagnostic.

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ghlab/linear_solver.hpp"
#include "ghlab/poisson.hpp"

namespace ghl {

/// C-infinity bump exp(1 - 1 / (1 - r^2)), r = (s - center) / half_width,
/// zero for |r| >= 1; peak value 1.
struct Bump {
  double center = 0.0;
  double half_width = 1.0;
  double operator()(double s) const;
  double lo() const { return center - half_width; }
  double hi() const { return center + half_width; }
  friend bool operator==(const Bump&, const Bump&) = default;
};

enum class TauMode { one, cos1, sin1, cos2 };
std::string to_string(TauMode mode);
TauMode tau_mode_from_string(const std::string& name);

/// psi(t, tau, x, v) = amplitude T(t) h(tau) prod X_i(x_i) prod V_i(v_i).
struct TestFunction {
  std::string id;
  double amplitude = 1.0;
  Bump t;
  std::array<Bump, 3> x;
  std::array<Bump, 3> v;
  TauMode tau = TauMode::one;

  /// Highest tau frequency present (0 for tau-independent functions).
  int tau_harmonics() const;
  double tau_factor(double tau) const;
  double t_factor(double time) const { return amplitude * t(time); }
  double x_factor(const Vec3& pos) const { return x[0](pos.x) * x[1](pos.y) * x[2](pos.z); }
  double v_factor(const Vec3& vel) const { return v[0](vel.x) * v[1](vel.y) * v[2](vel.z); }
  double operator()(double time, double tau_value, const Vec3& pos, const Vec3& vel) const {
    return t_factor(time) * tau_factor(tau_value) * x_factor(pos) * v_factor(vel);
  }
  /// Phase-space box outside which psi vanishes.
  PhaseBox support() const;
  void validate() const;
  friend bool operator==(const TestFunction&, const TestFunction&) = default;
};

/// Three tau-independent bumps followed by the same bumps times cos tau,
/// sin tau and cos 2 tau.
std::vector<TestFunction> default_test_suite(double horizon);

struct QuadSpec {
  int nodes_t = 16;   // Gauss-Legendre nodes in t on the limit side
  int nodes_x = 16;   // per axis
  int nodes_v = 16;   // per axis
  int micro_t = 16;   // nodes per fast period on the oscillating side
  int gyro_nodes = 32;
  int max_nodes_t = 4096;       // finer t rules are refused
  double node_budget = 2e10;    // integrand evaluations per pairing

  void validate() const;
  friend bool operator==(const QuadSpec&, const QuadSpec&) = default;
};

struct PairingResult {
  std::string test_id;
  double epsilon = 0.0;
  double value = 0.0;      // int f^eps psi(t, t/eps, x, v)
  double reference = 0.0;  // int int F psi dtau (equal to int f psi for tau-free psi)
  double abs_error = 0.0;
  int nodes_t = 0;
  int nodes_x = 0;
  int nodes_v = 0;
  double seconds = 0.0;
};

/// Integration window in t: the test function's t support clipped to [0, T].
std::pair<double, double> time_window(const TestFunction& psi, double horizon);

/// |sum_k (2 pi / N) F(t, tau_k, x, v) - f(t, x, v)| over the solver's limit
/// profile, N = quad.node_count() uniform tau nodes.
double projection_residual(const LinearSolver& solver, double t, const Vec3& x, const Vec3& v,
                           const GyroQuadrature& quad);

/// int f^eps(t, x, v) psi(t, t/eps, x, v) dt dx dv at the problem's epsilon.
/// The t rule is stratified with spec.micro_t nodes per period 2 pi eps.
double pairing_lhs(const LinearSolver& solver, const TestFunction& psi, const QuadSpec& spec,
                   int* nodes_t = nullptr);

/// int int_0^2pi F(t, tau, x, v) psi(t, tau, x, v) dtau dt dx dv with
/// F = G(t, x, u(v, tau)); uses the problem's limit dynamics (no eps).
double pairing_rhs(const LinearSolver& solver, const TestFunction& psi, const QuadSpec& spec);

/// settings with dt capped at 2 pi eps / substeps_per_gyroperiod.
IntegratorSettings settings_for_epsilon(const IntegratorSettings& settings, double eps);

/// Weak-* pairing for a tau-independent test function, one result per eps.
/// Each eps runs with settings_for_epsilon(settings, eps).
std::vector<PairingResult> pair_weak(const LinearProblem& prob, const TestFunction& phi,
                                     const std::vector<double>& eps_list, const QuadSpec& spec,
                                     const IntegratorSettings& settings = {});

/// Two-scale pairing with psi evaluated at tau = t / eps, one result per eps.
std::vector<PairingResult> pair_twoscale(const LinearProblem& prob, const TestFunction& psi,
                                         const std::vector<double>& eps_list, const QuadSpec& spec,
                                         const IntegratorSettings& settings = {});

/// int (f^eps(t))^2 dx dv over `box`, or over a box that contains the support
/// of f^eps(t) when none is given.
double l2_norm_f(const LinearProblem& prob, double t, const QuadSpec& spec,
                 const IntegratorSettings& settings = {},
                 const std::optional<PhaseBox>& box = std::nullopt);

/// Box containing the support of f^eps(t): the initial support widened by the
/// largest helix displacement and gyro-rotated in v.
PhaseBox evolved_support(const LinearProblem& prob, double t);

struct SweepReport {
  std::vector<PairingResult> rows;
  /// Test ids whose abs_error increases somewhere along the eps list.
  std::vector<std::string> non_monotone;
};

/// Pairings for every (test, eps), tests in order, eps in the given
/// (strictly decreasing) order.
SweepReport convergence_sweep(const LinearProblem& prob, const std::vector<TestFunction>& tests,
                              const std::vector<double>& eps_list, const QuadSpec& spec,
                              const IntegratorSettings& settings = {});

/// CSV columns test_id, epsilon, lhs, rhs, abs_error, nodes_t, nodes_x,
/// nodes_v, seconds. Seconds are written as 0 unless `with_timing`.
void write_pairing_csv(const std::string& path, const std::vector<PairingResult>& rows,
                       bool with_timing = false);

/// Charge density sampled in time on a grid.
struct RhoSeries {
  double epsilon = 0.0;
  std::vector<double> times;
  std::vector<std::vector<double>> rho;  // one grid array per time
};

using SpaceTimeFunction = std::function<double(double t, const Vec3& x)>;

/// |int int rho(t, x) cos(t / eps) phi(t, x) dt dx|. Space: grid sum; time:
/// the product rho phi is linear between samples and integrated exactly
/// against the cosine. Refuses series sampled coarser than 2 pi eps / 16.
double rho_oscillation_pairing(const RhoSeries& series, const Grid3& grid,
                               const SpaceTimeFunction& phi);

struct RhoTauRow {
  double epsilon;
  double magnitude;
};

std::vector<RhoTauRow> rho_tau_independence(const std::vector<RhoSeries>& runs, const Grid3& grid,
                                            const SpaceTimeFunction& phi);

}  // namespace ghl
