#pragma once

// Particle-in-cell Vlasov-Poisson: the finite-eps system with subcycling
// (field frozen over a macro step, exact_split micro steps) and the
// homogenized system (parallel transport and parallel force only).

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ghlab/characteristics.hpp"
#include "ghlab/distributions.hpp"
#include "ghlab/poisson.hpp"
#include "ghlab/twoscale.hpp"

namespace ghl {

enum class VPMode { finite_eps, homogenized };
std::string to_string(VPMode mode);

struct VPRunConfig {
  Grid3 grid = Grid3::cube(16);
  /// Strong axis, eps and horizon; its weak fields act as external fields on
  /// top of the self-consistent one.
  FieldConfig cfg = FieldConfig::strong_only(0.05, UnitAxis(e1), 1.0);
  std::size_t particles = 100000;
  double dt_macro = 0.02;
  int substeps = 2;
  double horizon = 1.0;
  std::uint64_t seed = 1;
  VPMode mode = VPMode::finite_eps;
  /// Record rho at every micro step (finite eps) or macro step (homogenized).
  bool record_rho = true;
  /// Track the continuity residual (finite eps only).
  bool track_continuity = true;
  /// Keep the macro-step grids of rho and E for compare_runs.
  bool keep_fields = true;

  double dt_micro() const { return dt_macro / substeps; }
  int macro_steps() const;
  /// Checks dt_macro > 0, substeps >= 1, horizon within the field horizon, a
  /// whole number of macro steps, and dt_micro <= 2 pi eps / 16 (finite eps).
  void validate() const;
};

struct StepRecord {
  int step = 0;
  double t = 0.0;
  double mass = 0.0;
  double kinetic_energy = 0.0;
  double field_energy = 0.0;
  double total_energy = 0.0;
  double rho_l75 = 0.0;
  double j_l76 = 0.0;
};

/// Low Fourier modes of the particle density and current,
/// rho_k = sum w exp(-i k.x), J_k = sum w v exp(-i k.x), k = 2 pi m / L, over
/// one representative m of each +-pair with 0 < max |m_i| <= kmax.
struct LowModeMoments {
  std::vector<std::array<int, 3>> modes;
  std::vector<Vec3> wavevectors;
  std::vector<std::complex<double>> rho;
  std::vector<std::array<std::complex<double>, 3>> current;
};

LowModeMoments low_mode_moments(const ParticleEnsemble& ens, const Vec3& lengths, int kmax);

/// Residual of d(rho_k)/dt + i k.J_k on the low modes, the time derivative the
/// fourth-order centred difference over five consecutive micro steps. relative = ||residual||
/// / ||k.J||, summed over the modes.
/// grid_* is the same residual on the grid: CIC rho with the second-order
/// centred difference and the spectral divergence of the CIC current, low-passed
/// to |m_i| <= kmax. It carries the aliased particle noise of the two deposits
/// and is reported for information only.
struct ContinuityStats {
  int kmax = 2;
  double max_relative = 0.0;
  double mean_relative = 0.0;
  int samples = 0;
  double grid_max_relative = 0.0;
  double grid_mean_relative = 0.0;
};

struct VPRunResult {
  VPMode mode = VPMode::finite_eps;
  double epsilon = 0.0;
  std::vector<StepRecord> steps;
  RhoSeries rho_series;
  /// Macro-step grids (when keep_fields).
  std::vector<double> field_times;
  std::vector<ScalarField> rho_history;
  std::vector<VectorField> e_history;
  ContinuityStats continuity;
  /// Sum of the weights before the first step; final_state keeps the end.
  double initial_weight = 0.0;
  ParticleEnsemble final_state;
  double seconds = 0.0;
};

/// One macro step of the finite-eps system from time t: deposit, solve, then
/// `substeps` exact_split micro steps under the frozen field. `on_micro` (if
/// set) runs after every micro step with the time reached.
void step_finite_eps(ParticleEnsemble& ens, PoissonSolver& solver, const FieldConfig& cfg,
                     double t, double dt_macro, int substeps,
                     const std::function<void(const ParticleEnsemble&, double)>& on_micro = {});

/// One RK4 step of dX/dt = v_par, dV/dt = E_par (+ external limit forces)
/// with the field frozen at the value solved from the current positions.
void step_homogenized(ParticleEnsemble& ens, PoissonSolver& solver, const FieldConfig& cfg,
                      double t, double dt_macro);

/// Samples f0 (finite eps) or its gyroaverage (homogenized) and runs to the
/// horizon.
VPRunResult run_vp(const VPRunConfig& config, const VelocityFunction& f0);

/// Runs from a given ensemble.
VPRunResult run_vp(const VPRunConfig& config, ParticleEnsemble ensemble);

struct CompareRow {
  double epsilon = 0.0;
  /// max over test functions of |int int (rho^eps - rho) phi dt dx|
  double rho_weak = 0.0;
  /// (1/T) int ||E^eps - E||_L2 dt
  double e_l2 = 0.0;
  /// |int int rho^eps cos(t / eps) phi dt dx| for the first test function
  double rho_tau = 0.0;
};

/// Rejects runs with different grids or sample times.
CompareRow compare_runs(const VPRunResult& run_eps, const VPRunResult& run_limit,
                        const std::vector<SpaceTimeFunction>& tests, const Grid3& grid);

/// Space-time test functions used by default: a t bump inside (0, T) times
/// smooth periodic x profiles.
std::vector<SpaceTimeFunction> default_space_time_tests(double horizon);

/// CSV columns step, t, mass, kinetic_energy, field_energy, total_energy,
/// rho_l75, j_l76.
void write_step_csv(const std::string& path, const std::vector<StepRecord>& steps);

}  // namespace ghl
