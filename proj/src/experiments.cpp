#include "ghlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>

#include "ghlab/csv.hpp"
#include "ghlab/gyroaverage.hpp"
#include "ghlab/poisson.hpp"

namespace ghl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

std::string prepare(const RunOptions& options) {
  const std::string dir = options.out_dir.empty() ? "." : options.out_dir;
  std::filesystem::create_directories(dir);
  return dir;
}

std::string sci(double v) { return format_scientific(v); }

// Gate: every value strictly below the previous one.
GateResult decreasing(const std::string& name, const std::vector<double>& values) {
  GateResult g{name, true, ""};
  for (std::size_t n = 1; n < values.size(); ++n) {
    if (!(values[n] < values[n - 1])) g.passed = false;
  }
  for (std::size_t n = 0; n < values.size(); ++n) g.detail += (n ? " " : "") + sci(values[n]);
  return g;
}

// Uniform point in the central third of [lo, hi], where the bulk of a
// Gaussian with a 6 sigma support lives.
Vec3 central_point(const Vec3& lo, const Vec3& hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(1.0 / 3.0, 2.0 / 3.0);
  Vec3 out;
  for (int a = 0; a < 3; ++a) out[a] = lo[a] + u(rng) * (hi[a] - lo[a]);
  return out;
}

}  // namespace

bool ExperimentOutcome::passed() const {
  return std::all_of(gates.begin(), gates.end(), [](const GateResult& g) { return g.passed; });
}

void write_plotdata(const std::string& path, const std::vector<PlotPoint>& points) {
  CsvWriter csv(path, {"x", "y", "series"});
  for (const PlotPoint& p : points) csv.row({p.x, p.y, p.series});
}

std::vector<PlotPoint> sweep_plotdata(const std::vector<PairingResult>& rows) {
  std::vector<PlotPoint> out;
  out.reserve(rows.size());
  for (const PairingResult& r : rows) out.push_back({r.epsilon, r.abs_error, r.test_id});
  return out;
}

std::vector<PlotPoint> energy_plotdata(const std::vector<StepRecord>& steps) {
  std::vector<PlotPoint> out;
  for (const char* series : {"kinetic_energy", "field_energy", "total_energy"}) {
    for (const StepRecord& s : steps) {
      const double y = series[0] == 'k'   ? s.kinetic_energy
                       : series[0] == 'f' ? s.field_energy
                                          : s.total_energy;
      out.push_back({s.t, y, series});
    }
  }
  return out;
}

void write_gate_summary(const std::string& path, const std::vector<GateResult>& gates) {
  CsvWriter csv(path, {"gate", "passed", "detail"});
  for (const GateResult& g : gates) {
    csv.row({g.name, static_cast<long long>(g.passed ? 1 : 0), g.detail});
  }
}

ExperimentOutcome run_linear_sweep(const ExperimentConfig& config, const RunOptions& options) {
  const std::string dir = prepare(options);
  const double eps0 = config.epsilons.front();
  const LinearProblem prob = config.linear_problem(eps0);
  const IntegratorSettings settings = config.integrator.build(eps0);
  const auto tests = config.test_suite();
  const SweepReport report =
      convergence_sweep(prob, tests, config.epsilons, config.quadrature, settings);

  ExperimentOutcome out;
  out.files.push_back(join(dir, "pairing.csv"));
  write_pairing_csv(out.files.back(), report.rows, options.timing);

  // Per test: first and last error, informational log-log slope, gates.
  out.files.push_back(join(dir, "summary.csv"));
  CsvWriter summary(out.files.back(), {"test_id", "tau", "first_error", "last_error", "ratio",
                                       "slope", "monotone", "passed"});
  for (const TestFunction& psi : tests) {
    std::vector<double> errors;
    for (const PairingResult& r : report.rows) {
      if (r.test_id == psi.id) errors.push_back(r.abs_error);
    }
    const bool monotone =
        std::find(report.non_monotone.begin(), report.non_monotone.end(), psi.id) ==
        report.non_monotone.end();
    const double first = errors.front(), last = errors.back();
    const double ratio = first > 0.0 ? last / first : 0.0;
    const double slope =
        errors.size() > 1 && first > 0.0 && last > 0.0
            ? std::log(last / first) / std::log(config.epsilons.back() / config.epsilons.front())
            : 0.0;
    // tau-free tests carry the rate gate; oscillating ones only need a decrease.
    const bool passed = psi.tau_harmonics() == 0 ? monotone && last <= first / 3.0
                                                 : monotone && (errors.size() < 2 || last < first);
    summary.row({psi.id, to_string(psi.tau), first, last, ratio, slope,
                 static_cast<long long>(monotone ? 1 : 0), static_cast<long long>(passed ? 1 : 0)});
    out.gates.push_back({"pairing " + psi.id, passed, "ratio " + sci(ratio)});
  }
  out.files.push_back(join(dir, "plot_error_vs_eps.csv"));
  write_plotdata(out.files.back(), sweep_plotdata(report.rows));
  return out;
}

ExperimentOutcome run_drift_demo(const ExperimentConfig& config, const RunOptions& options) {
  const std::string dir = prepare(options);
  ExperimentOutcome out;
  const VelocityFunction f0 = config.f0.build();
  const std::vector<Vec3> velocities{config.f0.v_drift, Vec3{0.0, 1.0, 0.0},
                                     Vec3{0.5, -0.3, 0.8}};
  const Vec3 x0 = 0.5 * (f0.support.x_lo + f0.support.x_hi);
  const double span = std::min(1.0, config.fields.horizon);

  out.files.push_back(join(dir, "drift.csv"));
  CsvWriter drift(out.files.back(), {"epsilon", "sample", "avg_vx", "avg_vy", "avg_vz",
                                     "expected_x", "expected_y", "expected_z", "error"});
  out.files.push_back(join(dir, "trajectory.csv"));
  CsvWriter traj(out.files.back(), {"t", "series", "x", "y", "z"});

  double worst = 0.0;
  bool exact_case = true;
  for (double eps : config.epsilons) {
    const FieldConfig cfg = config.fields.build(eps);
    exact_case = exact_case && cfg.weak_fields_vanish();
    const IntegratorSettings settings = config.integrator.build(eps);
    const LimitDynamics dyn(cfg.axis(), cfg.drift());
    const double period = kTwoPi * eps;
    for (std::size_t s = 0; s < velocities.size(); ++s) {
      const PhasePoint p{x0, velocities[s]};
      if (period > cfg.horizon()) break;
      // Mean velocity over one fast period is the displacement over the period.
      const PhasePoint q = push_full(p, cfg, 0.0, period, settings);
      const Vec3 avg = (q.x - p.x) / period;
      // Parallel velocity plus the n x M drift.
      const Vec3& m = cfg.axis().direction();
      const Vec3 expected = dot(p.v, m) * m + dyn.drift_velocity();
      const double err = norm(avg - expected);
      worst = std::max(worst, err);
      drift.row({eps, static_cast<long long>(s), avg.x, avg.y, avg.z, expected.x, expected.y,
                 expected.z, err});
    }
    // Full and limit trajectories of the first sample.
    const int samples = 64;
    PhasePoint full{x0, velocities.front()};
    PhasePoint limit = full;
    const std::string series = "full eps=" + sci(eps);
    traj.row({0.0, series, full.x.x, full.x.y, full.x.z});
    auto weak = [&cfg](double t, const Vec3& x) { return cfg.weak_unchecked(t, x); };
    for (int k = 1; k <= samples; ++k) {
      const double t0 = span * (k - 1) / samples, t1 = span * k / samples;
      full = push_full(full, cfg, t0, t1, settings);
      traj.row({t1, series, full.x.x, full.x.y, full.x.z});
    }
    if (eps == config.epsilons.front()) {
      traj.row({0.0, std::string("limit"), limit.x.x, limit.x.y, limit.x.z});
      for (int k = 1; k <= samples; ++k) {
        const double t0 = span * (k - 1) / samples, t1 = span * k / samples;
        limit = push_limit_with(limit, dyn, weak, t0, t1, settings);
        traj.row({t1, std::string("limit"), limit.x.x, limit.x.y, limit.x.z});
      }
    }
  }
  if (exact_case) {
    out.gates.push_back({"gyro-averaged velocity equals n x M", worst <= 1e-10,
                         "max error " + sci(worst)});
  }
  return out;
}

ExperimentOutcome run_vp_single(const ExperimentConfig& config, const RunOptions& options) {
  const std::string dir = prepare(options);
  ExperimentOutcome out;
  const double eps = config.epsilons.front();
  const VPRunConfig rc = config.vp.build(config.fields, eps, config.vp.mode, config.seed);
  const VPRunResult run = run_vp(rc, config.f0.build());

  out.files.push_back(join(dir, "steps.csv"));
  write_step_csv(out.files.back(), run.steps);
  out.files.push_back(join(dir, "plot_energy.csv"));
  write_plotdata(out.files.back(), energy_plotdata(run.steps));
  if (config.vp.snapshot_every > 0) {
    for (std::size_t n = 0; n < run.field_times.size(); ++n) {
      if (n % config.vp.snapshot_every != 0 && n + 1 != run.field_times.size()) continue;
      char name[64];
      std::snprintf(name, sizeof name, "rho_%05zu.ghl", n);
      out.files.push_back(join(dir, name));
      write_snapshot(out.files.back(), run.rho_history[n]);
      std::snprintf(name, sizeof name, "E_%05zu.ghl", n);
      out.files.push_back(join(dir, name));
      write_snapshot(out.files.back(), run.e_history[n]);
    }
  }

  const double w1 = run.final_state.total_weight();
  out.gates.push_back({"particle weight constant", w1 == run.initial_weight,
                       sci(run.initial_weight) + " -> " + sci(w1)});
  double mass_dev = 0.0, energy_dev = 0.0;
  const StepRecord& s0 = run.steps.front();
  for (const StepRecord& s : run.steps) {
    mass_dev = std::max(mass_dev, std::abs(s.mass - s0.mass) / s0.mass);
    energy_dev = std::max(energy_dev, std::abs(s.total_energy - s0.total_energy) / s0.total_energy);
  }
  out.gates.push_back({"deposited charge constant", mass_dev <= 1e-12,
                       "max relative change " + sci(mass_dev)});
  if (rc.mode == VPMode::finite_eps) {
    out.gates.push_back({"energy drift", energy_dev <= config.vp.energy_tolerance,
                         "max relative change " + sci(energy_dev)});
    out.gates.push_back({"continuity residual",
                         run.continuity.max_relative <= config.vp.continuity_tolerance,
                         "max " + sci(run.continuity.max_relative) + " mean " +
                             sci(run.continuity.mean_relative)});
    out.files.push_back(join(dir, "continuity.csv"));
    CsvWriter c(out.files.back(), {"epsilon", "kmax", "samples", "max_relative", "mean_relative",
                                   "grid_max_relative", "grid_mean_relative"});
    c.row({eps, static_cast<long long>(run.continuity.kmax),
           static_cast<long long>(run.continuity.samples), run.continuity.max_relative,
           run.continuity.mean_relative, run.continuity.grid_max_relative,
           run.continuity.grid_mean_relative});
  }
  return out;
}

ExperimentOutcome run_vp_comparison(const ExperimentConfig& config, const RunOptions& options) {
  const std::string dir = prepare(options);
  ExperimentOutcome out;
  const VelocityFunction f0 = config.f0.build();
  const double eps0 = config.epsilons.front();
  const VPRunConfig lc = config.vp.build(config.fields, eps0, VPMode::homogenized, config.seed);
  const VPRunResult limit = run_vp(lc, f0);
  out.files.push_back(join(dir, "steps_homogenized.csv"));
  write_step_csv(out.files.back(), limit.steps);

  const auto tests = default_space_time_tests(config.vp.horizon);
  std::vector<CompareRow> rows;
  for (std::size_t n = 0; n < config.epsilons.size(); ++n) {
    const VPRunConfig rc =
        config.vp.build(config.fields, config.epsilons[n], VPMode::finite_eps, config.seed);
    const VPRunResult run = run_vp(rc, f0);
    out.files.push_back(join(dir, "steps_finite_" + std::to_string(n) + ".csv"));
    write_step_csv(out.files.back(), run.steps);
    rows.push_back(compare_runs(run, limit, tests, rc.grid));
  }
  out.files.push_back(join(dir, "compare.csv"));
  CsvWriter csv(out.files.back(), {"epsilon", "rho_weak", "e_l2", "rho_tau"});
  std::vector<PlotPoint> plot;
  std::vector<double> rho, e, tau;
  for (const CompareRow& r : rows) {
    csv.row({r.epsilon, r.rho_weak, r.e_l2, r.rho_tau});
    rho.push_back(r.rho_weak);
    e.push_back(r.e_l2);
    tau.push_back(r.rho_tau);
  }
  for (const CompareRow& r : rows) plot.push_back({r.epsilon, r.rho_weak, "rho_weak"});
  for (const CompareRow& r : rows) plot.push_back({r.epsilon, r.e_l2, "e_l2"});
  for (const CompareRow& r : rows) plot.push_back({r.epsilon, r.rho_tau, "rho_tau"});
  out.files.push_back(join(dir, "plot_compare.csv"));
  write_plotdata(out.files.back(), plot);
  out.gates.push_back(decreasing("rho weak discrepancy decreases", rho));
  out.gates.push_back(decreasing("E discrepancy decreases", e));
  out.gates.push_back(decreasing("rho tau pairing decreases", tau));
  return out;
}

ExperimentOutcome run_diagnostics(const ExperimentConfig& config, const RunOptions& options) {
  const std::string dir = prepare(options);
  ExperimentOutcome out;
  const DiagnosticsSection& d = config.diagnostics;
  const double t_max = *std::max_element(d.times.begin(), d.times.end());

  out.files.push_back(join(dir, "l2.csv"));
  CsvWriter l2(out.files.back(), {"epsilon", "t", "l2_squared", "relative_change"});
  double worst_l2 = 0.0;
  for (double eps : config.epsilons) {
    const LinearProblem prob = config.linear_problem(eps);
    const IntegratorSettings settings = config.integrator.build(eps);
    const PhaseBox box = evolved_support(prob, t_max);
    const double n0 = l2_norm_f(prob, 0.0, config.quadrature, settings, box);
    for (double t : d.times) {
      const double n = t == 0.0 ? n0 : l2_norm_f(prob, t, config.quadrature, settings, box);
      const double rel = std::abs(n - n0) / n0;
      worst_l2 = std::max(worst_l2, rel);
      l2.row({eps, t, n, rel});
    }
  }
  out.gates.push_back({"L2 norm constant", worst_l2 <= d.l2_tolerance,
                       "max relative change " + sci(worst_l2)});

  // Pointwise identities at random points.
  const VelocityFunction f0 = config.f0.build();
  const VelocityFunction G = f0.scaled(1.0 / kTwoPi);
  const UnitAxis axis(config.fields.axis);
  std::optional<UnitAxis> drift;
  if (config.variant == Variant::magnetic_plus_drift) drift = UnitAxis(*config.fields.drift);
  const double eps0 = config.epsilons.front();
  const LinearSolver solver(config.linear_problem(eps0), config.integrator.build(eps0));
  const GyroQuadrature quad(64);
  const VelocityFunction& lim = solver.limit_initial_data();
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0), sym(-1.0, 1.0);
  double r_constraint = 0.0, r_chain = 0.0, r_projection = 0.0, r_idempotent = 0.0;
  for (int k = 0; k < d.samples; ++k) {
    const Vec3 x = central_point(f0.support.x_lo, f0.support.x_hi, rng);
    const Vec3 v = central_point(f0.support.v_lo, f0.support.v_hi, rng);
    const double tau = kTwoPi * unit(rng);
    const Vec3 E{sym(rng), sym(rng), sym(rng)}, B{sym(rng), sym(rng), sym(rng)};
    const double t = config.fields.horizon * unit(rng);
    r_constraint = std::max(r_constraint, constraint_residual(G, x, tau, v, axis, drift));
    r_chain = std::max(r_chain, chain_rule_residual(G, x, tau, v, axis, E, B));
    r_projection = std::max(r_projection, projection_residual(solver, t, x, v, quad));
    const double avg = drift ? gyroaverage_drift(lim, x, v, axis, *drift, quad)
                             : gyroaverage(lim, x, v, axis, quad);
    r_idempotent = std::max(r_idempotent, std::abs(avg - lim(x, v)));
  }
  out.files.push_back(join(dir, "identities.csv"));
  CsvWriter ids(out.files.back(), {"check", "samples", "max_residual", "tolerance", "passed"});
  const struct {
    const char* name;
    double residual;
    double tolerance;
  } checks[] = {{"constraint", r_constraint, d.identity_tolerance},
                {"chain_rule", r_chain, d.identity_tolerance},
                {"projection", r_projection, 1e-10},
                {"gyroaverage_idempotent", r_idempotent, 1e-12}};
  for (const auto& c : checks) {
    const bool ok = c.residual <= c.tolerance;
    ids.row({std::string(c.name), static_cast<long long>(d.samples), c.residual, c.tolerance,
             static_cast<long long>(ok ? 1 : 0)});
    out.gates.push_back({c.name, ok, "max residual " + sci(c.residual)});
  }
  return out;
}

ExperimentOutcome run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  ExperimentOutcome out;
  switch (config.kind) {
    case ExperimentKind::linear_sweep: out = run_linear_sweep(config, options); break;
    case ExperimentKind::drift_demo: out = run_drift_demo(config, options); break;
    case ExperimentKind::vp_run: out = run_vp_single(config, options); break;
    case ExperimentKind::vp_compare: out = run_vp_comparison(config, options); break;
    case ExperimentKind::diagnostics: out = run_diagnostics(config, options); break;
  }
  const std::string dir = options.out_dir.empty() ? "." : options.out_dir;
  out.files.push_back(join(dir, "gates.csv"));
  write_gate_summary(out.files.back(), out.gates);
  return out;
}

}  // namespace ghl
