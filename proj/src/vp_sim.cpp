#include "ghlab/vp_sim.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "ghlab/csv.hpp"
#include "ghlab/gyroaverage.hpp"
#include "ghlab/parallel.hpp"
#include "ghlab/sampling.hpp"

namespace ghl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kPushBlock = 4096;

constexpr std::size_t kMomentBlock = 8192;

}  // namespace

std::string to_string(VPMode mode) {
  return mode == VPMode::finite_eps ? "finite_eps" : "homogenized";
}

int VPRunConfig::macro_steps() const {
  return static_cast<int>(std::llround(horizon / dt_macro));
}

void VPRunConfig::validate() const {
  if (!(dt_macro > 0.0) || !std::isfinite(dt_macro)) {
    throw std::invalid_argument("vp run: dt_macro must be finite and > 0");
  }
  if (substeps < 1) throw std::invalid_argument("vp run: substeps must be >= 1");
  if (particles == 0) throw std::invalid_argument("vp run: particle count must be > 0");
  if (!(horizon > 0.0)) throw std::invalid_argument("vp run: horizon must be > 0");
  if (horizon > cfg.horizon() * (1.0 + 1e-12)) {
    throw std::invalid_argument("vp run: horizon exceeds the field configuration horizon");
  }
  const double steps = horizon / dt_macro;
  if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
    throw std::invalid_argument("vp run: horizon must be a whole number of macro steps");
  }
  if (cfg.drift()) throw std::invalid_argument("vp run: the drift axis n is not supported");
  if (mode == VPMode::finite_eps && dt_micro() > kTwoPi * cfg.epsilon() / 16.0 * (1.0 + 1e-12)) {
    throw std::invalid_argument("vp run: dt_macro / substeps = " + std::to_string(dt_micro()) +
                                " exceeds 2 pi eps / 16 = " +
                                std::to_string(kTwoPi * cfg.epsilon() / 16.0));
  }
}

LowModeMoments low_mode_moments(const ParticleEnsemble& ens, const Vec3& lengths, int kmax) {
  if (kmax < 1) throw std::invalid_argument("low_mode_moments: kmax must be >= 1");
  using C = std::complex<double>;
  LowModeMoments out;
  for (int a = -kmax; a <= kmax; ++a)
    for (int b = -kmax; b <= kmax; ++b)
      for (int c = -kmax; c <= kmax; ++c) {
        const bool positive = a > 0 || (a == 0 && (b > 0 || (b == 0 && c > 0)));
        if (!positive) continue;
        out.modes.push_back({a, b, c});
        out.wavevectors.push_back(
            Vec3{kTwoPi * a / lengths.x, kTwoPi * b / lengths.y, kTwoPi * c / lengths.z});
      }
  const std::size_t nm = out.modes.size();
  const int span = 2 * kmax + 1;
  const std::size_t blocks = block_count(ens.size(), kMomentBlock);
  // Per block: rho then three current components for every mode.
  std::vector<std::vector<C>> partial(blocks, std::vector<C>(4 * nm));
  parallel_blocks(ens.size(), kMomentBlock, [&](const BlockRange& r) {
    std::vector<C>& acc = partial[r.index];
    // Real arithmetic: std::complex products go through the slow NaN-safe path.
    std::array<std::vector<double>, 3> re, im;
    for (int d = 0; d < 3; ++d) {
      re[d].resize(span);
      im[d].resize(span);
    }
    for (std::size_t n = r.begin; n < r.end; ++n) {
      for (int d = 0; d < 3; ++d) {
        const double phase = -kTwoPi * ens.x[n][d] / lengths[d];
        const double cr = std::cos(phase), ci = std::sin(phase);
        re[d][kmax] = 1.0;
        im[d][kmax] = 0.0;
        for (int m = 1; m <= kmax; ++m) {
          const double pr = re[d][kmax + m - 1], pi = im[d][kmax + m - 1];
          re[d][kmax + m] = pr * cr - pi * ci;
          im[d][kmax + m] = pr * ci + pi * cr;
          re[d][kmax - m] = re[d][kmax + m];
          im[d][kmax - m] = -im[d][kmax + m];
        }
      }
      const double w = ens.w[n];
      const Vec3& v = ens.v[n];
      for (std::size_t k = 0; k < nm; ++k) {
        const auto& m = out.modes[k];
        const int a = kmax + m[0], b = kmax + m[1], c = kmax + m[2];
        const double yr = re[1][b] * re[2][c] - im[1][b] * im[2][c];
        const double yi = re[1][b] * im[2][c] + im[1][b] * re[2][c];
        const double er = w * (re[0][a] * yr - im[0][a] * yi);
        const double ei = w * (re[0][a] * yi + im[0][a] * yr);
        acc[4 * k] += C(er, ei);
        acc[4 * k + 1] += C(v.x * er, v.x * ei);
        acc[4 * k + 2] += C(v.y * er, v.y * ei);
        acc[4 * k + 3] += C(v.z * er, v.z * ei);
      }
    }
  });
  out.rho.assign(nm, C{});
  out.current.assign(nm, {C{}, C{}, C{}});
  for (const auto& acc : partial) {
    for (std::size_t k = 0; k < nm; ++k) {
      out.rho[k] += acc[4 * k];
      for (int d = 0; d < 3; ++d) out.current[k][d] += acc[4 * k + 1 + d];
    }
  }
  return out;
}

void step_finite_eps(ParticleEnsemble& ens, PoissonSolver& solver, const FieldConfig& cfg,
                     double t, double dt_macro, int substeps,
                     const std::function<void(const ParticleEnsemble&, double)>& on_micro) {
  if (substeps < 1) throw std::invalid_argument("step_finite_eps: substeps must be >= 1");
  const PoissonSolution field = solver.solve(deposit_charge(ens, solver.grid()));
  const StiffFlow stiff(cfg);
  const double h = dt_macro / substeps;
  auto weak = [&](double time, const Vec3& x) {
    FieldSample f = cfg.weak_unchecked(time, x);
    f.E += interpolate(field.E, x);
    return f;
  };
  for (int s = 0; s < substeps; ++s) {
    const double ts = t + s * h;
    parallel_blocks(ens.size(), kPushBlock, [&](const BlockRange& r) {
      for (std::size_t n = r.begin; n < r.end; ++n) {
        PhasePoint p{ens.x[n], ens.v[n]};
        exact_split_step(p, stiff, weak, ts, h);
        detail::check_bound(p, 1e6);
        ens.x[n] = solver.grid().wrap(p.x);
        ens.v[n] = p.v;
      }
    });
    if (on_micro) on_micro(ens, ts + h);
  }
}

void step_homogenized(ParticleEnsemble& ens, PoissonSolver& solver, const FieldConfig& cfg,
                      double t, double dt_macro) {
  const PoissonSolution field = solver.solve(deposit_charge(ens, solver.grid()));
  const LimitDynamics dyn(cfg.axis());
  auto weak = [&](double time, const Vec3& x) {
    FieldSample f = cfg.weak_unchecked(time, x);
    f.E += interpolate(field.E, x);
    return f;
  };
  IntegratorSettings settings;
  settings.dt = dt_macro;
  parallel_blocks(ens.size(), kPushBlock, [&](const BlockRange& r) {
    for (std::size_t n = r.begin; n < r.end; ++n) {
      const PhasePoint p = push_limit_with(PhasePoint{ens.x[n], ens.v[n]}, dyn, weak, t,
                                           t + dt_macro, settings);
      ens.x[n] = solver.grid().wrap(p.x);
      ens.v[n] = p.v;
    }
  });
}

VPRunResult run_vp(const VPRunConfig& config, const VelocityFunction& f0) {
  config.validate();
  if (config.mode == VPMode::finite_eps) {
    return run_vp(config, sample_initial(f0, config.particles, config.seed));
  }
  const VelocityFunction limit = limit_initial_data(f0, config.cfg.axis(), GyroQuadrature(64));
  return run_vp(config, sample_initial(limit, config.particles, config.seed));
}

VPRunResult run_vp(const VPRunConfig& config, ParticleEnsemble ens) {
  config.validate();
  ens.validate();
  const auto start = std::chrono::steady_clock::now();
  const Grid3& grid = config.grid;
  PoissonSolver solver(grid);
  for (Vec3& x : ens.x) x = grid.wrap(x);

  VPRunResult out;
  out.mode = config.mode;
  out.epsilon = config.cfg.epsilon();
  out.rho_series.epsilon = config.cfg.epsilon();
  out.initial_weight = ens.total_weight();
  const bool finite = config.mode == VPMode::finite_eps;
  const bool continuity = finite && config.track_continuity;
  const double cell = grid.cell_volume();

  auto record_macro = [&](int step, double t) {
    const ScalarField rho = deposit_charge(ens, grid);
    const VectorField j = deposit_current(ens, grid);
    const PoissonSolution field = solver.solve(rho);
    StepRecord r;
    r.step = step;
    r.t = t;
    double charge = 0.0;
    for (double v : rho.values) charge += v;
    r.mass = charge * cell;
    r.kinetic_energy = ens.kinetic_energy();
    r.field_energy = field_energy(field.E);
    r.total_energy = r.kinetic_energy + r.field_energy;
    r.rho_l75 = lp_norm(rho, 7.0 / 5.0);
    r.j_l76 = lp_norm(j, 7.0 / 6.0);
    out.steps.push_back(r);
    if (config.keep_fields) {
      out.field_times.push_back(t);
      out.rho_history.push_back(rho);
      out.e_history.push_back(field.E);
    }
    if (config.record_rho && !finite) {
      out.rho_series.times.push_back(t);
      out.rho_series.rho.push_back(rho.values);
    }
  };

  // Continuity bookkeeping: five consecutive micro steps, residual at the
  // middle one with the fourth-order centred difference.
  std::deque<LowModeMoments> window;
  std::deque<ScalarField> rho_window;
  std::optional<ScalarField> divj_mid;
  double rel_sum = 0.0, grid_sum = 0.0;
  int grid_samples = 0;
  out.continuity.kmax = 2;
  const double h = config.dt_micro();
  auto l2 = [cell](const ScalarField& f) {
    double s = 0.0;
    for (double v : f.values) s += v * v;
    return std::sqrt(s * cell);
  };
  auto on_micro = [&](const ParticleEnsemble& e, double t) {
    if (!config.record_rho && !continuity) return;
    const ScalarField rho = deposit_charge(e, grid);
    if (config.record_rho) {
      out.rho_series.times.push_back(t);
      out.rho_series.rho.push_back(rho.values);
    }
    if (!continuity) return;

    rho_window.push_back(rho);
    if (rho_window.size() > 3) rho_window.pop_front();
    if (rho_window.size() == 3 && divj_mid) {
      ScalarField res(grid);
      for (std::size_t n = 0; n < res.values.size(); ++n) {
        res.values[n] = (rho_window[2].values[n] - rho_window[0].values[n]) / (2.0 * h) +
                        divj_mid->values[n];
      }
      const int kmax = out.continuity.kmax;
      const double den = l2(solver.low_pass(*divj_mid, kmax));
      const double rel = l2(solver.low_pass(res, kmax)) / (den > 0.0 ? den : 1.0);
      out.continuity.grid_max_relative = std::max(out.continuity.grid_max_relative, rel);
      grid_sum += rel;
      ++grid_samples;
    }
    divj_mid = solver.divergence(deposit_current(e, grid));

    window.push_back(low_mode_moments(e, grid.lengths(), out.continuity.kmax));
    if (window.size() > 5) window.pop_front();
    if (window.size() < 5) return;
    const LowModeMoments& mid = window[2];
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < mid.modes.size(); ++k) {
      const Vec3& kv = mid.wavevectors[k];
      const auto& j = mid.current[k];
      const std::complex<double> kj = kv.x * j[0] + kv.y * j[1] + kv.z * j[2];
      const std::complex<double> drho =
          (window[0].rho[k] - 8.0 * window[1].rho[k] + 8.0 * window[3].rho[k] - window[4].rho[k]) /
          (12.0 * h);
      const std::complex<double> r = drho + std::complex<double>(0.0, 1.0) * kj;
      num += std::norm(r);
      den += std::norm(kj);
    }
    const double rel = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    out.continuity.max_relative = std::max(out.continuity.max_relative, rel);
    rel_sum += rel;
    ++out.continuity.samples;
  };

  on_micro(ens, 0.0);
  const int steps = config.macro_steps();
  for (int n = 0; n < steps; ++n) {
    const double t = n * config.dt_macro;
    record_macro(n, t);
    if (finite) {
      step_finite_eps(ens, solver, config.cfg, t, config.dt_macro, config.substeps, on_micro);
    } else {
      step_homogenized(ens, solver, config.cfg, t, config.dt_macro);
    }
  }
  record_macro(steps, steps * config.dt_macro);
  if (out.continuity.samples > 0) out.continuity.mean_relative = rel_sum / out.continuity.samples;
  if (grid_samples > 0) out.continuity.grid_mean_relative = grid_sum / grid_samples;
  out.final_state = std::move(ens);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

CompareRow compare_runs(const VPRunResult& run_eps, const VPRunResult& run_limit,
                        const std::vector<SpaceTimeFunction>& tests, const Grid3& grid) {
  const auto& ta = run_eps.field_times;
  const auto& tb = run_limit.field_times;
  if (ta.size() != tb.size() || ta.size() < 2) {
    throw std::invalid_argument("compare_runs: runs have different (or too few) field samples");
  }
  for (std::size_t n = 0; n < ta.size(); ++n) {
    if (std::abs(ta[n] - tb[n]) > 1e-12 * std::max(1.0, std::abs(ta[n]))) {
      throw std::invalid_argument("compare_runs: sample times differ");
    }
    if (!(run_eps.rho_history[n].grid == grid) || !(run_limit.rho_history[n].grid == grid)) {
      throw std::invalid_argument("compare_runs: grid mismatch");
    }
  }
  const double cell = grid.cell_volume();
  // Trapezoid weights in time.
  std::vector<double> tw(ta.size(), 0.0);
  for (std::size_t n = 1; n < ta.size(); ++n) {
    const double dt = ta[n] - ta[n - 1];
    tw[n - 1] += 0.5 * dt;
    tw[n] += 0.5 * dt;
  }
  CompareRow row;
  row.epsilon = run_eps.epsilon;
  for (const SpaceTimeFunction& phi : tests) {
    double total = 0.0;
    for (std::size_t n = 0; n < ta.size(); ++n) {
      const auto& ra = run_eps.rho_history[n].values;
      const auto& rb = run_limit.rho_history[n].values;
      double s = 0.0;
      for (int i = 0; i < grid.cells()[0]; ++i)
        for (int j = 0; j < grid.cells()[1]; ++j)
          for (int k = 0; k < grid.cells()[2]; ++k) {
            const std::size_t idx = grid.index(i, j, k);
            s += (ra[idx] - rb[idx]) * phi(ta[n], grid.node(i, j, k));
          }
      total += tw[n] * s * cell;
    }
    row.rho_weak = std::max(row.rho_weak, std::abs(total));
  }
  double e_int = 0.0;
  for (std::size_t n = 0; n < ta.size(); ++n) {
    const auto& ea = run_eps.e_history[n].values;
    const auto& eb = run_limit.e_history[n].values;
    double s = 0.0;
    for (std::size_t idx = 0; idx < ea.size(); ++idx) s += norm2(ea[idx] - eb[idx]);
    e_int += tw[n] * std::sqrt(s * cell);
  }
  row.e_l2 = e_int / (ta.back() - ta.front());
  if (!tests.empty() && run_eps.mode == VPMode::finite_eps && run_eps.rho_series.times.size() > 1) {
    row.rho_tau = rho_oscillation_pairing(run_eps.rho_series, grid, tests.front());
  }
  return row;
}

std::vector<SpaceTimeFunction> default_space_time_tests(double horizon) {
  const Bump tb{0.5 * horizon, 0.5 * horizon};
  std::vector<SpaceTimeFunction> out;
  out.push_back([tb](double t, const Vec3& x) {
    return tb(t) * std::cos(kTwoPi * (x.x + x.y));
  });
  out.push_back([tb](double t, const Vec3& x) {
    return tb(t) * std::sin(kTwoPi * (x.x + x.y));
  });
  out.push_back([tb](double t, const Vec3& x) {
    return tb(t) * std::cos(kTwoPi * x.x) * std::cos(kTwoPi * x.y);
  });
  return out;
}

void write_step_csv(const std::string& path, const std::vector<StepRecord>& steps) {
  CsvWriter csv(path, {"step", "t", "mass", "kinetic_energy", "field_energy", "total_energy",
                       "rho_l75", "j_l76"});
  for (const StepRecord& r : steps) {
    csv.row({static_cast<long long>(r.step), r.t, r.mass, r.kinetic_energy, r.field_energy,
             r.total_energy, r.rho_l75, r.j_l76});
  }
}

}  // namespace ghl
