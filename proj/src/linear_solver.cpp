#include "ghlab/linear_solver.hpp"

#include <numbers>
#include <stdexcept>

namespace ghl {

void LinearProblem::validate() const {
  if (variant == Variant::magnetic_plus_drift && !cfg.drift()) {
    throw std::invalid_argument("LinearProblem: magnetic_plus_drift requires a drift axis n");
  }
  if (variant == Variant::magnetic_only && cfg.drift()) {
    throw std::invalid_argument("LinearProblem: magnetic_only problem must not configure n");
  }
  if (!f0.eval) throw std::invalid_argument("LinearProblem: f0 has no density");
}

LinearSolver::LinearSolver(LinearProblem problem, IntegratorSettings settings, GyroQuadrature gyro)
    : problem_(std::move(problem)),
      settings_(settings),
      limit_f0_(ghl::limit_initial_data(problem_.f0, problem_.cfg.axis(), gyro, problem_.drift())),
      dynamics_(problem_.cfg.axis(), problem_.drift()) {
  problem_.validate();
  settings_.validate(problem_.cfg.epsilon());
}

IntegratorSettings LinearSolver::settings_for(double span) const {
  // With vanishing weak fields both flows are exact in a single step.
  if (problem_.cfg.weak_fields_vanish() && settings_.scheme == Scheme::exact_split && span > 0.0) {
    IntegratorSettings s = settings_;
    s.dt = span;
    return s;
  }
  return settings_;
}

PhasePoint LinearSolver::origin_full(double t, const Vec3& x, const Vec3& v) const {
  return push_full(PhasePoint{x, v}, problem_.cfg, t, 0.0, settings_for(t));
}

PhasePoint LinearSolver::origin_limit(double t, const Vec3& x, const Vec3& v) const {
  const FieldConfig& cfg = problem_.cfg;
  cfg.check_time(t);
  auto weak = [&cfg](double s, const Vec3& y) { return cfg.weak_unchecked(s, y); };
  IntegratorSettings s = settings_;
  if (cfg.weak_fields_vanish() && t > 0.0) s.dt = t;
  return push_limit_with(PhasePoint{x, v}, dynamics_, weak, t, 0.0, s);
}

double LinearSolver::f_eps(double t, const Vec3& x, const Vec3& v) const {
  const PhasePoint o = origin_full(t, x, v);
  return problem_.f0(o.x, o.v);
}

double LinearSolver::f_limit(double t, const Vec3& x, const Vec3& v) const {
  const PhasePoint o = origin_limit(t, x, v);
  return limit_f0_(o.x, o.v);
}

double LinearSolver::G(double t, const Vec3& x, const Vec3& u) const {
  const PhasePoint o = origin_limit(t, x, u);
  return problem_.f0(o.x, o.v) / (2.0 * std::numbers::pi);
}

double LinearSolver::F(double t, double tau, const Vec3& x, const Vec3& v) const {
  const auto drift = problem_.drift();
  const Vec3 u = drift ? drift_rotation(v, tau, problem_.cfg.axis(), *drift)
                       : rotate_about_axis(v, tau, problem_.cfg.axis());
  return G(t, x, u);
}

double eval_f_eps(const LinearProblem& prob, double t, const Vec3& x, const Vec3& v,
                  const IntegratorSettings& settings) {
  return LinearSolver(prob, settings).f_eps(t, x, v);
}

double eval_f_limit(const LinearProblem& prob, double t, const Vec3& x, const Vec3& v,
                    const IntegratorSettings& settings) {
  return LinearSolver(prob, settings).f_limit(t, x, v);
}

double eval_G(const LinearProblem& prob, double t, const Vec3& x, const Vec3& u,
              const IntegratorSettings& settings) {
  return LinearSolver(prob, settings).G(t, x, u);
}

}  // namespace ghl
