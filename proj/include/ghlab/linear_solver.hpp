#pragma once

// Pointwise solutions of the linear problems by backward characteristics:
// f_eps of the stiff equation, f of the homogenized equation and the profile G
// (with G(0) = f0 / 2pi) whose rotation F(t, tau, x, v) = G(t, x, u(v, tau)) is
// the two-scale limit.

#include "ghlab/characteristics.hpp"
#include "ghlab/distributions.hpp"
#include "ghlab/gyroaverage.hpp"

namespace ghl {

enum class Variant { magnetic_only, magnetic_plus_drift };

struct LinearProblem {
  FieldConfig cfg;
  VelocityFunction f0;
  Variant variant = Variant::magnetic_only;

  double horizon() const { return cfg.horizon(); }
  std::optional<UnitAxis> drift() const {
    return variant == Variant::magnetic_plus_drift ? cfg.drift() : std::nullopt;
  }
  /// Throws std::invalid_argument when the variant and the drift axis disagree.
  void validate() const;
  LinearProblem with_epsilon(double eps) const { return {cfg.with_epsilon(eps), f0, variant}; }
};

class LinearSolver {
 public:
  explicit LinearSolver(LinearProblem problem, IntegratorSettings settings = {},
                        GyroQuadrature gyro = GyroQuadrature(64));

  const LinearProblem& problem() const { return problem_; }
  const IntegratorSettings& settings() const { return settings_; }
  const VelocityFunction& limit_initial_data() const { return limit_f0_; }
  const LimitDynamics& limit_dynamics() const { return dynamics_; }

  /// (X(0), V(0)) of the stiff characteristic through (x, v) at time t.
  PhasePoint origin_full(double t, const Vec3& x, const Vec3& v) const;
  /// (X(0), V(0)) of the homogenized characteristic through (x, v) at time t.
  PhasePoint origin_limit(double t, const Vec3& x, const Vec3& v) const;

  double f_eps(double t, const Vec3& x, const Vec3& v) const;
  double f_limit(double t, const Vec3& x, const Vec3& v) const;
  double G(double t, const Vec3& x, const Vec3& u) const;
  /// F(t, tau, x, v) = G(t, x, u(v, tau)).
  double F(double t, double tau, const Vec3& x, const Vec3& v) const;

  /// Both flows commute with x-translations when the weak fields are constant:
  /// origin(t, x, v) = origin(t, 0, v) + (x, 0).
  bool translation_invariant() const { return problem_.cfg.weak_fields_constant(); }

 private:
  IntegratorSettings settings_for(double span) const;

  LinearProblem problem_;
  IntegratorSettings settings_;
  VelocityFunction limit_f0_;
  LimitDynamics dynamics_;
};

double eval_f_eps(const LinearProblem& prob, double t, const Vec3& x, const Vec3& v,
                  const IntegratorSettings& settings);
double eval_f_limit(const LinearProblem& prob, double t, const Vec3& x, const Vec3& v,
                    const IntegratorSettings& settings);
double eval_G(const LinearProblem& prob, double t, const Vec3& x, const Vec3& u,
              const IntegratorSettings& settings);

}  // namespace ghl
