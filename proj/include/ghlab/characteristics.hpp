#pragma once

// Characteristic flows: the fast gyro-rotation (with and without the n/eps
// drift), the stiff finite-eps system and the homogenized limit systems.
//
// The stiff part dv/dt = (n + v x M)/eps is never integrated numerically in
// the production path: StiffFlow applies its closed-form solution (rotation
// about the drift-shifted centre, exact helix for the position). The weak
// fields enter through symmetric half kicks around it (Strang splitting).

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include "ghlab/fields.hpp"
#include "ghlab/geometry.hpp"

namespace ghl {

struct PhasePoint {
  Vec3 x;
  Vec3 v;
};

enum class Scheme { exact_split, rk4_oracle };

struct IntegratorSettings {
  double dt = 1e-2;
  int substeps_per_gyroperiod = 16;
  Scheme scheme = Scheme::exact_split;
  double velocity_bound = 1e6;

  /// Throws std::invalid_argument on dt <= 0, substeps < 8, or an RK4 step
  /// coarser than 2 pi eps / substeps.
  void validate(std::optional<double> epsilon = std::nullopt) const;
};

/// Raised when a trajectory leaves the configured velocity safety bound.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// V(tau; v, s) solving dV/dtau = V x M with V(s) = v.
/// fast_flow(v, 0, tau, M) == rotate_about_axis(v, tau, M).
Vec3 fast_flow(const Vec3& v, double tau, double s, const UnitAxis& axis);

/// V(tau; v, s) solving dV/dtau = n + V x M with V(s) = v; requires n _|_ M.
Vec3 fast_flow_drift(const Vec3& v, double tau, double s, const UnitAxis& axis,
                     const UnitAxis& drift);

/// u(v, tau) = V(0; v, tau) for the drift flow: rotation about the centre
/// -(M x n). For M = e1, n = e2:
/// (v1, v2 cos - (v3+1) sin, v2 sin + (v3+1) cos - 1).
Vec3 drift_rotation(const Vec3& v, double tau, const UnitAxis& axis, const UnitAxis& drift);

/// Exact flow of dx/dt = v, dv/dt = (n + v x M)/eps.
class StiffFlow {
 public:
  StiffFlow(const UnitAxis& axis, double epsilon, const std::optional<UnitAxis>& drift);
  explicit StiffFlow(const FieldConfig& cfg) : StiffFlow(cfg.axis(), cfg.epsilon(), cfg.drift()) {}

  /// Advances p by time h (any sign).
  void advance(PhasePoint& p, double h) const;

  const GyroFrame& frame() const { return frame_; }
  double epsilon() const { return eps_; }

 private:
  GyroFrame frame_;
  double eps_;
  bool has_drift_;
  Vec3 shift_;        // M x n, global frame
  Vec3 shift_local_;  // R (M x n)
};

/// dV/dt = V x B over time h: rotation by -|B| h about B.
Vec3 magnetic_rotation(const Vec3& v, const Vec3& b, double h);

namespace detail {

inline int step_count(double span, double dt) {
  const double n = std::ceil(std::abs(span) / dt - 1e-9);
  return n < 1.0 ? 1 : static_cast<int>(n);
}

inline void check_bound(const PhasePoint& p, double bound) {
  if (!is_finite(p.x) || !is_finite(p.v) || norm(p.v) > bound) {
    throw NumericalError("trajectory left the velocity safety bound (|v| = " +
                         std::to_string(norm(p.v)) + ")");
  }
}

/// v -> v + h/2 E, rotate by v x B over h, v + h/2 E.
inline void weak_kick(Vec3& v, const FieldSample& f, double h) {
  v += (0.5 * h) * f.E;
  v = magnetic_rotation(v, f.B, h);
  v += (0.5 * h) * f.E;
}

}  // namespace detail

/// One exact_split step of length h starting at time t. The weak fields are
/// sampled at the step's time midpoint, at the current position of each
/// half kick, which makes the step exactly time-reversible.
template <class FieldSource>
void exact_split_step(PhasePoint& p, const StiffFlow& stiff, const FieldSource& weak, double t,
                      double h) {
  const double tm = t + 0.5 * h;
  detail::weak_kick(p.v, weak(tm, p.x), 0.5 * h);
  stiff.advance(p, h);
  detail::weak_kick(p.v, weak(tm, p.x), 0.5 * h);
}

/// Characteristics of dX/dt = V, dV/dt = E + n/eps + V x (B + M/eps) from t0
/// to t1 (either direction). `weak` is any callable (t, x) -> FieldSample.
template <class FieldSource>
PhasePoint push_full(PhasePoint p, const FieldConfig& cfg, const FieldSource& weak, double t0,
                     double t1, const IntegratorSettings& settings) {
  settings.validate(cfg.epsilon());
  if (t0 == t1) return p;
  const int n = detail::step_count(t1 - t0, settings.dt);
  const double h = (t1 - t0) / n;
  if (settings.scheme == Scheme::exact_split) {
    const StiffFlow stiff(cfg);
    for (int i = 0; i < n; ++i) {
      exact_split_step(p, stiff, weak, t0 + i * h, h);
      detail::check_bound(p, settings.velocity_bound);
    }
    return p;
  }
  const Vec3 m_eps = cfg.axis().direction() / cfg.epsilon();
  const Vec3 n_eps = cfg.drift() ? cfg.drift()->direction() / cfg.epsilon() : Vec3{};
  auto force = [&](double t, const Vec3& x, const Vec3& v) {
    const FieldSample f = weak(t, x);
    return f.E + n_eps + cross(v, f.B + m_eps);
  };
  for (int i = 0; i < n; ++i) {
    const double t = t0 + i * h;
    const Vec3 k1x = p.v;
    const Vec3 k1v = force(t, p.x, p.v);
    const Vec3 k2x = p.v + 0.5 * h * k1v;
    const Vec3 k2v = force(t + 0.5 * h, p.x + 0.5 * h * k1x, k2x);
    const Vec3 k3x = p.v + 0.5 * h * k2v;
    const Vec3 k3v = force(t + 0.5 * h, p.x + 0.5 * h * k2x, k3x);
    const Vec3 k4x = p.v + h * k3v;
    const Vec3 k4v = force(t + h, p.x + h * k3x, k4x);
    p.x += (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    p.v += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    detail::check_bound(p, settings.velocity_bound);
  }
  return p;
}

/// push_full with the configuration's own analytic weak fields. With exact_split
/// and vanishing weak fields the whole span is one closed-form stiff step.
PhasePoint push_full(const PhasePoint& p, const FieldConfig& cfg, double t0, double t1,
                     const IntegratorSettings& settings);

/// Right-hand sides of the homogenized characteristics.
///   plain: dX/dt = v_par,              dV/dt = E_par + V x B_par
///   drift: dX/dt = v_par + n x M,      dV/dt = [E.M + ((n x M) x B).M] M + (V + M x n) x B_par
/// The drift form is the frame-free version of the M = e1, n = e2 system with
/// transport (v1, 0, -1).
class LimitDynamics {
 public:
  explicit LimitDynamics(const UnitAxis& axis, const std::optional<UnitAxis>& drift = std::nullopt);

  PhasePoint rhs(const FieldSample& f, const Vec3& v) const {
    const Vec3& m = axis_.direction();
    const double b_par = dot(f.B, m);
    if (!has_drift_) {
      return {dot(v, m) * m, dot(f.E, m) * m + b_par * cross(v, m)};
    }
    const double push = dot(f.E, m) + dot(cross(drift_velocity_, f.B), m);
    return {dot(v, m) * m + drift_velocity_, push * m + b_par * cross(v - drift_velocity_, m)};
  }

  const UnitAxis& axis() const { return axis_; }
  bool has_drift() const { return has_drift_; }
  /// n x M (zero without drift).
  const Vec3& drift_velocity() const { return drift_velocity_; }

 private:
  UnitAxis axis_;
  bool has_drift_;
  Vec3 drift_velocity_;
};

/// Classical RK4 on the homogenized system; no eps anywhere.
template <class FieldSource>
PhasePoint push_limit_with(PhasePoint p, const LimitDynamics& dyn, const FieldSource& weak,
                           double t0, double t1, const IntegratorSettings& settings) {
  if (!(settings.dt > 0.0)) throw std::invalid_argument("IntegratorSettings: dt must be > 0");
  if (t0 == t1) return p;
  const int n = detail::step_count(t1 - t0, settings.dt);
  const double h = (t1 - t0) / n;
  for (int i = 0; i < n; ++i) {
    const double t = t0 + i * h;
    const PhasePoint k1 = dyn.rhs(weak(t, p.x), p.v);
    const PhasePoint k2 = dyn.rhs(weak(t + 0.5 * h, p.x + 0.5 * h * k1.x), p.v + 0.5 * h * k1.v);
    const PhasePoint k3 = dyn.rhs(weak(t + 0.5 * h, p.x + 0.5 * h * k2.x), p.v + 0.5 * h * k2.v);
    const PhasePoint k4 = dyn.rhs(weak(t + h, p.x + h * k3.x), p.v + h * k3.v);
    p.x += (h / 6.0) * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    p.v += (h / 6.0) * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
    detail::check_bound(p, settings.velocity_bound);
  }
  return p;
}

/// Homogenized characteristics dX/dt = v_par, dV/dt = E_par + V x B_par.
PhasePoint push_limit(const PhasePoint& p, const FieldConfig& cfg, double t0, double t1,
                      const IntegratorSettings& settings);

/// Homogenized characteristics with the n x M drift; requires cfg.drift().
PhasePoint push_limit_drift(const PhasePoint& p, const FieldConfig& cfg, double t0, double t1,
                            const IntegratorSettings& settings);

}  // namespace ghl
