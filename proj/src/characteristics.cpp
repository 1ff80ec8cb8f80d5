#include "ghlab/characteristics.hpp"

namespace ghl {

void IntegratorSettings::validate(std::optional<double> epsilon) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("IntegratorSettings: dt must be finite and > 0");
  }
  if (substeps_per_gyroperiod < 8) {
    throw std::invalid_argument("IntegratorSettings: substeps_per_gyroperiod must be >= 8");
  }
  if (!(velocity_bound > 0.0)) {
    throw std::invalid_argument("IntegratorSettings: velocity_bound must be > 0");
  }
  if (scheme == Scheme::rk4_oracle && epsilon) {
    const double limit = 2.0 * std::numbers::pi * *epsilon / substeps_per_gyroperiod;
    if (dt > limit * (1.0 + 1e-12)) {
      throw std::invalid_argument("IntegratorSettings: rk4_oracle needs dt <= 2 pi eps / substeps (" +
                                  std::to_string(limit) + ")");
    }
  }
}

Vec3 fast_flow(const Vec3& v, double tau, double s, const UnitAxis& axis) {
  return rotate_about_axis(v, s - tau, axis);
}

namespace {

void require_orthogonal(const UnitAxis& axis, const UnitAxis& drift) {
  if (std::abs(dot(axis.direction(), drift.direction())) > UnitAxis::kTolerance) {
    throw std::invalid_argument("drift flow requires n orthogonal to M");
  }
}

}  // namespace

Vec3 fast_flow_drift(const Vec3& v, double tau, double s, const UnitAxis& axis,
                     const UnitAxis& drift) {
  require_orthogonal(axis, drift);
  const Vec3 c = cross(axis.direction(), drift.direction());
  return rotate_about_axis(v + c, s - tau, axis) - c;
}

Vec3 drift_rotation(const Vec3& v, double tau, const UnitAxis& axis, const UnitAxis& drift) {
  return fast_flow_drift(v, 0.0, tau, axis, drift);
}

StiffFlow::StiffFlow(const UnitAxis& axis, double epsilon, const std::optional<UnitAxis>& drift)
    : frame_(axis), eps_(epsilon), has_drift_(drift.has_value()) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("StiffFlow: epsilon must be > 0");
  if (drift) {
    require_orthogonal(axis, *drift);
    shift_ = cross(axis.direction(), drift->direction());
    shift_local_ = frame_.local(shift_);
  }
}

void StiffFlow::advance(PhasePoint& p, double h) const {
  // Local frame: e1 along M. W = V + M x n rotates rigidly, W_perp(s) = W_perp e^{-i s/eps}.
  Vec3 w = frame_.local(p.v);
  if (has_drift_) w += shift_local_;
  const double phi = h / eps_;
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  const double half = std::sin(0.5 * phi);
  const double a = -2.0 * half * half;  // cos(phi) - 1 without cancellation
  // Integral of W over the step: h w1 e1 + i eps z (e^{-i phi} - 1), z = w2 + i w3.
  const Vec3 disp{h * w.x, eps_ * (w.y * s - w.z * a), eps_ * (w.y * a + w.z * s)};
  Vec3 w_new{w.x, w.y * c + w.z * s, w.z * c - w.y * s};
  if (has_drift_) {
    w_new -= shift_local_;
    p.x += frame_.global(disp) - h * shift_;
  } else {
    p.x += frame_.global(disp);
  }
  p.v = frame_.global(w_new);
}

Vec3 magnetic_rotation(const Vec3& v, const Vec3& b, double h) {
  const double bn = norm(b);
  if (bn == 0.0) return v;
  const Vec3 k = b / bn;
  const double theta = -bn * h;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return c * v + s * cross(k, v) + ((1.0 - c) * dot(k, v)) * k;
}

PhasePoint push_full(const PhasePoint& p, const FieldConfig& cfg, double t0, double t1,
                     const IntegratorSettings& settings) {
  cfg.check_time(t0);
  cfg.check_time(t1);
  if (settings.scheme == Scheme::exact_split && cfg.weak_fields_vanish()) {
    // Every split step is then the exact stiff flow, and those compose: one
    // step over the whole span avoids the rounding of many small ones.
    settings.validate(cfg.epsilon());
    PhasePoint q = p;
    StiffFlow(cfg).advance(q, t1 - t0);
    detail::check_bound(q, settings.velocity_bound);
    return q;
  }
  auto weak = [&cfg](double t, const Vec3& x) { return cfg.weak_unchecked(t, x); };
  return push_full(p, cfg, weak, t0, t1, settings);
}

LimitDynamics::LimitDynamics(const UnitAxis& axis, const std::optional<UnitAxis>& drift)
    : axis_(axis), has_drift_(drift.has_value()) {
  if (drift) {
    require_orthogonal(axis, *drift);
    drift_velocity_ = cross(drift->direction(), axis.direction());
  }
}

PhasePoint push_limit(const PhasePoint& p, const FieldConfig& cfg, double t0, double t1,
                      const IntegratorSettings& settings) {
  cfg.check_time(t0);
  cfg.check_time(t1);
  auto weak = [&cfg](double t, const Vec3& x) { return cfg.weak_unchecked(t, x); };
  return push_limit_with(p, LimitDynamics(cfg.axis()), weak, t0, t1, settings);
}

PhasePoint push_limit_drift(const PhasePoint& p, const FieldConfig& cfg, double t0, double t1,
                            const IntegratorSettings& settings) {
  if (!cfg.drift()) throw std::invalid_argument("push_limit_drift: configuration has no drift axis");
  cfg.check_time(t0);
  cfg.check_time(t1);
  auto weak = [&cfg](double t, const Vec3& x) { return cfg.weak_unchecked(t, x); };
  return push_limit_with(p, LimitDynamics(cfg.axis(), cfg.drift()), weak, t0, t1, settings);
}

}  // namespace ghl
