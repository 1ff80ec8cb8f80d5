#include "ghlab/fields.hpp"

#include <cmath>
#include <stdexcept>

namespace ghl {

std::string_view to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::zero: return "zero";
    case FieldKind::uniform: return "uniform";
    case FieldKind::gaussian: return "gaussian";
    case FieldKind::trig: return "trig";
  }
  return "zero";
}

FieldKind field_kind_from_string(std::string_view name) {
  if (name == "zero") return FieldKind::zero;
  if (name == "uniform") return FieldKind::uniform;
  if (name == "gaussian") return FieldKind::gaussian;
  if (name == "trig") return FieldKind::trig;
  throw std::invalid_argument("unknown field kind '" + std::string(name) +
                              "' (expected zero, uniform, gaussian or trig)");
}

Vec3 FieldSpec::operator()(double t, const Vec3& x) const {
  switch (kind) {
    case FieldKind::zero: return {};
    case FieldKind::uniform: return amplitude;
    case FieldKind::gaussian: return std::exp(-norm2(x - center) / (width * width)) * amplitude;
    case FieldKind::trig: return std::cos(dot(wavevector, x) - omega * t + phase) * amplitude;
  }
  return {};
}

void FieldSpec::validate(std::string_view name) const {
  const bool finite = is_finite(amplitude) && is_finite(center) && is_finite(wavevector) &&
                      std::isfinite(width) && std::isfinite(omega) && std::isfinite(phase);
  if (!finite) throw std::invalid_argument(std::string(name) + ": non-finite field parameter");
  if (kind == FieldKind::gaussian && !(width > 0.0)) {
    throw std::invalid_argument(std::string(name) + ": gaussian width must be > 0");
  }
}

FieldConfig::FieldConfig(double epsilon, UnitAxis axis, std::optional<UnitAxis> drift,
                         FieldSpec e_weak, FieldSpec b_weak, double horizon)
    : epsilon_(epsilon),
      axis_(axis),
      drift_(drift),
      e_weak_(e_weak),
      b_weak_(b_weak),
      horizon_(horizon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("FieldConfig: epsilon must be finite and > 0");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("FieldConfig: horizon must be finite and > 0");
  }
  if (drift_ && std::abs(dot(drift_->direction(), axis_.direction())) > UnitAxis::kTolerance) {
    throw std::invalid_argument("FieldConfig: drift axis n must be orthogonal to M");
  }
  e_weak_.validate("E_weak");
  b_weak_.validate("B_weak");
}

FieldConfig FieldConfig::strong_only(double epsilon, UnitAxis axis, double horizon,
                                     std::optional<UnitAxis> drift) {
  return FieldConfig(epsilon, axis, drift, FieldSpec::zero(), FieldSpec::zero(), horizon);
}

FieldConfig FieldConfig::with_epsilon(double epsilon) const {
  return FieldConfig(epsilon, axis_, drift_, e_weak_, b_weak_, horizon_);
}

void FieldConfig::check_time(double t) const {
  if (!(t >= 0.0 && t <= horizon_)) {
    throw std::out_of_range("field evaluation at t = " + std::to_string(t) +
                            " outside the horizon [0, " + std::to_string(horizon_) + "]");
  }
}

FieldSample FieldConfig::eval_weak(double t, const Vec3& x) const {
  check_time(t);
  return weak_unchecked(t, x);
}

Vec3 FieldConfig::total_force(double t, const Vec3& x, const Vec3& v) const {
  const FieldSample w = eval_weak(t, x);
  Vec3 f = w.E + cross(v, w.B + axis_.direction() / epsilon_);
  if (drift_) f += drift_->direction() / epsilon_;
  return f;
}

}  // namespace ghl
