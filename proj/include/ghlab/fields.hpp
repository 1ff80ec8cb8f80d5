#pragma once

// Analytic external fields. The weak parts E, B are declarative specs
// (kind + parameters); the strong parts M/eps and n/eps are never sampled as
// field values, integrators consume them in closed form.

#include <optional>
#include <string>
#include <string_view>

#include "ghlab/geometry.hpp"

namespace ghl {

enum class FieldKind { zero, uniform, gaussian, trig };

std::string_view to_string(FieldKind kind);
FieldKind field_kind_from_string(std::string_view name);

/// value(t, x):
///   zero      0
///   uniform   amplitude
///   gaussian  amplitude * exp(-|x - center|^2 / width^2)
///   trig      amplitude * cos(wavevector . x - omega t + phase)
struct FieldSpec {
  FieldKind kind = FieldKind::zero;
  Vec3 amplitude{};
  Vec3 center{};
  double width = 1.0;
  Vec3 wavevector{};
  double omega = 0.0;
  double phase = 0.0;

  static FieldSpec zero() { return {}; }
  static FieldSpec uniform(const Vec3& a) { return {FieldKind::uniform, a}; }
  static FieldSpec gaussian(const Vec3& a, const Vec3& c, double w) {
    return {FieldKind::gaussian, a, c, w};
  }
  static FieldSpec trig(const Vec3& a, const Vec3& k, double omega = 0.0, double phase = 0.0) {
    return {FieldKind::trig, a, {}, 1.0, k, omega, phase};
  }

  Vec3 operator()(double t, const Vec3& x) const;

  bool vanishes() const { return kind == FieldKind::zero || amplitude == Vec3{}; }
  /// True when the value does not depend on x or t.
  bool is_constant() const { return vanishes() || kind == FieldKind::uniform; }

  /// Throws std::invalid_argument on non-finite parameters or width <= 0.
  void validate(std::string_view name) const;

  friend bool operator==(const FieldSpec&, const FieldSpec&) = default;
};

struct FieldSample {
  Vec3 E;
  Vec3 B;
};

class FieldConfig {
 public:
  /// Checks eps > 0, horizon > 0, |n . M| <= 1e-12 and the weak specs.
  FieldConfig(double epsilon, UnitAxis axis, std::optional<UnitAxis> drift, FieldSpec e_weak,
              FieldSpec b_weak, double horizon);

  /// Magnetic-only configuration with vanishing weak fields.
  static FieldConfig strong_only(double epsilon, UnitAxis axis, double horizon,
                                 std::optional<UnitAxis> drift = std::nullopt);

  double epsilon() const { return epsilon_; }
  const UnitAxis& axis() const { return axis_; }
  const std::optional<UnitAxis>& drift() const { return drift_; }
  const FieldSpec& e_weak() const { return e_weak_; }
  const FieldSpec& b_weak() const { return b_weak_; }
  double horizon() const { return horizon_; }

  FieldConfig with_epsilon(double epsilon) const;

  /// Weak fields at (t, x); rejects t outside [0, horizon].
  FieldSample eval_weak(double t, const Vec3& x) const;

  /// Unchecked evaluation for inner loops that already validated the time range.
  FieldSample weak_unchecked(double t, const Vec3& x) const { return {e_weak_(t, x), b_weak_(t, x)}; }

  /// E + n/eps + v x (B + M/eps). Used by the RK4 oracle only.
  Vec3 total_force(double t, const Vec3& x, const Vec3& v) const;

  bool weak_fields_vanish() const { return e_weak_.vanishes() && b_weak_.vanishes(); }
  bool weak_fields_constant() const { return e_weak_.is_constant() && b_weak_.is_constant(); }

  void check_time(double t) const;

  friend bool operator==(const FieldConfig&, const FieldConfig&) = default;

 private:
  double epsilon_;
  UnitAxis axis_;
  std::optional<UnitAxis> drift_;
  FieldSpec e_weak_;
  FieldSpec b_weak_;
  double horizon_;
};

}  // namespace ghl
