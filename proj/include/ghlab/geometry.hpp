#pragma once

// Vectors, the gyro-rotation operator and the frame that aligns an arbitrary
// constant magnetic axis with e1.

#include <array>
#include <cmath>
#include <stdexcept>

namespace ghl {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x; y += o.y; z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x; y -= o.y; z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s; y *= s; z *= s;
    return *this;
  }

  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr Vec3 operator/(Vec3 a, double s) { return a *= (1.0 / s); }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
constexpr double norm2(const Vec3& a) { return dot(a, a); }

inline bool is_finite(const Vec3& a) {
  return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

constexpr Vec3 e1{1.0, 0.0, 0.0};
constexpr Vec3 e2{0.0, 1.0, 0.0};
constexpr Vec3 e3{0.0, 0.0, 1.0};

/// Direction on the unit sphere, checked to 1e-12 at construction.
class UnitAxis {
 public:
  static constexpr double kTolerance = 1e-12;

  /// Throws std::invalid_argument unless |d| = 1 within kTolerance.
  explicit UnitAxis(const Vec3& d);

  /// Normalizes any nonzero finite vector.
  static UnitAxis normalized(const Vec3& d);

  const Vec3& direction() const { return dir_; }
  operator const Vec3&() const { return dir_; }

  friend bool operator==(const UnitAxis&, const UnitAxis&) = default;

 private:
  struct Trusted {};
  UnitAxis(const Vec3& d, Trusted) : dir_(d) {}
  Vec3 dir_;
};

struct Mat3 {
  std::array<Vec3, 3> rows{e1, e2, e3};

  Vec3 operator*(const Vec3& v) const { return {dot(rows[0], v), dot(rows[1], v), dot(rows[2], v)}; }
  Mat3 operator*(const Mat3& o) const;
  Mat3 transposed() const;
  double det() const { return dot(rows[0], cross(rows[1], rows[2])); }

  static Mat3 identity() { return {}; }
};

/// v_par = (v . axis) axis.
inline Vec3 parallel_part(const Vec3& v, const UnitAxis& axis) {
  const Vec3& m = axis.direction();
  return dot(v, m) * m;
}

/// Proper rotation R with R * axis = e1. Identity for e1, the rotation by pi
/// about e3 for -e1, otherwise the minimal (Rodrigues) rotation.
Mat3 alignment_rotation(const UnitAxis& axis);

/// Orthonormal right-handed frame (axis, b2, b3) cached from the alignment
/// rotation; the hot-loop form of rotate_about_axis.
class GyroFrame {
 public:
  explicit GyroFrame(const UnitAxis& axis);

  const UnitAxis& axis() const { return axis_; }
  const Mat3& to_local() const { return r_; }
  const Mat3& to_global() const { return rt_; }

  Vec3 local(const Vec3& v) const { return r_ * v; }
  Vec3 global(const Vec3& v) const { return rt_ * v; }

  /// u(v, tau): parallel part kept, perpendicular part turned by tau.
  Vec3 rotate(const Vec3& v, double tau) const {
    return rotate_cs(v, std::cos(tau), std::sin(tau));
  }
  Vec3 rotate_cs(const Vec3& v, double c, double s) const {
    const Vec3 w = r_ * v;
    return rt_ * Vec3{w.x, w.y * c - w.z * s, w.y * s + w.z * c};
  }

 private:
  UnitAxis axis_;
  Mat3 r_;
  Mat3 rt_;
};

/// u(v, tau) about an arbitrary unit axis; for axis = e1 this is
/// (v1, v2 cos tau - v3 sin tau, v2 sin tau + v3 cos tau).
Vec3 rotate_about_axis(const Vec3& v, double tau, const UnitAxis& axis);

}  // namespace ghl
