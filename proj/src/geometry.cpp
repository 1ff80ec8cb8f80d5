#include "ghlab/geometry.hpp"

#include <string>

namespace ghl {

UnitAxis::UnitAxis(const Vec3& d) : dir_(d) {
  if (!is_finite(d) || std::abs(norm(d) - 1.0) > kTolerance) {
    throw std::invalid_argument("UnitAxis: direction is not a unit vector (|d| = " +
                                std::to_string(norm(d)) + ")");
  }
}

UnitAxis UnitAxis::normalized(const Vec3& d) {
  const double n = norm(d);
  if (!std::isfinite(n) || n == 0.0) {
    throw std::invalid_argument("UnitAxis: cannot normalize a zero or non-finite vector");
  }
  return UnitAxis(d / n, Trusted{});
}

Mat3 Mat3::operator*(const Mat3& o) const {
  const Mat3 ot = o.transposed();
  Mat3 out;
  for (int i = 0; i < 3; ++i) {
    out.rows[i] = {dot(rows[i], ot.rows[0]), dot(rows[i], ot.rows[1]), dot(rows[i], ot.rows[2])};
  }
  return out;
}

Mat3 Mat3::transposed() const {
  Mat3 t;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) t.rows[i][j] = rows[j][i];
  }
  return t;
}

Mat3 alignment_rotation(const UnitAxis& axis) {
  const Vec3& a = axis.direction();
  if (a == e1) return Mat3::identity();
  if (a == -e1) {
    Mat3 r;
    r.rows = {Vec3{-1.0, 0.0, 0.0}, Vec3{0.0, -1.0, 0.0}, Vec3{0.0, 0.0, 1.0}};
    return r;
  }
  // Rodrigues form of the rotation taking a onto e1:
  // R = I + [k]x + [k]x^2 / (1 + c), k = a x e1, c = a . e1.
  const Vec3 k = cross(a, e1);
  const double c = a.x;
  const double s2 = norm2(k);
  // 1/(1+c) loses precision near the antipode; use (1-c)/|k|^2 there.
  const double f = c >= 0.0 ? 1.0 / (1.0 + c) : (1.0 - c) / s2;
  Mat3 kx;
  kx.rows = {Vec3{0.0, -k.z, k.y}, Vec3{k.z, 0.0, -k.x}, Vec3{-k.y, k.x, 0.0}};
  const Mat3 kx2 = kx * kx;
  Mat3 r;
  for (int i = 0; i < 3; ++i) {
    r.rows[i] = Mat3::identity().rows[i] + kx.rows[i] + f * kx2.rows[i];
  }
  return r;
}

GyroFrame::GyroFrame(const UnitAxis& axis)
    : axis_(axis), r_(alignment_rotation(axis)), rt_(r_.transposed()) {}

Vec3 rotate_about_axis(const Vec3& v, double tau, const UnitAxis& axis) {
  return GyroFrame(axis).rotate(v, tau);
}

}  // namespace ghl
