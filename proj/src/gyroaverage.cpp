#include "ghlab/gyroaverage.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ghl {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

GyroQuadrature::GyroQuadrature(int node_count) {
  if (node_count < 4) throw std::invalid_argument("GyroQuadrature: node_count must be >= 4");
  cos_.resize(node_count);
  sin_.resize(node_count);
  for (int k = 0; k < node_count; ++k) {
    const double tau = kTwoPi * k / node_count;
    cos_[k] = std::cos(tau);
    sin_[k] = std::sin(tau);
  }
}

double GyroQuadrature::node(int k) const { return kTwoPi * k / node_count(); }

double gyroaverage(const VelocityFunction& g, const Vec3& x, const Vec3& v, const UnitAxis& axis,
                   const GyroQuadrature& quad) {
  const GyroFrame frame(axis);
  double sum = 0.0;
  for (int k = 0; k < quad.node_count(); ++k) {
    sum += g(x, frame.rotate_cs(v, quad.cos_at(k), quad.sin_at(k)));
  }
  return sum / quad.node_count();
}

double gyroaverage_drift(const VelocityFunction& g, const Vec3& x, const Vec3& v,
                         const UnitAxis& axis, const UnitAxis& drift, const GyroQuadrature& quad) {
  if (std::abs(dot(axis.direction(), drift.direction())) > UnitAxis::kTolerance) {
    throw std::invalid_argument("gyroaverage_drift: n must be orthogonal to M");
  }
  const GyroFrame frame(axis);
  const Vec3 c = cross(axis.direction(), drift.direction());
  const Vec3 w = v + c;
  double sum = 0.0;
  for (int k = 0; k < quad.node_count(); ++k) {
    sum += g(x, frame.rotate_cs(w, quad.cos_at(k), quad.sin_at(k)) - c);
  }
  return sum / quad.node_count();
}

VelocityFunction limit_initial_data(const VelocityFunction& f0, const UnitAxis& axis,
                                    const GyroQuadrature& quad,
                                    const std::optional<UnitAxis>& drift) {
  if (!drift && f0.gyrotropic_about(axis)) return f0;

  const GyroFrame frame(axis);
  const Vec3 c = drift ? cross(axis.direction(), drift->direction()) : Vec3{};
  if (drift && std::abs(dot(axis.direction(), drift->direction())) > UnitAxis::kTolerance) {
    throw std::invalid_argument("limit_initial_data: n must be orthogonal to M");
  }

  VelocityFunction out;
  out.eval = [f0, frame, c, quad](const Vec3& x, const Vec3& v) {
    const Vec3 w = v + c;
    double sum = 0.0;
    for (int k = 0; k < quad.node_count(); ++k) {
      sum += f0(x, frame.rotate_cs(w, quad.cos_at(k), quad.sin_at(k)) - c);
    }
    return sum / quad.node_count();
  };
  // Rotations about the centre -c keep |v + c|; bound the velocity support by it.
  const PhaseBox& s = f0.support;
  double r = 0.0;
  for (int k = 0; k < 8; ++k) {
    const Vec3 corner{(k & 1) ? s.v_hi.x : s.v_lo.x, (k & 2) ? s.v_hi.y : s.v_lo.y,
                      (k & 4) ? s.v_hi.z : s.v_lo.z};
    r = std::max(r, norm(corner + c));
  }
  out.support = {s.x_lo, s.x_hi, Vec3{-r, -r, -r} - c, Vec3{r, r, r} - c};
  out.mass = f0.mass;
  out.gyrotropic_axis = drift ? std::nullopt : std::optional<UnitAxis>(axis);
  if (f0.sampler) {
    out.sampler = [sampler = f0.sampler, frame, c](const UnitPoint& u) {
      PhasePoint p = sampler(u);
      p.v = frame.rotate(p.v + c, kTwoPi * u[6]) - c;
      return p;
    };
  }
  if (f0.product) {
    out.product = ProductForm{f0.product->x_factors,
                              [g = f0.product->v_factor, frame, c, quad](const Vec3& v) {
                                const Vec3 w = v + c;
                                double sum = 0.0;
                                for (int k = 0; k < quad.node_count(); ++k) {
                                  sum += g(frame.rotate_cs(w, quad.cos_at(k), quad.sin_at(k)) - c);
                                }
                                return sum / quad.node_count();
                              }};
  }
  out.name = "gyroaveraged_" + f0.name;
  return out;
}

double reconstruct_profile(const VelocityFunction& g, const Vec3& x, double tau, const Vec3& v,
                           const UnitAxis& axis, const std::optional<UnitAxis>& drift) {
  if (drift) return g(x, drift_rotation(v, tau, axis, *drift));
  return g(x, rotate_about_axis(v, tau, axis));
}

namespace {

template <class Fn>
Vec3 central_gradient(const Fn& fn, const Vec3& at, double h) {
  Vec3 g;
  for (int a = 0; a < 3; ++a) {
    Vec3 lo = at, hi = at;
    lo[a] -= h;
    hi[a] += h;
    g[a] = (fn(hi) - fn(lo)) / (2.0 * h);
  }
  return g;
}

}  // namespace

double constraint_residual(const VelocityFunction& g, const Vec3& x, double tau, const Vec3& v,
                           const UnitAxis& axis, const std::optional<UnitAxis>& drift, double h) {
  auto F = [&](double s, const Vec3& w) { return reconstruct_profile(g, x, s, w, axis, drift); };
  const double dtau = (F(tau + h, v) - F(tau - h, v)) / (2.0 * h);
  const Vec3 grad = central_gradient([&](const Vec3& w) { return F(tau, w); }, v, h);
  const Vec3 n = drift ? drift->direction() : Vec3{};
  return std::abs(dtau + dot(n + cross(v, axis.direction()), grad));
}

double chain_rule_residual(const VelocityFunction& g, const Vec3& x, double tau, const Vec3& v,
                           const UnitAxis& axis, const Vec3& E, const Vec3& B, double h) {
  const Vec3& m = axis.direction();
  const Vec3 e_par = dot(E, m) * m;
  const Vec3 b_par = dot(B, m) * m;
  const Vec3 u = rotate_about_axis(v, tau, axis);
  const Vec3 grad_g = central_gradient([&](const Vec3& w) { return g(x, w); }, u, h);
  const Vec3 grad_f = central_gradient(
      [&](const Vec3& w) { return g(x, rotate_about_axis(w, tau, axis)); }, v, h);
  return std::abs(dot(e_par + cross(u, b_par), grad_g) - dot(e_par + cross(v, b_par), grad_f));
}

}  // namespace ghl
