#pragma once

#include <optional>
#include <vector>

#include "ghlab/distributions.hpp"

namespace ghl {

/// Uniform nodes tau_k = 2 pi k / N with equal weights on [0, 2 pi): exact for
/// trigonometric polynomials of degree < N, spectrally accurate otherwise.
class GyroQuadrature {
 public:
  explicit GyroQuadrature(int node_count = 64);

  int node_count() const { return static_cast<int>(cos_.size()); }
  double node(int k) const;
  double cos_at(int k) const { return cos_[k]; }
  double sin_at(int k) const { return sin_[k]; }

 private:
  std::vector<double> cos_;
  std::vector<double> sin_;
};

/// (1/2pi) int_0^{2pi} g(x, u(v, tau)) dtau.
double gyroaverage(const VelocityFunction& g, const Vec3& x, const Vec3& v, const UnitAxis& axis,
                   const GyroQuadrature& quad);

/// Same average over the drift rotation u(v, tau) = rot(v + M x n, tau) - M x n.
double gyroaverage_drift(const VelocityFunction& g, const Vec3& x, const Vec3& v,
                         const UnitAxis& axis, const UnitAxis& drift, const GyroQuadrature& quad);

/// Homogenized initial data (1/2pi) int f0(x, u(v, tau)) dtau, with the drift
/// rotation when `drift` is set. A function declared gyrotropic about the axis
/// is returned unchanged in the plain case (it is an exact fixed point). The
/// result samples by drawing from f0 and turning the velocity by a uniform
/// phase taken from the spare unit-cube coordinate.
VelocityFunction limit_initial_data(const VelocityFunction& f0, const UnitAxis& axis,
                                    const GyroQuadrature& quad,
                                    const std::optional<UnitAxis>& drift = std::nullopt);

/// F(tau, x, v) = G(x, u(v, tau)) for a profile G frozen at some (t, x).
double reconstruct_profile(const VelocityFunction& g, const Vec3& x, double tau, const Vec3& v,
                           const UnitAxis& axis, const std::optional<UnitAxis>& drift = std::nullopt);

/// |dF/dtau + (n + v x M) . grad_v F| at one point for F = reconstruct_profile(g),
/// both derivatives by central differences of step h (n = 0 without drift).
double constraint_residual(const VelocityFunction& g, const Vec3& x, double tau, const Vec3& v,
                           const UnitAxis& axis, const std::optional<UnitAxis>& drift = std::nullopt,
                           double h = 1e-4);

/// |(E_par + u x B_par) . (grad G)(u) - (E_par + v x B_par) . grad_v [G(u(v, tau))]|
/// with u = u(v, tau) and central differences of step h.
double chain_rule_residual(const VelocityFunction& g, const Vec3& x, double tau, const Vec3& v,
                           const UnitAxis& axis, const Vec3& E, const Vec3& B, double h = 1e-4);

}  // namespace ghl
