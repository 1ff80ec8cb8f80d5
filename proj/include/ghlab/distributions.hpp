#pragma once

// Phase-space functions f(x, v): initial data f0, limit initial data, and the
// G profiles of the two-scale limit. Named families carry an analytic density,
// a declared support box and an equal-weight sampler on the unit cube.

#include <array>
#include <functional>
#include <optional>
#include <string>

#include "ghlab/characteristics.hpp"
#include "ghlab/geometry.hpp"

namespace ghl {

struct PhaseBox {
  Vec3 x_lo, x_hi;
  Vec3 v_lo, v_hi;

  bool contains(const Vec3& x, const Vec3& v) const;
  /// Largest |v| over the velocity box corners.
  double v_max() const;
};

/// A point of the 7-dimensional unit cube: 6 coordinates for (x, v) and one
/// spare coordinate for a gyro phase.
using UnitPoint = std::array<double, 7>;

/// f(x, v) = x_factors[0](x1) x_factors[1](x2) x_factors[2](x3) v_factor(v).
struct ProductForm {
  std::array<std::function<double(double)>, 3> x_factors;
  std::function<double(const Vec3&)> v_factor;
};

struct VelocityFunction {
  using Eval = std::function<double(const Vec3& x, const Vec3& v)>;
  using Sampler = std::function<PhasePoint(const UnitPoint&)>;

  Eval eval;
  PhaseBox support;
  /// Total mass, when known analytically (needed for sampling).
  std::optional<double> mass;
  /// Depends on v only through |v|; a fixed point of every gyroaverage.
  bool isotropic_v = false;
  /// Depends on v only through (v . M, |v_perp|) for this axis.
  std::optional<UnitAxis> gyrotropic_axis;
  /// Maps a unit-cube point to a phase point distributed as f / mass.
  Sampler sampler;
  /// Set when f separates per x axis; quadratures then factorize exactly.
  std::optional<ProductForm> product;
  std::string name;

  double operator()(const Vec3& x, const Vec3& v) const { return eval(x, v); }
  bool gyrotropic_about(const UnitAxis& axis) const {
    return isotropic_v || (gyrotropic_axis && *gyrotropic_axis == axis);
  }
  VelocityFunction scaled(double factor) const;
};

/// Standard normal quantile.
double normal_quantile(double u);

/// mass * N(x; c, sx^2 I) * N(v; d, sv^2 I); support +-`sigmas` widths.
VelocityFunction maxwellian(const Vec3& x_center, double x_width, const Vec3& v_drift,
                            double v_width, double mass = 1.0, double sigmas = 6.0);

/// Gaussian in x, bi-Maxwellian in v about `axis` (gyrotropic about it).
VelocityFunction bi_maxwellian(const Vec3& x_center, double x_width, const UnitAxis& axis,
                               double v_par_width, double v_perp_width, double v_par_drift = 0.0,
                               double mass = 1.0, double sigmas = 6.0);

/// Periodic box [0, L)^3 with density (1 + amplitude cos(k . x)), k = 2 pi m / L
/// for integer mode numbers m, times a drifting Maxwellian in v. Total mass
/// `mass` over the box.
VelocityFunction perturbed_maxwellian(const Vec3& box, const std::array<int, 3>& modes,
                                      double amplitude, const Vec3& v_drift, double v_width,
                                      double mass, double sigmas = 6.0);

/// Indicator of {|x - xc| < rx} x {|v - vc| < rv}.
VelocityFunction phase_ball(const Vec3& x_center, double x_radius, const Vec3& v_center,
                            double v_radius);

/// All mass at one phase point. The density is singular; eval returns 0 and
/// only sampling is meaningful.
VelocityFunction point_mass(const Vec3& x0, const Vec3& v0, double mass = 1.0);

}  // namespace ghl
