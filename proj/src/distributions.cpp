#include "ghlab/distributions.hpp"

#include <algorithm>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ghl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vec3 splat(double a) { return {a, a, a}; }

std::array<std::function<double(double)>, 3> gaussian_x_factors(const Vec3& c, double width) {
  const double nx = 1.0 / (std::sqrt(kTwoPi) * width);
  const double ax = 0.5 / (width * width);
  std::array<std::function<double(double)>, 3> out;
  for (int i = 0; i < 3; ++i) {
    out[i] = [nx, ax, ci = c[i]](double s) { return nx * std::exp(-ax * (s - ci) * (s - ci)); };
  }
  return out;
}

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string(what) + " must be finite and > 0");
  }
}

double gauss_norm(double sigma) { return 1.0 / (std::sqrt(kTwoPi) * sigma); }

}  // namespace

bool PhaseBox::contains(const Vec3& x, const Vec3& v) const {
  for (int i = 0; i < 3; ++i) {
    if (x[i] < x_lo[i] || x[i] > x_hi[i] || v[i] < v_lo[i] || v[i] > v_hi[i]) return false;
  }
  return true;
}

double PhaseBox::v_max() const {
  double m = 0.0;
  for (int c = 0; c < 8; ++c) {
    const Vec3 corner{(c & 1) ? v_hi.x : v_lo.x, (c & 2) ? v_hi.y : v_lo.y,
                      (c & 4) ? v_hi.z : v_lo.z};
    m = std::max(m, norm(corner));
  }
  return m;
}

VelocityFunction VelocityFunction::scaled(double factor) const {
  VelocityFunction out = *this;
  out.eval = [inner = eval, factor](const Vec3& x, const Vec3& v) { return factor * inner(x, v); };
  if (mass) out.mass = *mass * factor;
  if (product) {
    out.product->v_factor = [inner = product->v_factor, factor](const Vec3& v) {
      return factor * inner(v);
    };
  }
  return out;
}

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("normal_quantile: u must lie in (0, 1)");
  return std::numbers::sqrt2 * boost::math::erf_inv(2.0 * u - 1.0);
}

VelocityFunction maxwellian(const Vec3& x_center, double x_width, const Vec3& v_drift,
                            double v_width, double mass, double sigmas) {
  require_positive(x_width, "maxwellian x_width");
  require_positive(v_width, "maxwellian v_width");
  require_positive(mass, "maxwellian mass");
  const double nx = gauss_norm(x_width);
  const double nv = gauss_norm(v_width);
  const double amp = mass * nx * nx * nx * nv * nv * nv;
  const double ax = 0.5 / (x_width * x_width);
  const double av = 0.5 / (v_width * v_width);
  VelocityFunction f;
  f.eval = [=](const Vec3& x, const Vec3& v) {
    return amp * std::exp(-ax * norm2(x - x_center) - av * norm2(v - v_drift));
  };
  f.support = {x_center - splat(sigmas * x_width), x_center + splat(sigmas * x_width),
               v_drift - splat(sigmas * v_width), v_drift + splat(sigmas * v_width)};
  f.mass = mass;
  f.isotropic_v = v_drift == Vec3{};
  f.sampler = [=](const UnitPoint& u) {
    PhasePoint p;
    for (int i = 0; i < 3; ++i) {
      p.x[i] = x_center[i] + x_width * normal_quantile(u[i]);
      p.v[i] = v_drift[i] + v_width * normal_quantile(u[3 + i]);
    }
    return p;
  };
  const double amp_v = mass * nv * nv * nv;
  f.product = ProductForm{gaussian_x_factors(x_center, x_width), [=](const Vec3& v) {
                            return amp_v * std::exp(-av * norm2(v - v_drift));
                          }};
  f.name = "maxwellian";
  return f;
}

VelocityFunction bi_maxwellian(const Vec3& x_center, double x_width, const UnitAxis& axis,
                               double v_par_width, double v_perp_width, double v_par_drift,
                               double mass, double sigmas) {
  require_positive(x_width, "bi_maxwellian x_width");
  require_positive(v_par_width, "bi_maxwellian v_par_width");
  require_positive(v_perp_width, "bi_maxwellian v_perp_width");
  require_positive(mass, "bi_maxwellian mass");
  const double nx = gauss_norm(x_width);
  const double amp = mass * nx * nx * nx * gauss_norm(v_par_width) * gauss_norm(v_perp_width) *
                     gauss_norm(v_perp_width);
  const double ax = 0.5 / (x_width * x_width);
  const double a_par = 0.5 / (v_par_width * v_par_width);
  const double a_perp = 0.5 / (v_perp_width * v_perp_width);
  const Vec3 m = axis.direction();
  const GyroFrame frame(axis);
  VelocityFunction f;
  f.eval = [=](const Vec3& x, const Vec3& v) {
    const double vp = dot(v, m) - v_par_drift;
    const double perp2 = std::max(0.0, norm2(v) - dot(v, m) * dot(v, m));
    return amp * std::exp(-ax * norm2(x - x_center) - a_par * vp * vp - a_perp * perp2);
  };
  const double vr = sigmas * std::max(v_par_width, v_perp_width) + std::abs(v_par_drift);
  f.support = {x_center - splat(sigmas * x_width), x_center + splat(sigmas * x_width), splat(-vr),
               splat(vr)};
  f.mass = mass;
  f.gyrotropic_axis = axis;
  f.sampler = [=](const UnitPoint& u) {
    PhasePoint p;
    for (int i = 0; i < 3; ++i) p.x[i] = x_center[i] + x_width * normal_quantile(u[i]);
    const Vec3 local{v_par_drift + v_par_width * normal_quantile(u[3]),
                     v_perp_width * normal_quantile(u[4]), v_perp_width * normal_quantile(u[5])};
    p.v = frame.global(local);
    return p;
  };
  const double amp_v = amp / (nx * nx * nx);
  f.product = ProductForm{gaussian_x_factors(x_center, x_width), [=](const Vec3& v) {
                            const double vp = dot(v, m) - v_par_drift;
                            const double perp2 = std::max(0.0, norm2(v) - dot(v, m) * dot(v, m));
                            return amp_v * std::exp(-a_par * vp * vp - a_perp * perp2);
                          }};
  f.name = "bi_maxwellian";
  return f;
}

namespace {

// Inverse CDF of (1 + a cos(2 pi m s + phase)) on s in [0, 1), m >= 1.
double perturbed_quantile(double u, double a, int m, double phase) {
  const double w = kTwoPi * m;
  auto cdf = [&](double s) { return s + a / w * (std::sin(w * s + phase) - std::sin(phase)); };
  double s = u;
  for (int it = 0; it < 60; ++it) {
    const double g = cdf(s) - u;
    const double dg = 1.0 + a * std::cos(w * s + phase);
    const double step = g / dg;
    s = std::clamp(s - step, 0.0, 1.0);
    if (std::abs(step) < 1e-15) break;
  }
  return s;
}

}  // namespace

VelocityFunction perturbed_maxwellian(const Vec3& box, const std::array<int, 3>& modes,
                                      double amplitude, const Vec3& v_drift, double v_width,
                                      double mass, double sigmas) {
  for (int i = 0; i < 3; ++i) require_positive(box[i], "perturbed_maxwellian box length");
  require_positive(v_width, "perturbed_maxwellian v_width");
  require_positive(mass, "perturbed_maxwellian mass");
  if (!(std::abs(amplitude) < 1.0)) {
    throw std::invalid_argument("perturbed_maxwellian: |amplitude| must be < 1 for f0 >= 0");
  }
  const Vec3 k{kTwoPi * modes[0] / box.x, kTwoPi * modes[1] / box.y, kTwoPi * modes[2] / box.z};
  const double volume = box.x * box.y * box.z;
  const double nv = gauss_norm(v_width);
  const double amp = mass / volume * nv * nv * nv;
  const double av = 0.5 / (v_width * v_width);
  int lead = -1;
  for (int i = 0; i < 3; ++i) {
    if (modes[i] != 0) {
      lead = i;
      break;
    }
  }
  VelocityFunction f;
  f.eval = [=](const Vec3& x, const Vec3& v) {
    return amp * (1.0 + amplitude * std::cos(dot(k, x))) * std::exp(-av * norm2(v - v_drift));
  };
  f.support = {Vec3{}, box, v_drift - splat(sigmas * v_width), v_drift + splat(sigmas * v_width)};
  f.mass = mass;
  f.isotropic_v = v_drift == Vec3{};
  f.sampler = [=](const UnitPoint& u) {
    PhasePoint p;
    // The non-leading coordinates are uniform; the leading one follows the
    // conditional density given the phase they set.
    double phase = 0.0;
    for (int i = 0; i < 3; ++i) {
      if (i == lead) continue;
      p.x[i] = u[i] * box[i];
      phase += k[i] * p.x[i];
    }
    if (lead >= 0) {
      int m = modes[lead];
      if (m < 0) {
        m = -m;
        phase = -phase;
      }
      p.x[lead] = perturbed_quantile(u[lead], amplitude, m, phase) * box[lead];
    }
    for (int i = 0; i < 3; ++i) p.v[i] = v_drift[i] + v_width * normal_quantile(u[3 + i]);
    return p;
  };
  int nonzero = 0;
  for (int m : modes) nonzero += m != 0;
  if (nonzero <= 1) {
    ProductForm pf;
    for (int i = 0; i < 3; ++i) {
      const double inv_len = 1.0 / box[i];
      if (i == lead) {
        pf.x_factors[i] = [=, ki = k[i]](double s) {
          return inv_len * (1.0 + amplitude * std::cos(ki * s));
        };
      } else {
        pf.x_factors[i] = [inv_len](double) { return inv_len; };
      }
    }
    const double amp_v = mass * nv * nv * nv;
    pf.v_factor = [=](const Vec3& v) { return amp_v * std::exp(-av * norm2(v - v_drift)); };
    f.product = std::move(pf);
  }
  f.name = "perturbed_maxwellian";
  return f;
}

VelocityFunction phase_ball(const Vec3& x_center, double x_radius, const Vec3& v_center,
                            double v_radius) {
  require_positive(x_radius, "phase_ball x_radius");
  require_positive(v_radius, "phase_ball v_radius");
  VelocityFunction f;
  f.eval = [=](const Vec3& x, const Vec3& v) {
    return (norm2(x - x_center) < x_radius * x_radius && norm2(v - v_center) < v_radius * v_radius)
               ? 1.0
               : 0.0;
  };
  f.support = {x_center - splat(x_radius), x_center + splat(x_radius), v_center - splat(v_radius),
               v_center + splat(v_radius)};
  const double ball = 4.0 / 3.0 * std::numbers::pi;
  f.mass = ball * x_radius * x_radius * x_radius * ball * v_radius * v_radius * v_radius;
  f.isotropic_v = v_center == Vec3{};
  f.name = "phase_ball";
  return f;
}

VelocityFunction point_mass(const Vec3& x0, const Vec3& v0, double mass) {
  require_positive(mass, "point_mass mass");
  VelocityFunction f;
  f.eval = [](const Vec3&, const Vec3&) { return 0.0; };
  f.support = {x0, x0, v0, v0};
  f.mass = mass;
  f.sampler = [=](const UnitPoint&) { return PhasePoint{x0, v0}; };
  f.name = "point_mass";
  return f;
}

}  // namespace ghl
