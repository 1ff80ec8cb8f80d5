#include "ghlab/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ghl {

namespace {

void check_interval(double a, double b) {
  if (!(b > a) || !std::isfinite(a) || !std::isfinite(b)) {
    throw std::invalid_argument("quadrature: need a finite interval with b > a");
  }
}

}  // namespace

Rule1D gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  check_interval(a, b);
  Rule1D r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute the derivative at the converged root
    double p0 = 1.0, p1 = 0.0;
    for (int j = 0; j < n; ++j) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.nodes[i] = mid - half * z;
    r.nodes[n - 1 - i] = mid + half * z;
    r.weights[i] = r.weights[n - 1 - i] = half * w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = mid;
  return r;
}

Rule1D composite_gauss_legendre(int panels, int per_panel, double a, double b) {
  if (panels < 1) throw std::invalid_argument("composite_gauss_legendre: panels must be >= 1");
  check_interval(a, b);
  Rule1D r;
  r.nodes.reserve(static_cast<std::size_t>(panels) * per_panel);
  r.weights.reserve(static_cast<std::size_t>(panels) * per_panel);
  const double len = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * len;
    const double hi = p + 1 == panels ? b : lo + len;
    const Rule1D cell = gauss_legendre(per_panel, lo, hi);
    r.nodes.insert(r.nodes.end(), cell.nodes.begin(), cell.nodes.end());
    r.weights.insert(r.weights.end(), cell.weights.begin(), cell.weights.end());
  }
  return r;
}

Rule1D midpoint_rule(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("midpoint_rule: n must be >= 1");
  check_interval(a, b);
  Rule1D r;
  const double h = (b - a) / n;
  for (int i = 0; i < n; ++i) {
    r.nodes.push_back(a + (i + 0.5) * h);
    r.weights.push_back(h);
  }
  return r;
}

Rule1D trapezoid_rule(int n, double a, double b) {
  if (n < 2) throw std::invalid_argument("trapezoid_rule: n must be >= 2");
  check_interval(a, b);
  Rule1D r;
  const double h = (b - a) / (n - 1);
  for (int i = 0; i < n; ++i) {
    r.nodes.push_back(i + 1 == n ? b : a + i * h);
    r.weights.push_back(i == 0 || i + 1 == n ? 0.5 * h : h);
  }
  return r;
}

int stratified_cells(double a, double b, double period) {
  check_interval(a, b);
  if (!(period > 0.0)) throw std::invalid_argument("stratified_rule: period must be > 0");
  const double cells = std::ceil((b - a) / period - 1e-12);
  if (cells > 1e8) throw std::invalid_argument("stratified_rule: too many cells");
  return std::max(1, static_cast<int>(cells));
}

Rule1D stratified_rule(double a, double b, double period, int micro) {
  return composite_gauss_legendre(stratified_cells(a, b, period), micro, a, b);
}

}  // namespace ghl
