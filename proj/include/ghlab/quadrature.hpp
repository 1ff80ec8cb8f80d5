#pragma once

#include <vector>

namespace ghl {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
  template <class Fn>
  double integrate(const Fn& fn) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * fn(nodes[i]);
    return s;
  }
};

/// n-point Gauss-Legendre rule on [a, b].
Rule1D gauss_legendre(int n, double a, double b);

/// `panels` equal panels on [a, b], each with a `per_panel`-point GL rule.
Rule1D composite_gauss_legendre(int panels, int per_panel, double a, double b);

/// n equal cells on [a, b], one node at each midpoint.
Rule1D midpoint_rule(int n, double a, double b);

/// Trapezoid rule with n >= 2 equally spaced nodes including both ends.
Rule1D trapezoid_rule(int n, double a, double b);

/// Rule for integrands oscillating with period `period`: [a, b] is cut into
/// the fewest equal cells no longer than one period, each carrying a
/// `micro`-point GL rule. The mean node spacing is then <= period / micro.
Rule1D stratified_rule(double a, double b, double period, int micro = 16);

/// Cell count used by stratified_rule (so callers can check budgets first).
int stratified_cells(double a, double b, double period);

}  // namespace ghl
