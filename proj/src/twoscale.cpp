#include "ghlab/twoscale.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ghlab/csv.hpp"
#include "ghlab/parallel.hpp"
#include "ghlab/quadrature.hpp"

namespace ghl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kBlock = 256;

// Gauss-Legendre nodes on [lo, hi] with the weight optionally multiplied by a bump.
struct AxisTable {
  std::vector<double> nodes;
  std::vector<double> weights;
};

AxisTable axis_table(double lo, double hi, int n, const Bump* bump) {
  const Rule1D r = gauss_legendre(n, lo, hi);
  AxisTable t{r.nodes, r.weights};
  if (bump) {
    for (std::size_t j = 0; j < t.nodes.size(); ++j) t.weights[j] *= (*bump)(t.nodes[j]);
  }
  return t;
}

using Axes = std::array<AxisTable, 3>;

struct VNode {
  Vec3 v;
  double w;
};

std::vector<VNode> tensor_nodes(const Axes& ax) {
  std::vector<VNode> out;
  out.reserve(ax[0].nodes.size() * ax[1].nodes.size() * ax[2].nodes.size());
  for (std::size_t i = 0; i < ax[0].nodes.size(); ++i)
    for (std::size_t j = 0; j < ax[1].nodes.size(); ++j)
      for (std::size_t k = 0; k < ax[2].nodes.size(); ++k) {
        const double w = ax[0].weights[i] * ax[1].weights[j] * ax[2].weights[k];
        if (w != 0.0) out.push_back({{ax[0].nodes[i], ax[1].nodes[j], ax[2].nodes[k]}, w});
      }
  return out;
}

// prod_a sum_j w_j rho_a(x_j + shift_a)^power
double product_xsum(const ProductForm& pf, const Axes& ax, const Vec3& shift, int power) {
  double prod = 1.0;
  for (int a = 0; a < 3; ++a) {
    double s = 0.0;
    for (std::size_t j = 0; j < ax[a].nodes.size(); ++j) {
      const double r = pf.x_factors[a](ax[a].nodes[j] + shift[a]);
      s += ax[a].weights[j] * (power == 2 ? r * r : r);
    }
    prod *= s;
    if (prod == 0.0) break;
  }
  return prod;
}

// sum over the x tensor nodes of w(x) f0(x + shift, v)
double general_xsum(const VelocityFunction& f0, const std::vector<VNode>& xnodes, const Vec3& shift,
                    const Vec3& v, int power) {
  double s = 0.0;
  for (const VNode& xn : xnodes) {
    const double f = f0(xn.v + shift, v);
    s += xn.w * (power == 2 ? f * f : f);
  }
  return s;
}

Axes x_axes(const TestFunction& psi, int n) {
  return {axis_table(psi.x[0].lo(), psi.x[0].hi(), n, &psi.x[0]),
          axis_table(psi.x[1].lo(), psi.x[1].hi(), n, &psi.x[1]),
          axis_table(psi.x[2].lo(), psi.x[2].hi(), n, &psi.x[2])};
}

Axes v_axes(const TestFunction& psi, int n) {
  return {axis_table(psi.v[0].lo(), psi.v[0].hi(), n, &psi.v[0]),
          axis_table(psi.v[1].lo(), psi.v[1].hi(), n, &psi.v[1]),
          axis_table(psi.v[2].lo(), psi.v[2].hi(), n, &psi.v[2])};
}

void check_budget(double evaluations, const QuadSpec& spec, const char* what) {
  if (evaluations > spec.node_budget) {
    throw std::invalid_argument(std::string(what) + ": quadrature needs " +
                                std::to_string(evaluations) + " evaluations, budget is " +
                                std::to_string(spec.node_budget));
  }
}

template <class ItemFn>
double blocked_sum(std::size_t items, const ItemFn& item) {
  std::vector<double> partial(block_count(items, kBlock), 0.0);
  parallel_blocks(items, kBlock, [&](const BlockRange& r) {
    double s = 0.0;
    for (std::size_t n = r.begin; n < r.end; ++n) s += item(n);
    partial[r.index] = s;
  });
  return ordered_sum(partial);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void check_eps_list(const std::vector<double>& eps_list) {
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0) || !std::isfinite(eps_list[i])) {
      throw std::invalid_argument("eps list entries must be finite and > 0");
    }
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) {
      throw std::invalid_argument("eps list must be strictly decreasing");
    }
  }
}

}  // namespace

// --- test functions -------------------------------------------------------

double Bump::operator()(double s) const {
  const double r = (s - center) / half_width;
  const double q = 1.0 - r * r;
  if (q <= 0.0) return 0.0;
  return std::exp(1.0 - 1.0 / q);
}

std::string to_string(TauMode mode) {
  switch (mode) {
    case TauMode::one: return "one";
    case TauMode::cos1: return "cos";
    case TauMode::sin1: return "sin";
    case TauMode::cos2: return "cos2";
  }
  return "one";
}

TauMode tau_mode_from_string(const std::string& name) {
  if (name == "one") return TauMode::one;
  if (name == "cos") return TauMode::cos1;
  if (name == "sin") return TauMode::sin1;
  if (name == "cos2") return TauMode::cos2;
  throw std::invalid_argument("unknown tau mode '" + name + "' (one, cos, sin, cos2)");
}

int TestFunction::tau_harmonics() const {
  switch (tau) {
    case TauMode::one: return 0;
    case TauMode::cos1:
    case TauMode::sin1: return 1;
    case TauMode::cos2: return 2;
  }
  return 0;
}

double TestFunction::tau_factor(double tau_value) const {
  switch (tau) {
    case TauMode::one: return 1.0;
    case TauMode::cos1: return std::cos(tau_value);
    case TauMode::sin1: return std::sin(tau_value);
    case TauMode::cos2: return std::cos(2.0 * tau_value);
  }
  return 1.0;
}

PhaseBox TestFunction::support() const {
  return {{x[0].lo(), x[1].lo(), x[2].lo()},
          {x[0].hi(), x[1].hi(), x[2].hi()},
          {v[0].lo(), v[1].lo(), v[2].lo()},
          {v[0].hi(), v[1].hi(), v[2].hi()}};
}

void TestFunction::validate() const {
  auto ok = [](const Bump& b) {
    return std::isfinite(b.center) && std::isfinite(b.half_width) && b.half_width > 0.0;
  };
  bool good = ok(t) && std::isfinite(amplitude);
  for (int a = 0; a < 3; ++a) good = good && ok(x[a]) && ok(v[a]);
  if (!good) throw std::invalid_argument("test function '" + id + "': bad bump parameters");
}

std::vector<TestFunction> default_test_suite(double horizon) {
  auto make = [horizon](std::string id, double tc, Vec3 xc, double xw, Vec3 vc, double vw,
                        TauMode mode) {
    TestFunction f;
    f.id = std::move(id);
    f.t = {tc * horizon, std::min(tc, 1.0 - tc) * horizon};
    for (int a = 0; a < 3; ++a) {
      f.x[a] = {xc[a], xw};
      f.v[a] = {vc[a], vw};
    }
    f.tau = mode;
    return f;
  };
  const std::array<std::tuple<double, Vec3, double, Vec3, double>, 3> shapes{{
      {0.5, {0.0, 0.0, 0.0}, 3.0, {0.3, 0.5, 0.0}, 3.0},
      {0.5, {0.4, -0.3, 0.2}, 2.5, {0.0, 0.4, -0.3}, 2.5},
      {0.5, {-0.3, 0.5, -0.4}, 2.5, {0.5, 0.0, 0.3}, 2.5},
  }};
  const std::array<std::string, 3> names{"bump_a", "bump_b", "bump_c"};
  const std::array<TauMode, 3> modes{TauMode::cos1, TauMode::sin1, TauMode::cos2};
  std::vector<TestFunction> out;
  for (int i = 0; i < 3; ++i) {
    const auto& [tc, xc, xw, vc, vw] = shapes[i];
    out.push_back(make(names[i], tc, xc, xw, vc, vw, TauMode::one));
  }
  for (int i = 0; i < 3; ++i) {
    const auto& [tc, xc, xw, vc, vw] = shapes[i];
    out.push_back(make(names[i] + "_" + to_string(modes[i]), tc, xc, xw, vc, vw, modes[i]));
  }
  return out;
}

void QuadSpec::validate() const {
  if (nodes_t < 1 || nodes_x < 1 || nodes_v < 1) {
    throw std::invalid_argument("QuadSpec: node counts must be >= 1");
  }
  if (micro_t < 1) throw std::invalid_argument("QuadSpec: micro_t must be >= 1");
  if (gyro_nodes < 4) throw std::invalid_argument("QuadSpec: gyro_nodes must be >= 4");
  if (max_nodes_t < 1) throw std::invalid_argument("QuadSpec: max_nodes_t must be >= 1");
  if (!(node_budget > 0.0)) throw std::invalid_argument("QuadSpec: node_budget must be > 0");
}

std::pair<double, double> time_window(const TestFunction& psi, double horizon) {
  return {std::max(0.0, psi.t.lo()), std::min(horizon, psi.t.hi())};
}

// --- pairings -------------------------------------------------------------

double projection_residual(const LinearSolver& solver, double t, const Vec3& x, const Vec3& v,
                           const GyroQuadrature& quad) {
  double sum = 0.0;
  for (int k = 0; k < quad.node_count(); ++k) sum += solver.F(t, quad.node(k), x, v);
  return std::abs(sum * (2.0 * std::numbers::pi / quad.node_count()) - solver.f_limit(t, x, v));
}

double pairing_lhs(const LinearSolver& solver, const TestFunction& psi, const QuadSpec& spec,
                   int* nodes_t) {
  spec.validate();
  psi.validate();
  const LinearProblem& prob = solver.problem();
  const double eps = prob.cfg.epsilon();
  const auto [a, b] = time_window(psi, prob.horizon());
  if (nodes_t) *nodes_t = 0;
  if (!(b > a) || psi.amplitude == 0.0) return 0.0;

  const int cells = stratified_cells(a, b, kTwoPi * eps);
  const double nt = static_cast<double>(cells) * spec.micro_t;
  if (nt > spec.max_nodes_t) {
    throw std::invalid_argument("pairing: eps = " + std::to_string(eps) +
                                " is below the resolvable threshold of the t quadrature (needs " +
                                std::to_string(static_cast<long long>(nt)) + " nodes, max " +
                                std::to_string(spec.max_nodes_t) + ")");
  }
  const Rule1D rt = composite_gauss_legendre(cells, spec.micro_t, a, b);
  if (nodes_t) *nodes_t = static_cast<int>(rt.size());

  const Axes ax = x_axes(psi, spec.nodes_x);
  const std::vector<VNode> xnodes = tensor_nodes(ax);
  const std::vector<VNode> vnodes = tensor_nodes(v_axes(psi, spec.nodes_v));
  const bool ti = solver.translation_invariant();
  const bool factor = ti && prob.f0.product.has_value();
  const double per_node = factor ? 1.0 : static_cast<double>(xnodes.size());
  check_budget(nt * static_cast<double>(vnodes.size()) * per_node, spec, "pairing_lhs");

  std::vector<double> tw(rt.size());
  for (std::size_t i = 0; i < rt.size(); ++i) {
    const double t = rt.nodes[i];
    tw[i] = rt.weights[i] * psi.t_factor(t) * psi.tau_factor(t / eps);
  }
  const VelocityFunction& f0 = prob.f0;
  const std::size_t nv = vnodes.size();
  return blocked_sum(rt.size() * nv, [&](std::size_t item) {
    const std::size_t it = item / nv;
    const VNode& vn = vnodes[item % nv];
    if (tw[it] == 0.0) return 0.0;
    const double t = rt.nodes[it];
    double inner = 0.0;
    if (ti) {
      const PhasePoint o = solver.origin_full(t, Vec3{}, vn.v);
      inner = factor ? product_xsum(*f0.product, ax, o.x, 1) * f0.product->v_factor(o.v)
                     : general_xsum(f0, xnodes, o.x, o.v, 1);
    } else {
      for (const VNode& xn : xnodes) {
        const PhasePoint o = solver.origin_full(t, xn.v, vn.v);
        inner += xn.w * f0(o.x, o.v);
      }
    }
    return tw[it] * vn.w * inner;
  });
}

double pairing_rhs(const LinearSolver& solver, const TestFunction& psi, const QuadSpec& spec) {
  spec.validate();
  psi.validate();
  const LinearProblem& prob = solver.problem();
  const auto [a, b] = time_window(psi, prob.horizon());
  if (!(b > a) || psi.amplitude == 0.0) return 0.0;

  const Rule1D rt = gauss_legendre(spec.nodes_t, a, b);
  const Axes ax = x_axes(psi, spec.nodes_x);
  const std::vector<VNode> xnodes = tensor_nodes(ax);
  const std::vector<VNode> vnodes = tensor_nodes(v_axes(psi, spec.nodes_v));
  const bool ti = solver.translation_invariant();
  const bool factor = ti && prob.f0.product.has_value();

  // Gyro nodes with the tau factor and the 1/N of the rule folded in.
  struct Gyro {
    double c, s, h;
  };
  std::vector<Gyro> gyro;
  for (int k = 0; k < spec.gyro_nodes; ++k) {
    const double tau = kTwoPi * k / spec.gyro_nodes;
    const double h = psi.tau_factor(tau) / spec.gyro_nodes;
    if (h != 0.0) gyro.push_back({std::cos(tau), std::sin(tau), h});
  }
  const double per_node = (factor ? 1.0 : static_cast<double>(xnodes.size())) * gyro.size();
  check_budget(static_cast<double>(rt.size()) * vnodes.size() * per_node, spec, "pairing_rhs");

  const GyroFrame frame(prob.cfg.axis());
  const auto drift = prob.drift();
  const Vec3 c = drift ? cross(prob.cfg.axis().direction(), drift->direction()) : Vec3{};
  auto rotated = [&](const Vec3& v, const Gyro& g) { return frame.rotate_cs(v + c, g.c, g.s) - c; };

  const VelocityFunction& f0 = prob.f0;
  const std::size_t nv = vnodes.size();
  // The limit flows commute with the gyro rotation u(., tau), so the origin of
  // u(v, tau) is u(origin of v, tau): one backward push serves every tau node.
  return blocked_sum(rt.size() * nv, [&](std::size_t item) {
    const std::size_t it = item / nv;
    const VNode& vn = vnodes[item % nv];
    const double t = rt.nodes[it];
    const double tw = rt.weights[it] * psi.t_factor(t);
    if (tw == 0.0) return 0.0;
    double inner = 0.0;
    if (ti) {
      const PhasePoint o = solver.origin_limit(t, Vec3{}, vn.v);
      if (factor) {
        double g_sum = 0.0;
        for (const Gyro& g : gyro) g_sum += g.h * f0.product->v_factor(rotated(o.v, g));
        inner = product_xsum(*f0.product, ax, o.x, 1) * g_sum;
      } else {
        for (const Gyro& g : gyro) inner += g.h * general_xsum(f0, xnodes, o.x, rotated(o.v, g), 1);
      }
    } else {
      for (const VNode& xn : xnodes) {
        const PhasePoint o = solver.origin_limit(t, xn.v, vn.v);
        double g_sum = 0.0;
        for (const Gyro& g : gyro) g_sum += g.h * f0(o.x, rotated(o.v, g));
        inner += xn.w * g_sum;
      }
    }
    return tw * vn.w * inner;
  });
}

IntegratorSettings settings_for_epsilon(const IntegratorSettings& settings, double eps) {
  IntegratorSettings s = settings;
  s.dt = std::min(settings.dt, 2.0 * std::numbers::pi * eps / settings.substeps_per_gyroperiod);
  return s;
}

namespace {

std::vector<PairingResult> pair_sweep(const LinearProblem& prob, const TestFunction& psi,
                                      const std::vector<double>& eps_list, const QuadSpec& spec,
                                      const IntegratorSettings& settings) {
  check_eps_list(eps_list);
  std::vector<PairingResult> out;
  if (eps_list.empty()) return out;
  const double eps0 = eps_list.front();
  const double reference = pairing_rhs(
      LinearSolver(prob.with_epsilon(eps0), settings_for_epsilon(settings, eps0)), psi, spec);
  for (double eps : eps_list) {
    const auto start = std::chrono::steady_clock::now();
    const LinearSolver solver(prob.with_epsilon(eps), settings_for_epsilon(settings, eps));
    PairingResult r;
    r.test_id = psi.id;
    r.epsilon = eps;
    r.value = pairing_lhs(solver, psi, spec, &r.nodes_t);
    r.reference = reference;
    r.abs_error = std::abs(r.value - r.reference);
    r.nodes_x = spec.nodes_x;
    r.nodes_v = spec.nodes_v;
    r.seconds = seconds_since(start);
    out.push_back(r);
  }
  return out;
}

}  // namespace

std::vector<PairingResult> pair_weak(const LinearProblem& prob, const TestFunction& phi,
                                     const std::vector<double>& eps_list, const QuadSpec& spec,
                                     const IntegratorSettings& settings) {
  if (phi.tau_harmonics() != 0) {
    throw std::invalid_argument("pair_weak: test function '" + phi.id + "' depends on tau");
  }
  return pair_sweep(prob, phi, eps_list, spec, settings);
}

std::vector<PairingResult> pair_twoscale(const LinearProblem& prob, const TestFunction& psi,
                                         const std::vector<double>& eps_list, const QuadSpec& spec,
                                         const IntegratorSettings& settings) {
  return pair_sweep(prob, psi, eps_list, spec, settings);
}

PhaseBox evolved_support(const LinearProblem& prob, double t) {
  const PhaseBox& s = prob.f0.support;
  const auto drift = prob.drift();
  const Vec3& m = prob.cfg.axis().direction();
  const Vec3 c = drift ? cross(m, drift->direction()) : Vec3{};
  // Parallel range and perpendicular radius of v + M x n over the support.
  double par_lo = 1e300, par_hi = -1e300, perp = 0.0;
  for (int k = 0; k < 8; ++k) {
    const Vec3 w = Vec3{(k & 1) ? s.v_hi.x : s.v_lo.x, (k & 2) ? s.v_hi.y : s.v_lo.y,
                        (k & 4) ? s.v_hi.z : s.v_lo.z} + c;
    const double par = dot(w, m);
    par_lo = std::min(par_lo, par);
    par_hi = std::max(par_hi, par);
    perp = std::max(perp, norm(w - par * m));
  }
  // |v + M x n| changes only through the weak fields.
  const double growth =
      t * (norm(prob.cfg.e_weak().amplitude) + norm(c) * norm(prob.cfg.b_weak().amplitude));
  par_lo -= growth;
  par_hi += growth;
  perp += growth;
  PhaseBox out;
  for (int a = 0; a < 3; ++a) {
    const double side = perp * std::sqrt(std::max(0.0, 1.0 - m[a] * m[a]));
    out.v_lo[a] = std::min(par_lo * m[a], par_hi * m[a]) - side - c[a];
    out.v_hi[a] = std::max(par_lo * m[a], par_hi * m[a]) + side - c[a];
  }
  const double speed = std::max(std::abs(par_lo), std::abs(par_hi)) + perp + norm(c);
  const double reach = t * speed;
  out.x_lo = s.x_lo - Vec3{reach, reach, reach};
  out.x_hi = s.x_hi + Vec3{reach, reach, reach};
  return out;
}

double l2_norm_f(const LinearProblem& prob, double t, const QuadSpec& spec,
                 const IntegratorSettings& settings, const std::optional<PhaseBox>& box_in) {
  spec.validate();
  const PhaseBox box = box_in ? *box_in : evolved_support(prob, t);
  const LinearSolver solver(prob, settings);
  Axes ax, av;
  for (int a = 0; a < 3; ++a) {
    ax[a] = axis_table(box.x_lo[a], box.x_hi[a], spec.nodes_x, nullptr);
    av[a] = axis_table(box.v_lo[a], box.v_hi[a], spec.nodes_v, nullptr);
  }
  const std::vector<VNode> xnodes = tensor_nodes(ax);
  const std::vector<VNode> vnodes = tensor_nodes(av);
  const bool ti = solver.translation_invariant();
  const bool factor = ti && prob.f0.product.has_value();
  check_budget(static_cast<double>(vnodes.size()) * (factor ? 1.0 : xnodes.size()), spec,
               "l2_norm_f");
  const VelocityFunction& f0 = prob.f0;
  return blocked_sum(vnodes.size(), [&](std::size_t iv) {
    const VNode& vn = vnodes[iv];
    if (ti) {
      const PhasePoint o = solver.origin_full(t, Vec3{}, vn.v);
      if (factor) {
        const double g = f0.product->v_factor(o.v);
        return vn.w * product_xsum(*f0.product, ax, o.x, 2) * g * g;
      }
      return vn.w * general_xsum(f0, xnodes, o.x, o.v, 2);
    }
    double s = 0.0;
    for (const VNode& xn : xnodes) {
      const PhasePoint o = solver.origin_full(t, xn.v, vn.v);
      const double f = f0(o.x, o.v);
      s += xn.w * f * f;
    }
    return vn.w * s;
  });
}

SweepReport convergence_sweep(const LinearProblem& prob, const std::vector<TestFunction>& tests,
                              const std::vector<double>& eps_list, const QuadSpec& spec,
                              const IntegratorSettings& settings) {
  check_eps_list(eps_list);
  SweepReport report;
  for (const TestFunction& psi : tests) {
    const auto rows = psi.tau_harmonics() == 0 ? pair_weak(prob, psi, eps_list, spec, settings)
                                               : pair_twoscale(prob, psi, eps_list, spec, settings);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].abs_error > rows[i - 1].abs_error) {
        report.non_monotone.push_back(psi.id);
        break;
      }
    }
    report.rows.insert(report.rows.end(), rows.begin(), rows.end());
  }
  return report;
}

void write_pairing_csv(const std::string& path, const std::vector<PairingResult>& rows,
                       bool with_timing) {
  CsvWriter csv(path, {"test_id", "epsilon", "lhs", "rhs", "abs_error", "nodes_t", "nodes_x",
                       "nodes_v", "seconds"});
  for (const PairingResult& r : rows) {
    csv.row({r.test_id, r.epsilon, r.value, r.reference, r.abs_error,
             static_cast<long long>(r.nodes_t), static_cast<long long>(r.nodes_x),
             static_cast<long long>(r.nodes_v), with_timing ? r.seconds : 0.0});
  }
}

// --- rho oscillation --------------------------------------------------------

double rho_oscillation_pairing(const RhoSeries& series, const Grid3& grid,
                               const SpaceTimeFunction& phi) {
  if (!(series.epsilon > 0.0)) throw std::invalid_argument("rho pairing: eps must be > 0");
  if (series.times.size() != series.rho.size()) {
    throw std::invalid_argument("rho pairing: times and samples differ in length");
  }
  if (series.times.size() < 2) return 0.0;
  const double max_dt = kTwoPi * series.epsilon / 16.0 * (1.0 + 1e-9);
  for (std::size_t n = 1; n < series.times.size(); ++n) {
    const double dt = series.times[n] - series.times[n - 1];
    if (!(dt > 0.0)) throw std::invalid_argument("rho pairing: times must increase");
    if (dt > max_dt) {
      throw std::invalid_argument(
          "rho pairing: sampling is coarser than 16 samples per fast period");
    }
  }
  const double cell = grid.cell_volume();
  std::vector<double> q(series.times.size());
  for (std::size_t n = 0; n < q.size(); ++n) {
    const std::vector<double>& rho = series.rho[n];
    if (rho.size() != grid.size()) throw std::invalid_argument("rho pairing: grid size mismatch");
    double s = 0.0;
    for (int i = 0; i < grid.cells()[0]; ++i)
      for (int j = 0; j < grid.cells()[1]; ++j)
        for (int k = 0; k < grid.cells()[2]; ++k) {
          s += rho[grid.index(i, j, k)] * phi(series.times[n], grid.node(i, j, k));
        }
    q[n] = s * cell;
  }
  // Exact integral of the piecewise-linear interpolant of q against cos(t / eps).
  const double w = 1.0 / series.epsilon;
  double total = 0.0;
  for (std::size_t n = 1; n < q.size(); ++n) {
    const double ta = series.times[n - 1];
    const double tb = series.times[n];
    const double slope = (q[n] - q[n - 1]) / (tb - ta);
    const double sa = std::sin(w * ta), sb = std::sin(w * tb);
    const double ca = std::cos(w * ta), cb = std::cos(w * tb);
    total += q[n - 1] * (sb - sa) / w + slope * ((tb - ta) * sb / w + (cb - ca) / (w * w));
  }
  return std::abs(total);
}

std::vector<RhoTauRow> rho_tau_independence(const std::vector<RhoSeries>& runs, const Grid3& grid,
                                            const SpaceTimeFunction& phi) {
  std::vector<RhoTauRow> out;
  for (const RhoSeries& s : runs) out.push_back({s.epsilon, rho_oscillation_pairing(s, grid, phi)});
  return out;
}

}  // namespace ghl
