#include "ghlab/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

namespace ghl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string scheme_name(Scheme s) { return s == Scheme::exact_split ? "exact_split" : "rk4_oracle"; }

std::string variant_name(Variant v) {
  return v == Variant::magnetic_only ? "magnetic_only" : "magnetic_plus_drift";
}

[[noreturn]] void fail_at(const YAML::Mark& mark, const std::string& message) {
  if (mark.is_null()) throw ConfigError(message);
  throw ConfigError(message, mark.line + 1, mark.column + 1);
}

[[noreturn]] void fail(const YAML::Node& node, const std::string& message) {
  fail_at(node.Mark(), message);
}

// Runs `check` and re-raises std::invalid_argument / ConfigError with the
// position of `node`.
void at(const YAML::Mark& mark, const std::function<void()>& check) {
  try {
    check();
  } catch (const ConfigError& e) {
    if (e.line() > 0) throw;
    fail_at(mark, e.message());
  } catch (const std::invalid_argument& e) {
    fail_at(mark, e.what());
  }
}

// A mapping whose keys must all be consumed.
class Section {
 public:
  Section(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node.IsMap()) fail(node, path_ + " must be a mapping");
  }

  const YAML::Node& node() const { return node_; }
  const std::string& path() const { return path_; }
  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  YAML::Node take(const std::string& key) {
    used_.insert(key);
    return node_[key];
  }

  void finish() const {
    for (const auto& kv : node_) {
      const std::string key = kv.first.as<std::string>();
      if (!used_.count(key)) fail(kv.first, "unknown key '" + key_path(key) + "'");
    }
  }

 private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> used_;
};

double as_double(const YAML::Node& n, const std::string& what) {
  if (!n.IsScalar()) fail(n, what + ": expected a number");
  double v = 0.0;
  try {
    v = n.as<double>();
  } catch (const YAML::Exception&) {
    fail(n, what + ": expected a number, got '" + n.Scalar() + "'");
  }
  if (!std::isfinite(v)) fail(n, what + ": must be finite");
  return v;
}

long long as_int(const YAML::Node& n, const std::string& what) {
  if (!n.IsScalar()) fail(n, what + ": expected an integer");
  try {
    return n.as<long long>();
  } catch (const YAML::Exception&) {
    fail(n, what + ": expected an integer, got '" + n.Scalar() + "'");
  }
}

std::string as_string(const YAML::Node& n, const std::string& what) {
  if (!n.IsScalar()) fail(n, what + ": expected a string");
  return n.Scalar();
}

Vec3 as_vec3(const YAML::Node& n, const std::string& what) {
  if (!n.IsSequence() || n.size() != 3) fail(n, what + ": expected a list of 3 numbers");
  return {as_double(n[0], what), as_double(n[1], what), as_double(n[2], what)};
}

void read(Section& s, const std::string& key, double& out) {
  if (auto n = s.take(key)) out = as_double(n, s.key_path(key));
}

void read_positive(Section& s, const std::string& key, double& out) {
  if (auto n = s.take(key)) {
    out = as_double(n, s.key_path(key));
    if (!(out > 0.0)) fail(n, s.key_path(key) + ": must be > 0");
  }
}

void read(Section& s, const std::string& key, int& out, long long min_value) {
  if (auto n = s.take(key)) {
    const long long v = as_int(n, s.key_path(key));
    if (v < min_value || v > 1'000'000'000) {
      fail(n, s.key_path(key) + ": must be an integer >= " + std::to_string(min_value));
    }
    out = static_cast<int>(v);
  }
}

void read(Section& s, const std::string& key, Vec3& out) {
  if (auto n = s.take(key)) out = as_vec3(n, s.key_path(key));
}

void read(Section& s, const std::string& key, std::string& out) {
  if (auto n = s.take(key)) out = as_string(n, s.key_path(key));
}

FieldSpec parse_field(const YAML::Node& node, const std::string& path) {
  Section s(node, path);
  FieldSpec f;
  if (auto n = s.take("kind")) {
    try {
      f.kind = field_kind_from_string(as_string(n, s.key_path("kind")));
    } catch (const std::invalid_argument& e) {
      fail(n, s.key_path("kind") + ": " + e.what());
    }
  }
  if (f.kind != FieldKind::zero) read(s, "amplitude", f.amplitude);
  if (f.kind == FieldKind::gaussian) {
    read(s, "center", f.center);
    read_positive(s, "width", f.width);
  }
  if (f.kind == FieldKind::trig) {
    read(s, "wavevector", f.wavevector);
    read(s, "omega", f.omega);
    read(s, "phase", f.phase);
  }
  s.finish();
  at(node.Mark(), [&] { f.validate(path); });
  return f;
}

Bump parse_bump(const YAML::Node& n, const std::string& what) {
  if (!n.IsSequence() || n.size() != 2) fail(n, what + ": expected [center, half_width]");
  Bump b{as_double(n[0], what), as_double(n[1], what)};
  if (!(b.half_width > 0.0)) fail(n, what + ": half_width must be > 0");
  return b;
}

std::array<Bump, 3> parse_bumps(const YAML::Node& n, const std::string& what) {
  if (!n.IsSequence() || n.size() != 3) fail(n, what + ": expected 3 [center, half_width] pairs");
  return {parse_bump(n[0], what), parse_bump(n[1], what), parse_bump(n[2], what)};
}

TestFunction parse_test(const YAML::Node& node, const std::string& path) {
  Section s(node, path);
  TestFunction f;
  read(s, "id", f.id);
  read(s, "amplitude", f.amplitude);
  if (auto n = s.take("tau")) {
    try {
      f.tau = tau_mode_from_string(as_string(n, s.key_path("tau")));
    } catch (const std::invalid_argument& e) {
      fail(n, s.key_path("tau") + ": " + e.what());
    }
  }
  if (auto n = s.take("t")) f.t = parse_bump(n, s.key_path("t"));
  if (auto n = s.take("x")) f.x = parse_bumps(n, s.key_path("x"));
  if (auto n = s.take("v")) f.v = parse_bumps(n, s.key_path("v"));
  s.finish();
  if (f.id.empty()) fail(node, path + ": id is required");
  at(node.Mark(), [&] { f.validate(); });
  return f;
}

void parse_fields(const YAML::Node& node, FieldsSection& out) {
  Section s(node, "fields");
  read(s, "axis", out.axis);
  if (auto n = s.take("drift")) {
    if (n.IsNull()) {
      out.drift.reset();
    } else {
      out.drift = as_vec3(n, "fields.drift");
    }
  }
  read_positive(s, "horizon", out.horizon);
  if (auto n = s.take("e_weak")) out.e_weak = parse_field(n, "fields.e_weak");
  if (auto n = s.take("b_weak")) out.b_weak = parse_field(n, "fields.b_weak");
  s.finish();
  at(node.Mark(), [&] { out.build(1.0); });
}

void parse_f0(const YAML::Node& node, F0Section& out) {
  Section s(node, "f0");
  read(s, "family", out.family);
  read_positive(s, "mass", out.mass);
  read_positive(s, "sigmas", out.sigmas);
  if (out.family == "maxwellian") {
    read(s, "x_center", out.x_center);
    read_positive(s, "x_width", out.x_width);
    read(s, "v_drift", out.v_drift);
    read_positive(s, "v_width", out.v_width);
  } else if (out.family == "bi_maxwellian") {
    read(s, "x_center", out.x_center);
    read_positive(s, "x_width", out.x_width);
    read(s, "axis", out.axis);
    read_positive(s, "v_par_width", out.v_par_width);
    read_positive(s, "v_perp_width", out.v_perp_width);
    read(s, "v_par_drift", out.v_par_drift);
  } else if (out.family == "perturbed_maxwellian") {
    read(s, "box", out.box);
    if (auto n = s.take("modes")) {
      if (!n.IsSequence() || n.size() != 3) fail(n, "f0.modes: expected 3 integers");
      for (int a = 0; a < 3; ++a) out.modes[a] = static_cast<int>(as_int(n[a], "f0.modes"));
    }
    read(s, "amplitude", out.amplitude);
    read(s, "v_drift", out.v_drift);
    read_positive(s, "v_width", out.v_width);
  } else if (out.family == "phase_ball") {
    read(s, "x_center", out.x_center);
    read_positive(s, "x_radius", out.x_radius);
    read(s, "v_center", out.v_center);
    read_positive(s, "v_radius", out.v_radius);
  } else {
    fail(node["family"] ? node["family"] : node,
         "f0.family: unknown family '" + out.family +
             "' (maxwellian, bi_maxwellian, perturbed_maxwellian, phase_ball)");
  }
  s.finish();
  at(node.Mark(), [&] { out.build(); });
}

void parse_integrator(const YAML::Node& node, IntegratorSection& out) {
  Section s(node, "integrator");
  if (auto n = s.take("scheme")) {
    const std::string name = as_string(n, "integrator.scheme");
    if (name == "exact_split") {
      out.scheme = Scheme::exact_split;
    } else if (name == "rk4_oracle") {
      out.scheme = Scheme::rk4_oracle;
    } else {
      fail(n, "integrator.scheme: expected exact_split or rk4_oracle, got '" + name + "'");
    }
  }
  read(s, "steps_per_gyroperiod", out.steps_per_gyroperiod, 8);
  read_positive(s, "velocity_bound", out.velocity_bound);
  s.finish();
}

void parse_quadrature(const YAML::Node& node, QuadSpec& out) {
  Section s(node, "quadrature");
  read(s, "nodes_t", out.nodes_t, 1);
  read(s, "nodes_x", out.nodes_x, 1);
  read(s, "nodes_v", out.nodes_v, 1);
  read(s, "micro_t", out.micro_t, 1);
  read(s, "gyro_nodes", out.gyro_nodes, 4);
  read(s, "max_nodes_t", out.max_nodes_t, 1);
  read_positive(s, "node_budget", out.node_budget);
  s.finish();
  at(node.Mark(), [&] { out.validate(); });
}

void parse_vp(const YAML::Node& node, VPSection& out) {
  Section s(node, "vp");
  if (auto n = s.take("mode")) {
    const std::string name = as_string(n, "vp.mode");
    if (name == "finite_eps") {
      out.mode = VPMode::finite_eps;
    } else if (name == "homogenized") {
      out.mode = VPMode::homogenized;
    } else {
      fail(n, "vp.mode: expected finite_eps or homogenized, got '" + name + "'");
    }
  }
  read(s, "cells", out.cells, 8);
  read_positive(s, "box", out.box);
  if (auto n = s.take("particles")) {
    const long long v = as_int(n, "vp.particles");
    if (v < 1) fail(n, "vp.particles: must be >= 1");
    out.particles = static_cast<std::size_t>(v);
  }
  read_positive(s, "dt_macro", out.dt_macro);
  read(s, "substeps", out.substeps, 1);
  read_positive(s, "horizon", out.horizon);
  read(s, "snapshot_every", out.snapshot_every, 0);
  read_positive(s, "energy_tolerance", out.energy_tolerance);
  read_positive(s, "continuity_tolerance", out.continuity_tolerance);
  s.finish();
}

void parse_diagnostics(const YAML::Node& node, DiagnosticsSection& out) {
  Section s(node, "diagnostics");
  if (auto n = s.take("times")) {
    if (!n.IsSequence() || n.size() == 0) fail(n, "diagnostics.times: expected a non-empty list");
    out.times.clear();
    for (const auto& t : n) {
      const double v = as_double(t, "diagnostics.times");
      if (v < 0.0) fail(t, "diagnostics.times: times must be >= 0");
      out.times.push_back(v);
    }
  }
  read(s, "samples", out.samples, 1);
  read_positive(s, "l2_tolerance", out.l2_tolerance);
  read_positive(s, "identity_tolerance", out.identity_tolerance);
  s.finish();
}

void emit_vec(YAML::Emitter& e, const Vec3& v) {
  e << YAML::Flow << YAML::BeginSeq << v.x << v.y << v.z << YAML::EndSeq;
}

void emit_field(YAML::Emitter& e, const FieldSpec& f) {
  e << YAML::BeginMap << YAML::Key << "kind" << YAML::Value << std::string(to_string(f.kind));
  if (f.kind != FieldKind::zero) {
    e << YAML::Key << "amplitude" << YAML::Value;
    emit_vec(e, f.amplitude);
  }
  if (f.kind == FieldKind::gaussian) {
    e << YAML::Key << "center" << YAML::Value;
    emit_vec(e, f.center);
    e << YAML::Key << "width" << YAML::Value << f.width;
  }
  if (f.kind == FieldKind::trig) {
    e << YAML::Key << "wavevector" << YAML::Value;
    emit_vec(e, f.wavevector);
    e << YAML::Key << "omega" << YAML::Value << f.omega;
    e << YAML::Key << "phase" << YAML::Value << f.phase;
  }
  e << YAML::EndMap;
}

void emit_bump(YAML::Emitter& e, const Bump& b) {
  e << YAML::Flow << YAML::BeginSeq << b.center << b.half_width << YAML::EndSeq;
}

}  // namespace

namespace {

std::string located(const std::string& message, int line, int column, const std::string& source) {
  std::string where = source;
  if (line > 0) {
    where += (where.empty() ? "" : ":") + std::to_string(line) + ":" + std::to_string(column);
  }
  return where.empty() ? message : where + ": " + message;
}

}  // namespace

ConfigError::ConfigError(const std::string& message, int line, int column,
                         const std::string& source)
    : std::runtime_error(located(message, line, column, source)),
      message_(message),
      line_(line),
      column_(column) {}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::linear_sweep: return "linear-sweep";
    case ExperimentKind::drift_demo: return "drift-demo";
    case ExperimentKind::vp_run: return "vp-run";
    case ExperimentKind::vp_compare: return "vp-compare";
    case ExperimentKind::diagnostics: return "diagnostics";
  }
  return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  for (auto k : {ExperimentKind::linear_sweep, ExperimentKind::drift_demo, ExperimentKind::vp_run,
                 ExperimentKind::vp_compare, ExperimentKind::diagnostics}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown experiment '" + name +
                              "' (linear-sweep, drift-demo, vp-run, vp-compare, diagnostics)");
}

FieldConfig FieldsSection::build(double epsilon) const {
  std::optional<UnitAxis> n;
  if (drift) n = UnitAxis(*drift);
  return FieldConfig(epsilon, UnitAxis(axis), n, e_weak, b_weak, horizon);
}

VelocityFunction F0Section::build() const {
  if (family == "maxwellian") return maxwellian(x_center, x_width, v_drift, v_width, mass, sigmas);
  if (family == "bi_maxwellian") {
    return bi_maxwellian(x_center, x_width, UnitAxis(axis), v_par_width, v_perp_width, v_par_drift,
                         mass, sigmas);
  }
  if (family == "perturbed_maxwellian") {
    return perturbed_maxwellian(box, modes, amplitude, v_drift, v_width, mass, sigmas);
  }
  if (family == "phase_ball") return phase_ball(x_center, x_radius, v_center, v_radius).scaled(mass);
  throw std::invalid_argument("unknown f0 family '" + family + "'");
}

IntegratorSettings IntegratorSection::build(double epsilon) const {
  IntegratorSettings s;
  s.scheme = scheme;
  s.substeps_per_gyroperiod = steps_per_gyroperiod;
  s.dt = kTwoPi * epsilon / steps_per_gyroperiod;
  s.velocity_bound = velocity_bound;
  s.validate(epsilon);
  return s;
}

VPRunConfig VPSection::build(const FieldsSection& fields, double epsilon, VPMode run_mode,
                             std::uint64_t seed) const {
  VPRunConfig c;
  c.grid = Grid3::cube(cells, box);
  FieldsSection f = fields;
  f.horizon = std::max(fields.horizon, horizon);
  c.cfg = f.build(epsilon);
  c.particles = particles;
  c.dt_macro = dt_macro;
  c.substeps = substeps;
  c.horizon = horizon;
  c.seed = seed;
  c.mode = run_mode;
  c.validate();
  return c;
}

std::vector<TestFunction> ExperimentConfig::test_suite() const {
  return tests.empty() ? default_test_suite(fields.horizon) : tests;
}

LinearProblem ExperimentConfig::linear_problem(double epsilon) const {
  LinearProblem p{fields.build(epsilon), f0.build(), variant};
  p.validate();
  return p;
}

void ExperimentConfig::validate() const {
  if (epsilons.empty()) throw ConfigError("epsilons: the list must not be empty");
  for (double e : epsilons) {
    if (!(e > 0.0) || !std::isfinite(e)) throw ConfigError("epsilons: values must be finite and > 0");
  }
  const bool sweep = kind == ExperimentKind::linear_sweep || kind == ExperimentKind::vp_compare;
  if (sweep) {
    for (std::size_t n = 1; n < epsilons.size(); ++n) {
      if (!(epsilons[n] < epsilons[n - 1])) {
        throw ConfigError("epsilons: the list must be strictly decreasing");
      }
    }
  }
  try {
    for (double e : epsilons) {
      linear_problem(e);
      integrator.build(e);
    }
    for (const TestFunction& t : tests) t.validate();
    if (kind == ExperimentKind::drift_demo && !fields.drift) {
      throw ConfigError("drift-demo requires fields.drift");
    }
    if (kind == ExperimentKind::vp_run || kind == ExperimentKind::vp_compare) {
      for (double e : epsilons) {
        vp.build(fields, e, VPMode::finite_eps, seed);
        vp.build(fields, e, VPMode::homogenized, seed);
      }
    }
    if (kind == ExperimentKind::diagnostics) {
      for (double t : diagnostics.times) {
        if (t > fields.horizon) throw ConfigError("diagnostics.times: times must be <= fields.horizon");
      }
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.kind == b.kind && a.seed == b.seed && a.output == b.output && a.variant == b.variant &&
         a.fields == b.fields && a.f0 == b.f0 && a.epsilons == b.epsilons &&
         a.integrator == b.integrator && a.quadrature == b.quadrature && a.tests == b.tests &&
         a.vp == b.vp && a.diagnostics == b.diagnostics;
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.msg, e.mark.line + 1, e.mark.column + 1, source);
  }
  ExperimentConfig c;
  if (!root || root.IsNull()) return c;
  try {
    Section s(root, "");
    if (auto n = s.take("experiment")) {
      try {
        c.kind = experiment_kind_from_string(as_string(n, "experiment"));
      } catch (const std::invalid_argument& e) {
        fail(n, std::string("experiment: ") + e.what());
      }
    }
    if (auto n = s.take("seed")) {
      const std::string text_value = as_string(n, "seed");
      if (text_value.empty() || text_value.find_first_not_of("0123456789") != std::string::npos) {
        fail(n, "seed: expected a non-negative integer, got '" + text_value + "'");
      }
      try {
        c.seed = n.as<std::uint64_t>();
      } catch (const YAML::Exception&) {
        fail(n, "seed: out of range");
      }
    }
    read(s, "output", c.output);
    if (auto n = s.take("variant")) {
      const std::string name = as_string(n, "variant");
      if (name == "magnetic_only") {
        c.variant = Variant::magnetic_only;
      } else if (name == "magnetic_plus_drift") {
        c.variant = Variant::magnetic_plus_drift;
      } else {
        fail(n, "variant: expected magnetic_only or magnetic_plus_drift, got '" + name + "'");
      }
    }
    if (auto n = s.take("fields")) parse_fields(n, c.fields);
    if (auto n = s.take("f0")) parse_f0(n, c.f0);
    YAML::Mark eps_mark = root.Mark();
    if (auto n = s.take("epsilons")) {
      if (!n.IsSequence()) fail(n, "epsilons: expected a list of numbers");
      eps_mark = n.Mark();
      c.epsilons.clear();
      for (const auto& e : n) c.epsilons.push_back(as_double(e, "epsilons"));
    }
    if (auto n = s.take("integrator")) parse_integrator(n, c.integrator);
    if (auto n = s.take("quadrature")) parse_quadrature(n, c.quadrature);
    if (auto n = s.take("tests")) {
      if (n.IsScalar() && n.Scalar() == "default") {
        c.tests.clear();
      } else if (n.IsSequence()) {
        for (std::size_t k = 0; k < n.size(); ++k) {
          c.tests.push_back(parse_test(n[k], "tests[" + std::to_string(k) + "]"));
        }
      } else {
        fail(n, "tests: expected 'default' or a list of test functions");
      }
    }
    if (auto n = s.take("vp")) parse_vp(n, c.vp);
    if (auto n = s.take("diagnostics")) parse_diagnostics(n, c.diagnostics);
    s.finish();
    at(eps_mark, [&] { c.validate(); });
  } catch (const ConfigError& e) {
    throw ConfigError(e.message(), e.line(), e.column(), source);
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open the file", 0, 0, path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path);
}

std::string serialize_config(const ExperimentConfig& c) {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  e << YAML::Key << "experiment" << YAML::Value << to_string(c.kind);
  e << YAML::Key << "seed" << YAML::Value << c.seed;
  e << YAML::Key << "output" << YAML::Value << YAML::DoubleQuoted << c.output;
  e << YAML::Key << "variant" << YAML::Value << variant_name(c.variant);

  e << YAML::Key << "fields" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "axis" << YAML::Value;
  emit_vec(e, c.fields.axis);
  e << YAML::Key << "drift" << YAML::Value;
  if (c.fields.drift) {
    emit_vec(e, *c.fields.drift);
  } else {
    e << YAML::Null;
  }
  e << YAML::Key << "horizon" << YAML::Value << c.fields.horizon;
  e << YAML::Key << "e_weak" << YAML::Value;
  emit_field(e, c.fields.e_weak);
  e << YAML::Key << "b_weak" << YAML::Value;
  emit_field(e, c.fields.b_weak);
  e << YAML::EndMap;

  const F0Section& f = c.f0;
  e << YAML::Key << "f0" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "family" << YAML::Value << f.family;
  e << YAML::Key << "mass" << YAML::Value << f.mass;
  e << YAML::Key << "sigmas" << YAML::Value << f.sigmas;
  auto vec = [&](const char* key, const Vec3& v) {
    e << YAML::Key << key << YAML::Value;
    emit_vec(e, v);
  };
  auto num = [&](const char* key, double v) { e << YAML::Key << key << YAML::Value << v; };
  if (f.family == "maxwellian") {
    vec("x_center", f.x_center);
    num("x_width", f.x_width);
    vec("v_drift", f.v_drift);
    num("v_width", f.v_width);
  } else if (f.family == "bi_maxwellian") {
    vec("x_center", f.x_center);
    num("x_width", f.x_width);
    vec("axis", f.axis);
    num("v_par_width", f.v_par_width);
    num("v_perp_width", f.v_perp_width);
    num("v_par_drift", f.v_par_drift);
  } else if (f.family == "perturbed_maxwellian") {
    vec("box", f.box);
    e << YAML::Key << "modes" << YAML::Value << YAML::Flow << YAML::BeginSeq << f.modes[0]
      << f.modes[1] << f.modes[2] << YAML::EndSeq;
    num("amplitude", f.amplitude);
    vec("v_drift", f.v_drift);
    num("v_width", f.v_width);
  } else if (f.family == "phase_ball") {
    vec("x_center", f.x_center);
    num("x_radius", f.x_radius);
    vec("v_center", f.v_center);
    num("v_radius", f.v_radius);
  }
  e << YAML::EndMap;

  e << YAML::Key << "epsilons" << YAML::Value << YAML::Flow << c.epsilons;

  e << YAML::Key << "integrator" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "scheme" << YAML::Value << scheme_name(c.integrator.scheme);
  e << YAML::Key << "steps_per_gyroperiod" << YAML::Value << c.integrator.steps_per_gyroperiod;
  e << YAML::Key << "velocity_bound" << YAML::Value << c.integrator.velocity_bound;
  e << YAML::EndMap;

  const QuadSpec& q = c.quadrature;
  e << YAML::Key << "quadrature" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "nodes_t" << YAML::Value << q.nodes_t;
  e << YAML::Key << "nodes_x" << YAML::Value << q.nodes_x;
  e << YAML::Key << "nodes_v" << YAML::Value << q.nodes_v;
  e << YAML::Key << "micro_t" << YAML::Value << q.micro_t;
  e << YAML::Key << "gyro_nodes" << YAML::Value << q.gyro_nodes;
  e << YAML::Key << "max_nodes_t" << YAML::Value << q.max_nodes_t;
  e << YAML::Key << "node_budget" << YAML::Value << q.node_budget;
  e << YAML::EndMap;

  e << YAML::Key << "tests" << YAML::Value;
  if (c.tests.empty()) {
    e << "default";
  } else {
    e << YAML::BeginSeq;
    for (const TestFunction& t : c.tests) {
      e << YAML::BeginMap;
      e << YAML::Key << "id" << YAML::Value << t.id;
      e << YAML::Key << "amplitude" << YAML::Value << t.amplitude;
      e << YAML::Key << "tau" << YAML::Value << to_string(t.tau);
      e << YAML::Key << "t" << YAML::Value;
      emit_bump(e, t.t);
      for (const char* key : {"x", "v"}) {
        const auto& bumps = key[0] == 'x' ? t.x : t.v;
        e << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (const Bump& b : bumps) emit_bump(e, b);
        e << YAML::EndSeq;
      }
      e << YAML::EndMap;
    }
    e << YAML::EndSeq;
  }

  const VPSection& v = c.vp;
  e << YAML::Key << "vp" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "mode" << YAML::Value << to_string(v.mode);
  e << YAML::Key << "cells" << YAML::Value << v.cells;
  e << YAML::Key << "box" << YAML::Value << v.box;
  e << YAML::Key << "particles" << YAML::Value << static_cast<unsigned long long>(v.particles);
  e << YAML::Key << "dt_macro" << YAML::Value << v.dt_macro;
  e << YAML::Key << "substeps" << YAML::Value << v.substeps;
  e << YAML::Key << "horizon" << YAML::Value << v.horizon;
  e << YAML::Key << "snapshot_every" << YAML::Value << v.snapshot_every;
  e << YAML::Key << "energy_tolerance" << YAML::Value << v.energy_tolerance;
  e << YAML::Key << "continuity_tolerance" << YAML::Value << v.continuity_tolerance;
  e << YAML::EndMap;

  const DiagnosticsSection& d = c.diagnostics;
  e << YAML::Key << "diagnostics" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "times" << YAML::Value << YAML::Flow << d.times;
  e << YAML::Key << "samples" << YAML::Value << d.samples;
  e << YAML::Key << "l2_tolerance" << YAML::Value << d.l2_tolerance;
  e << YAML::Key << "identity_tolerance" << YAML::Value << d.identity_tolerance;
  e << YAML::EndMap;

  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

}  // namespace ghl
