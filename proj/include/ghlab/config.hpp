#pragma once

// Experiment configuration: a YAML file with nested sections. Every key is
// optional and falls back to the defaults below; unknown keys are errors.
// Module invariants are checked at load time and reported with the line and
// column of the offending entry.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ghlab/characteristics.hpp"
#include "ghlab/distributions.hpp"
#include "ghlab/fields.hpp"
#include "ghlab/linear_solver.hpp"
#include "ghlab/twoscale.hpp"
#include "ghlab/vp_sim.hpp"

namespace ghl {

enum class ExperimentKind { linear_sweep, drift_demo, vp_run, vp_compare, diagnostics };
std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

/// Configuration errors; `line` and `column` are 1-based, 0 when unknown.
/// what() reads "source:line:column: message".
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& message, int line = 0, int column = 0,
                       const std::string& source = "");
  const std::string& message() const { return message_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  std::string message_;
  int line_;
  int column_;
};

struct FieldsSection {
  Vec3 axis = e1;
  std::optional<Vec3> drift;
  double horizon = 3.0;
  FieldSpec e_weak;
  FieldSpec b_weak;

  FieldConfig build(double epsilon) const;
  friend bool operator==(const FieldsSection&, const FieldsSection&) = default;
};

/// Named initial-data family with its parameters. Only the keys of the chosen
/// family are accepted in the file.
struct F0Section {
  std::string family = "maxwellian";  // maxwellian | bi_maxwellian | perturbed_maxwellian | phase_ball
  Vec3 x_center{};
  double x_width = 0.5;
  Vec3 v_drift{0.3, 0.6, 0.0};
  double v_width = 0.5;
  double mass = 1.0;
  double sigmas = 6.0;
  // bi_maxwellian
  Vec3 axis = e1;
  double v_par_width = 0.5;
  double v_perp_width = 0.5;
  double v_par_drift = 0.0;
  // perturbed_maxwellian
  Vec3 box{1.0, 1.0, 1.0};
  std::array<int, 3> modes{1, 1, 0};
  double amplitude = 0.2;
  // phase_ball
  double x_radius = 0.5;
  Vec3 v_center{};
  double v_radius = 0.5;

  VelocityFunction build() const;
  friend bool operator==(const F0Section&, const F0Section&) = default;
};

struct IntegratorSection {
  Scheme scheme = Scheme::exact_split;
  /// dt = 2 pi eps / steps_per_gyroperiod.
  int steps_per_gyroperiod = 64;
  double velocity_bound = 1e6;

  IntegratorSettings build(double epsilon) const;
  friend bool operator==(const IntegratorSection&, const IntegratorSection&) = default;
};

struct VPSection {
  /// Mode of vp-run; vp-compare always runs both.
  VPMode mode = VPMode::finite_eps;
  int cells = 16;
  double box = 1.0;
  std::size_t particles = 100000;
  double dt_macro = 0.02;
  int substeps = 2;
  double horizon = 1.0;
  /// Grid snapshots every this many macro steps (0: none).
  int snapshot_every = 0;
  double energy_tolerance = 0.01;
  double continuity_tolerance = 1e-3;

  VPRunConfig build(const FieldsSection& fields, double epsilon, VPMode mode,
                    std::uint64_t seed) const;
  friend bool operator==(const VPSection&, const VPSection&) = default;
};

struct DiagnosticsSection {
  std::vector<double> times{0.0, 0.5, 1.0};
  int samples = 1000;
  double l2_tolerance = 1e-6;
  double identity_tolerance = 1e-5;

  friend bool operator==(const DiagnosticsSection&, const DiagnosticsSection&) = default;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::linear_sweep;
  std::uint64_t seed = 1;
  std::string output = "out";
  Variant variant = Variant::magnetic_only;
  FieldsSection fields;
  F0Section f0;
  std::vector<double> epsilons{0.2, 0.1, 0.05, 0.025};
  IntegratorSection integrator;
  QuadSpec quadrature;
  /// Empty: the default suite for the field horizon.
  std::vector<TestFunction> tests;
  VPSection vp;
  DiagnosticsSection diagnostics;

  std::vector<TestFunction> test_suite() const;
  LinearProblem linear_problem(double epsilon) const;

  /// Cross-section checks; throws ConfigError without position.
  void validate() const;
};

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

/// Parses YAML text; `source` names the input in error messages.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

/// YAML text with every field written out; parse_config(serialize) == config.
std::string serialize_config(const ExperimentConfig& config);

}  // namespace ghl
