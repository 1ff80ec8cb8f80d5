#pragma once

// Experiment orchestration behind the CLI subcommands. Each run writes CSV
// files into the output directory and reports whether its numerical gates
// held.

#include <string>
#include <vector>

#include "ghlab/config.hpp"

namespace ghl {

struct RunOptions {
  std::string out_dir;
  /// Write measured wall-clock seconds; otherwise timing columns hold 0 so the
  /// files are reproducible byte for byte.
  bool timing = false;
};

struct GateResult {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct ExperimentOutcome {
  std::vector<std::string> files;
  std::vector<GateResult> gates;
  bool passed() const;
};

ExperimentOutcome run_experiment(const ExperimentConfig& config, const RunOptions& options);

ExperimentOutcome run_linear_sweep(const ExperimentConfig& config, const RunOptions& options);
ExperimentOutcome run_drift_demo(const ExperimentConfig& config, const RunOptions& options);
ExperimentOutcome run_vp_single(const ExperimentConfig& config, const RunOptions& options);
ExperimentOutcome run_vp_comparison(const ExperimentConfig& config, const RunOptions& options);
ExperimentOutcome run_diagnostics(const ExperimentConfig& config, const RunOptions& options);

/// One point of a long-form plot table.
struct PlotPoint {
  double x = 0.0;
  double y = 0.0;
  std::string series;
};

/// CSV with header x,y,series; rows in the given order.
void write_plotdata(const std::string& path, const std::vector<PlotPoint>& points);

/// abs_error against epsilon, one series per test id.
std::vector<PlotPoint> sweep_plotdata(const std::vector<PairingResult>& rows);

/// Kinetic, field and total energy against t.
std::vector<PlotPoint> energy_plotdata(const std::vector<StepRecord>& steps);

/// Rows of a gate summary: gate, passed, detail.
void write_gate_summary(const std::string& path, const std::vector<GateResult>& gates);

}  // namespace ghl
