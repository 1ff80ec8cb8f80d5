// ghlab: run one experiment from a YAML configuration.
//
//   ghlab <linear-sweep|drift-demo|vp-run|vp-compare|diagnostics>
//         [--config FILE] [--out DIR] [--workers N] [--seed N] [--timing]
//   ghlab print-config [--config FILE]
//
// Exit codes: 0 success, 2 configuration error, 3 numerical gate failure,
// 1 anything else.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

#include "ghlab/config.hpp"
#include "ghlab/experiments.hpp"
#include "ghlab/parallel.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kGateFailure = 3;

struct Flags {
  std::string config;
  std::string out;
  int workers = 0;
  std::uint64_t seed = 0;
  bool has_seed = false;
  bool timing = false;
};

ghl::ExperimentConfig load(const Flags& flags, const std::string& kind) {
  ghl::ExperimentConfig c = flags.config.empty() ? ghl::ExperimentConfig{}
                                                 : ghl::load_config(flags.config);
  if (!kind.empty()) c.kind = ghl::experiment_kind_from_string(kind);
  if (flags.has_seed) c.seed = flags.seed;
  if (!flags.out.empty()) c.output = flags.out;
  try {
    c.validate();
  } catch (const ghl::ConfigError& e) {
    throw ghl::ConfigError(e.message(), e.line(), e.column(),
                           flags.config.empty() ? "<defaults>" : flags.config);
  }
  return c;
}

int run(const Flags& flags, const std::string& kind) {
  const ghl::ExperimentConfig config = load(flags, kind);
  ghl::set_worker_count(flags.workers);
  const ghl::ExperimentOutcome outcome =
      ghl::run_experiment(config, ghl::RunOptions{config.output, flags.timing});
  for (const std::string& f : outcome.files) std::cout << "wrote " << f << '\n';
  for (const ghl::GateResult& g : outcome.gates) {
    std::cout << (g.passed ? "PASS " : "FAIL ") << g.name << ": " << g.detail << '\n';
  }
  return outcome.passed() ? 0 : kGateFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strong-magnetic-field kinetic homogenization experiments"};
  app.require_subcommand(1);
  Flags flags;
  std::string chosen;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "YAML configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out, "output directory (overrides the config)");
    sub->add_option("--workers", flags.workers, "worker threads (0: all cores)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", flags.seed, "seed (overrides the config)");
    sub->add_flag("--timing", flags.timing, "write measured seconds into timing columns");
  };
  for (const char* name : {"linear-sweep", "drift-demo", "vp-run", "vp-compare", "diagnostics"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
    add_common(sub);
    sub->callback([&chosen, name] { chosen = name; });
  }
  CLI::App* print = app.add_subcommand("print-config", "print the effective configuration");
  print->add_option("--config", flags.config, "YAML configuration file")->check(CLI::ExistingFile);
  print->callback([&chosen] { chosen = "print-config"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }
  flags.has_seed = false;
  for (CLI::App* sub : app.get_subcommands()) {
    if (auto* opt = sub->get_option_no_throw("--seed"); opt && opt->count() > 0) {
      flags.has_seed = true;
    }
  }

  try {
    if (chosen == "print-config") {
      std::cout << ghl::serialize_config(load(flags, ""));
      return 0;
    }
    return run(flags, chosen);
  } catch (const ghl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
