#include "slicematch/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

constexpr int kConfigError = 1;
constexpr int kCheckFailed = 2;

void print_outcome(const slicematch::ExperimentOutcome& outcome) {
  for (const auto& f : outcome.files) std::cout << "wrote " << f.string() << '\n';
  std::cout << "wrote " << outcome.summary.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic slice-matching experiments and diagnostics"};
  app.set_version_flag("--version", std::string(SLICEMATCH_VERSION));
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> experiment, dims, alphas, out_dir;
  std::optional<std::int64_t> iterations;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;

  auto* run = app.add_subcommand("run", "Run an experiment grid from a config file");
  run->add_option("--config", config_path, "Config file (key = value lines)")->required();
  run->add_option("--experiment", experiment, "Override: experiment");
  run->add_option("--dims", dims, "Override: comma-separated dimensions");
  run->add_option("--alphas", alphas, "Override: comma-separated step exponents");
  run->add_option("--K", iterations, "Override: iterations");
  run->add_option("--seed", seed, "Override: master seed");
  run->add_option("--out", out_dir, "Override: output directory");
  run->add_option("--workers", workers, "Override: worker threads (0 = all cores)");

  auto* check = app.add_subcommand("check", "Run the diagnostics suite and report pass/fail per check");
  std::uint64_t check_seed = 0;
  check->add_option("--seed", check_seed, "Master seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kConfigError;
  }

  try {
    if (*run) {
      slicematch::ExperimentConfig cfg = slicematch::load_config(config_path);
      if (experiment) slicematch::set_config_value(cfg, "experiment", *experiment);
      if (dims) slicematch::set_config_value(cfg, "dims", *dims);
      if (alphas) slicematch::set_config_value(cfg, "alphas", *alphas);
      if (iterations) cfg.K = *iterations;
      if (seed) cfg.seed = *seed;
      if (out_dir) cfg.out_dir = *out_dir;
      if (workers) cfg.workers = *workers;
      cfg.validate();
      const auto outcome = slicematch::run_experiment(cfg);
      print_outcome(outcome);
      if (!outcome.checks_passed) {
        std::cerr << "one or more checks failed\n";
        return kCheckFailed;
      }
      return 0;
    }
    slicematch::SuiteSizes sizes;
    sizes.seed = check_seed;
    bool ok = true;
    for (const auto& r : slicematch::run_diagnostics_suite(sizes)) {
      std::cout << slicematch::format_report(r) << '\n';
      ok = ok && r.passed;
    }
    return ok ? 0 : kCheckFailed;
  } catch (const slicematch::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
}
