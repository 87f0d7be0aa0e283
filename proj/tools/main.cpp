#include "horolab/error.hpp"
#include "horolab/experiments.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace {

// Stable process contract.
enum Exit : int { pass = 0, verdict_fail = 1, config_error = 2, construction_error = 3, io_failure = 4 };

int exit_for(const horolab::Error& e) {
  switch (e.code()) {
    case horolab::ErrorCode::invalid_config: return config_error;
    case horolab::ErrorCode::io_error: return io_failure;
    default: return construction_error;
  }
}

const char* label(const horolab::Error& e) {
  switch (exit_for(e)) {
    case config_error: return "config error";
    case io_failure: return "i/o error";
    default: return "construction error";
  }
}

struct RunOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "horolab-out";
  int jobs = 0;
  bool no_plots = false;
};

int list_experiments() {
  for (const auto& e : horolab::experiment_catalog()) {
    std::printf("%-16s %s\n", e.id.c_str(), e.description.c_str());
  }
  return pass;
}

int validate(const RunOptions& opt) {
  auto config = horolab::load_config(opt.config);
  if (opt.seed) config.seed = *opt.seed;
  horolab::Lab lab(config, 1);
  const auto& group = lab.group();
  std::printf("%s: ok\n", opt.config.c_str());
  std::printf("  name        %s\n", config.name.c_str());
  std::printf("  config hash %s\n", horolab::config_hash(config).c_str());
  std::printf("  generators  %d in H^%d, ping-pong margin %.4g\n", group.rank(), config.dim,
              group.min_margin());
  std::printf("  experiments %zu\n", config.experiments.size());
  return pass;
}

int run(const RunOptions& opt) {
  auto config = horolab::load_config(opt.config);
  if (opt.seed) config.seed = *opt.seed;
  int jobs = opt.jobs;
  if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  horolab::Lab lab(config, jobs);
  std::cerr << "config " << config.name << " (" << horolab::config_hash(config) << "), seed " << config.seed << ", "
            << jobs << " job(s)\n";

  std::vector<horolab::ExperimentReport> reports;
  std::vector<std::string> failures;
  for (const auto& id : config.experiments) {
    std::cerr << "running " << id << " ..." << std::flush;
    horolab::ExperimentReport report;
    try {
      report = lab.run(id);
    } catch (const horolab::Error& e) {
      // A shared object that cannot be built sinks every experiment; anything
      // narrower is reported as this experiment failing and the suite goes on.
      if (exit_for(e) != construction_error || e.code() == horolab::ErrorCode::construction_failed) {
        std::cerr << '\n';
        throw;
      }
      report.id = id;
      report.config_hash = horolab::config_hash(config);
      report.seed = config.seed;
      report.verdicts.push_back({"completed", false, e.what()});
    }
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.1f s", report.seconds);
    std::cerr << ' ' << (report.passed() ? "pass" : "FAIL") << " (" << secs << ")\n";
    for (const auto& v : report.verdicts) {
      if (!v.pass) failures.push_back(id + "." + v.name + (v.detail.empty() ? "" : ": " + v.detail));
    }
    reports.push_back(std::move(report));
  }

  const auto paths = horolab::emit_outputs(opt.out, config, reports, {.plots = !opt.no_plots});
  for (const auto& p : paths) std::cout << p << '\n';

  if (!failures.empty()) {
    std::cerr << failures.size() << " failing check(s):\n";
    for (const auto& f : failures) std::cerr << "  " << f << '\n';
    return verdict_fail;
  }
  return pass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Horospherical equidistribution experiments on Schottky groups"};
  app.require_subcommand(1);
  RunOptions opt;

  auto* run_cmd = app.add_subcommand("run", "Run the experiments a config requests and write reports");
  run_cmd->add_option("config", opt.config, "Config file")->required();
  run_cmd->add_option("--seed", opt.seed, "Override the config seed");
  run_cmd->add_option("--out", opt.out, "Output directory")->capture_default_str();
  run_cmd->add_option("--jobs", opt.jobs, "Worker threads (0: one per core)")->check(CLI::NonNegativeNumber);
  run_cmd->add_flag("--no-plots", opt.no_plots, "Skip SVG plots");

  auto* list_cmd = app.add_subcommand("list-experiments", "List experiment ids");

  auto* validate_cmd = app.add_subcommand("validate", "Check a config and build its group without running anything");
  validate_cmd->add_option("config", opt.config, "Config file")->required();
  validate_cmd->add_option("--seed", opt.seed, "Override the config seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? pass : config_error;
  }

  try {
    if (*list_cmd) return list_experiments();
    if (*validate_cmd) return validate(opt);
    return run(opt);
  } catch (const horolab::Error& e) {
    std::cerr << label(e) << ": " << e.what() << '\n';
    return exit_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return construction_error;
  }
}
