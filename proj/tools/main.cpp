#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace bfm::cli;
  configure_logging();

  CLI::App app{"Bearing-based formation maneuver simulator"};
  app.require_subcommand(1);

  RunOptions opts;
  std::string scenario;
  std::vector<std::string> batch_files;
  double dt = 0.0;
  std::uint64_t seed = 0;
  unsigned workers = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "Seed for default initial perturbations");
  };

  auto* check = app.add_subcommand("check", "Rigidity and localizability of the target formation");
  check->add_option("scenario", scenario, "Scenario JSON file")->required();
  add_common(check);

  auto* run = app.add_subcommand("run", "Simulate a scenario and write trajectory.csv + summary.json");
  run->add_option("scenario", scenario, "Scenario JSON file")->required();
  add_common(run);

  auto* spectrum = app.add_subcommand("spectrum", "Closed-loop eigenvalues as JSON");
  spectrum->add_option("scenario", scenario, "Scenario JSON file")->required();
  spectrum->add_flag("--force", opts.force, "Report even when L_ff is singular");
  add_common(spectrum);

  auto* batch = app.add_subcommand("batch", "Run several scenarios in parallel");
  batch->add_option("scenarios", batch_files, "Scenario JSON files")->required();
  batch->add_option("--workers", workers, "Worker threads (default: hardware concurrency)");
  add_common(batch);

  for (auto* sub : {run, batch}) {
    sub->add_option("--out", opts.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--dt", dt, "Override the integration step")->check(CLI::PositiveNumber);
    sub->add_option("--decimate", opts.decimate, "Keep every n-th CSV row")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_flag("--force", opts.force, "Run even if the target formation fails validation");
    sub->add_flag("--xi", opts.dump_xi, "Also write per-step integral states to xi.csv");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kInputError;
  }

  for (auto* sub : {check, run, spectrum, batch}) {
    if (sub->count("--seed")) opts.seed = seed;
  }
  if (run->count("--dt") || batch->count("--dt")) opts.dt = dt;

  if (*check) return cmd_check(scenario, opts, std::cout, std::cerr);
  if (*run) return cmd_run(scenario, opts, std::cout, std::cerr);
  if (*spectrum) return cmd_spectrum(scenario, opts, std::cout, std::cerr);
  std::vector<std::filesystem::path> paths(batch_files.begin(), batch_files.end());
  return cmd_batch(paths, opts, std::cout, std::cerr, workers);
}
