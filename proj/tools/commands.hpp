#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

namespace bfm::cli {

/// Process exit codes shared by every subcommand.
enum ExitCode : int {
  kSuccess = 0,
  kValidationFailure = 1,
  kInputError = 2,
};

struct RunOptions {
  std::filesystem::path out_dir = "out";
  std::optional<double> dt;
  int decimate = 1;
  bool force = false;
  std::optional<std::uint64_t> seed;
  bool dump_xi = false;
};

/// Rigidity and localizability report. Exit 0 iff the target formation is
/// infinitesimally bearing rigid with at least two leaders and L_ff > 0.
int cmd_check(const std::filesystem::path& scenario, const RunOptions& opts, std::ostream& out,
              std::ostream& err);

/// Simulates and writes trajectory.csv and summary.json (and xi.csv when
/// requested) into opts.out_dir.
int cmd_run(const std::filesystem::path& scenario, const RunOptions& opts, std::ostream& out,
            std::ostream& err);

/// Closed-loop spectrum as JSON on `out`.
int cmd_spectrum(const std::filesystem::path& scenario, const RunOptions& opts,
                 std::ostream& out, std::ostream& err);

/// Runs each scenario into opts.out_dir/<file stem>/ on a worker pool.
/// Returns the largest exit code of the individual runs.
int cmd_batch(const std::vector<std::filesystem::path>& scenarios, const RunOptions& opts,
              std::ostream& out, std::ostream& err, unsigned workers = 0);

/// Applies BMV_LOG (trace, debug, info, warn, error, off) to the logger.
void configure_logging();

}  // namespace bfm::cli
