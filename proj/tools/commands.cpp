#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "bfm/errors.hpp"
#include "bfm/scenario_io.hpp"

namespace bfm::cli {

namespace fs = std::filesystem;

namespace {

/// Maps library exceptions onto the exit-code contract.
int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ParseError& ex) {
    err << "error: " << ex.what() << '\n';
    return kInputError;
  } catch (const IoError& ex) {
    err << "error: " << ex.what() << '\n';
    return kInputError;
  } catch (const ScheduleGap& ex) {
    err << "error: schedule: " << ex.what() << '\n';
    return kInputError;
  } catch (const DimensionMismatch& ex) {
    err << "error: " << ex.what() << '\n';
    return kInputError;
  } catch (const NotRigid& ex) {
    err << "rejected: " << ex.what() << " (use --force to override)\n";
    return kValidationFailure;
  } catch (const NotLocalizable& ex) {
    err << "rejected: " << ex.what() << " (use --force to override)\n";
    return kValidationFailure;
  } catch (const Error& ex) {
    err << "error: " << ex.what() << '\n';
    return kValidationFailure;
  } catch (const std::invalid_argument& ex) {
    err << "error: " << ex.what() << '\n';
    return kInputError;
  }
}

Scenario load_with_overrides(const fs::path& path, const RunOptions& opts) {
  spdlog::debug("loading scenario {}", path.string());
  Scenario sc = load_scenario(path, opts.seed);
  if (opts.dt) {
    if (!(*opts.dt > 0.0)) throw std::invalid_argument("--dt must be positive");
    sc.dt = *opts.dt;
  }
  return sc;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& fill) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write '" + path.string() + "'");
  fill(f);
  if (!f) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace

int cmd_check(const fs::path& scenario, const RunOptions& opts, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    const Scenario sc = load_with_overrides(scenario, opts);
    const auto& g = sc.graph;
    const RigidityReport rig = rigidity_report(g, sc.reference_config);
    const BearingLaplacian lap =
        bearing_laplacian(g, BearingSpec::from_configuration(g, sc.reference_config));
    const Localizability loc = check_localizable(lap);

    out << "agents: " << g.agent_count() << " (" << g.leader_count() << " leaders, "
        << g.follower_count() << " followers), dimension " << g.dimension() << ", edges "
        << g.edge_count() << '\n';
    out << "rank(R_B): " << rig.rank << " (required " << rig.required_rank << ")\n";
    out << "smallest singular value above threshold: ";
    if (rig.rank > 0)
      out << format_double(rig.singular_values[static_cast<std::size_t>(rig.rank - 1)]);
    else
      out << "none";
    out << '\n';
    out << "lambda_min(L_ff): "
        << (std::isfinite(loc.min_eigenvalue) ? format_double(loc.min_eigenvalue) : "inf") << '\n';

    const bool rigid = rig.is_infinitesimally_bearing_rigid;
    const bool localizable = loc.is_localizable && g.leader_count() >= 2;
    out << "verdict: " << (rigid ? "RIGID" : "NOT RIGID") << ", "
        << (localizable ? "LOCALIZABLE" : "NOT LOCALIZABLE") << '\n';
    return rigid && localizable ? kSuccess : kValidationFailure;
  });
}

int cmd_run(const fs::path& scenario, const RunOptions& opts, std::ostream& out,
            std::ostream& err) {
  return guarded(err, [&] {
    if (opts.decimate < 1) throw std::invalid_argument("--decimate must be >= 1");
    const Scenario sc = load_with_overrides(scenario, opts);
    const SimContext ctx = assemble(sc, {opts.force});
    spdlog::info("{}: {} segments, dt = {}, duration = {}", scenario.filename().string(),
                 ctx.segments.size(), sc.dt, sc.duration);
    for (const auto& seg : ctx.segments)
      if (seg.clamped)
        spdlog::warn("scaling in [{}, {}) clamped to keep scale above {}", seg.t_start,
                     seg.t_end, kMinScale);

    const Trajectory traj = run(ctx);

    std::error_code ec;
    fs::create_directories(opts.out_dir, ec);
    if (ec) throw IoError("cannot create '" + opts.out_dir.string() + "': " + ec.message());
    write_file(opts.out_dir / "trajectory.csv",
               [&](std::ostream& f) { write_trajectory_csv(f, sc, traj, opts.decimate); });
    write_file(opts.out_dir / "summary.json",
               [&](std::ostream& f) { f << summary_json(ctx, traj).dump(2) << '\n'; });
    if (opts.dump_xi)
      write_file(opts.out_dir / "xi.csv",
                 [&](std::ostream& f) { write_xi_csv(f, sc, traj, opts.decimate); });

    out << "final bearing_error: " << format_double(traj.bearing_error.back()) << '\n';
    out << "final tracking_error: " << format_double(traj.tracking_error.back()) << '\n';
    out << "wrote " << (opts.out_dir / "trajectory.csv").string() << '\n';
    return kSuccess;
  });
}

int cmd_spectrum(const fs::path& scenario, const RunOptions& opts, std::ostream& out,
                 std::ostream& err) {
  return guarded(err, [&] {
    const Scenario sc = load_with_overrides(scenario, opts);
    const BearingLaplacian lap = bearing_laplacian(
        sc.graph, BearingSpec::from_configuration(sc.graph, sc.reference_config));
    const Localizability loc = check_localizable(lap);
    if (!loc.is_localizable && !opts.force)
      throw NotLocalizable("L_ff is not positive definite (lambda_min = " +
                           format_double(loc.min_eigenvalue) + ")");
    const HurwitzReport report = closed_loop_spectrum(lap.ff(), sc.gains);
    out << spectrum_to_json(report, sc.gains).dump(2) << '\n';
    return kSuccess;
  });
}

int cmd_batch(const std::vector<fs::path>& scenarios, const RunOptions& opts, std::ostream& out,
              std::ostream& err, unsigned workers) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, scenarios.size())));

  struct Result {
    int code = kSuccess;
    std::string out;
    std::string err;
  };
  std::vector<Result> results(scenarios.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) {
      RunOptions local = opts;
      local.out_dir = opts.out_dir / scenarios[i].stem();
      std::ostringstream o;
      std::ostringstream e;
      results[i].code = cmd_run(scenarios[i], local, o, e);
      results[i].out = o.str();
      results[i].err = e.str();
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  pool.clear();

  int worst = kSuccess;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    out << "[" << scenarios[i].string() << "] exit " << results[i].code << '\n' << results[i].out;
    err << results[i].err;
    worst = std::max(worst, results[i].code);
  }
  return worst;
}

void configure_logging() {
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("BMV_LOG")) {
    const auto parsed = spdlog::level::from_str(level);
    // from_str maps unknown names to off; only honour recognised ones.
    if (parsed != spdlog::level::off || std::string(level) == "off") spdlog::set_level(parsed);
  }
}

}  // namespace bfm::cli
