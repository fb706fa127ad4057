#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

#include "bfm/sim.hpp"

namespace bfm {

using Json = nlohmann::json;

/**
 * Scenario file schema (JSON):
 *
 *   dimension            integer >= 2
 *   agents               [{id, role: "leader"|"follower", initial?: [..]}]
 *   reference_positions  {id: [..]} generating the desired bearings
 *   edges                [[id, id], ...]
 *   gains                {kp, ki}                (optional, default 1 / 0.5)
 *   schedule             [{t0, t1, vc: [..], scale_rate}]
 *   dt, duration, seed   (dt optional, default 1e-3; seed optional, default 0)
 *
 * Ids may be strings or integers. Leaders are renumbered first, in file
 * order. A leader without `initial` starts at its reference position; a
 * follower without `initial` starts at its target position plus seeded
 * uniform noise of 10% of the formation scale.
 *
 * Throws ParseError naming the offending field.
 */
Scenario parse_scenario(const Json& doc, std::optional<std::uint64_t> seed_override = {});

/// Reads and parses a scenario file. Throws IoError or ParseError.
Scenario load_scenario(const std::filesystem::path& path,
                       std::optional<std::uint64_t> seed_override = {});

/// Writes every field explicitly (including resolved initial positions), so
/// parse_scenario(scenario_to_json(s)) reproduces s exactly.
Json scenario_to_json(const Scenario& scenario);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Trajectory CSV: t, positions, bearing_error, tracking_error, centroid,
/// scale. Keeps every `decimate`-th row plus the final row.
void write_trajectory_csv(std::ostream& out, const Scenario& scenario, const Trajectory& traj,
                          int decimate = 1);

/// Per-step integral states, same row selection as the trajectory CSV.
void write_xi_csv(std::ostream& out, const Scenario& scenario, const Trajectory& traj,
                  int decimate = 1);

Json rigidity_to_json(const RigidityReport& report);
Json spectrum_to_json(const HurwitzReport& report, const Gains& gains);

/// Final errors, decay fit, closed-loop spectrum, rigidity and localizability.
Json summary_json(const SimContext& ctx, const Trajectory& traj);

}  // namespace bfm
