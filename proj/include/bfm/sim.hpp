#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bfm/controller.hpp"
#include "bfm/formation.hpp"
#include "bfm/laplacian.hpp"
#include "bfm/maneuver.hpp"
#include "bfm/rigidity.hpp"

namespace bfm {

inline constexpr double kDefaultDt = 1e-3;
/// Shrinking segments stop scaling before the target scale drops below this.
inline constexpr double kMinScale = 1e-3;
/// Relative slack when checking that schedule segments are contiguous.
inline constexpr double kScheduleTol = 1e-9;

/// One piece of a piecewise-constant leader schedule: translate at v_c and
/// scale at relative rate `scale_rate` (1/s, alpha_i = rate * |p*_i - c|).
struct SegmentSpec {
  double t_start = 0.0;
  double t_end = 0.0;
  Vector v_c;
  double scale_rate = 0.0;
};

struct Scenario {
  FormationGraph graph;
  Configuration reference_config;
  Configuration initial_config;
  Gains gains;
  std::vector<SegmentSpec> schedule;
  double dt = kDefaultDt;
  double duration = 0.0;
  std::uint64_t seed = 0;
  /// Agent names in internal order (leaders first). Optional.
  std::vector<std::string> labels;
};

/// A schedule segment resolved into constant leader velocities.
struct ResolvedSegment {
  double t_start = 0.0;
  double t_end = 0.0;
  Vector v_leader;
  double scale_rate = 0.0;           // k0 actually applied
  double predicted_scale_rate = 0.0; // target ds/dt
  Vector predicted_centroid_rate;    // target dc/dt
  bool clamped = false;              // scaling cut short by kMinScale
  int source = 0;                    // index into Scenario::schedule
};

struct AssembleOptions {
  /// Accept scenarios that fail rigidity or localizability checks.
  bool force = false;
};

struct SimContext {
  Scenario scenario;
  BearingSpec spec;
  BearingLaplacian laplacian;
  RigidityReport rigidity;
  Localizability localizability;
  std::optional<TargetSolver> solver;  // empty only when forced past NotLocalizable
  std::vector<ResolvedSegment> segments;
};

struct SimState {
  Vector p;
  Vector xi;
};

/// Validates the scenario and resolves the schedule. Throws ScheduleGap,
/// NotRigid, NotLocalizable (the last two suppressed by options.force).
SimContext assemble(const Scenario& scenario, AssembleOptions options = {});

/// Leader velocity stack active at time t (segments are [t_start, t_end)).
const ResolvedSegment& active_segment(const SimContext& ctx, double t);

/// One classical RK4 step of the closed loop with constant leader velocities.
SimState rk4_step(const SimContext& ctx, const SimState& state,
                  const Eigen::Ref<const Vector>& v_leader, double h);

/// RK4 step using the segment active at t.
SimState step(const SimContext& ctx, const SimState& state, double t, double dt);

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> positions;
  std::vector<Vector> xi;
  std::vector<double> bearing_error;
  std::vector<double> tracking_error;  // NaN when no target solver exists
  std::vector<Vector> centroid;
  std::vector<double> scale;
  /// Resolved segment driving the step that produced each sample; sample 0
  /// carries the first segment.
  std::vector<int> segment;

  std::size_t size() const noexcept { return times.size(); }
};

/// Integrates over [0, duration]. Steps never straddle a segment boundary.
Trajectory run(const SimContext& ctx);

/// Sum over edges of |g_ij - g*_ij|.
double bearing_error(const FormationGraph& graph, const BearingSpec& spec,
                     const Configuration& config);

struct ExponentialFit {
  double rate = 0.0;       // slope of log(value) vs t
  double intercept = 0.0;  // log(value) at t = 0
  double r_squared = 0.0;
  bool poor_fit = true;    // r_squared < 0.9 or non-decaying
};

/// Least-squares line through (t, log(value)). Throws WindowTooShort for
/// fewer than 3 samples and std::domain_error on non-positive values.
ExponentialFit exponential_fit(std::span<const double> times, std::span<const double> values);

/// Fits the tracking error over the final segment, keeping samples above
/// `floor`. Returns nullopt when too few samples remain.
std::optional<ExponentialFit> fit_final_segment(const SimContext& ctx, const Trajectory& traj,
                                                double floor = 1e-10);

/// Copy of `base` with every follower displaced by independent uniform
/// noise in [-f s, f s] per component, s = scale(base). Deterministic in seed.
Configuration perturb_followers(const Configuration& base, int leader_count, std::uint64_t seed,
                                double fraction = 0.1);

/// Target configuration for the given leader positions, passed through
/// perturb_followers.
Configuration perturbed_target(const TargetSolver& solver,
                               const Eigen::Ref<const Vector>& leader_positions, int dimension,
                               std::uint64_t seed, double fraction = 0.1);

}  // namespace bfm
