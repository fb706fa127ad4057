#include "bfm/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "bfm/errors.hpp"

namespace bfm {

namespace {

void check_schedule(const Scenario& sc) {
  if (!(sc.dt > 0.0) || !std::isfinite(sc.dt)) throw std::invalid_argument("dt must be positive");
  if (!(sc.duration > 0.0) || !std::isfinite(sc.duration))
    throw std::invalid_argument("duration must be positive");
  if (sc.schedule.empty()) throw ScheduleGap("schedule is empty");

  const double tol = kScheduleTol * std::max(1.0, sc.duration);
  double cursor = 0.0;
  for (std::size_t k = 0; k < sc.schedule.size(); ++k) {
    const auto& seg = sc.schedule[k];
    if (!(seg.t_end > seg.t_start))
      throw ScheduleGap("segment " + std::to_string(k) + " has t_end <= t_start");
    if (std::abs(seg.t_start - cursor) > tol)
      throw ScheduleGap("schedule " + std::string(seg.t_start > cursor ? "gap" : "overlap") +
                        " at t = " + std::to_string(cursor) + " (segment " + std::to_string(k) +
                        " starts at " + std::to_string(seg.t_start) + ")");
    if (seg.v_c.size() != sc.graph.dimension())
      throw DimensionMismatch("segment " + std::to_string(k) + " velocity has wrong dimension");
    if (!std::isfinite(seg.scale_rate))
      throw std::invalid_argument("segment " + std::to_string(k) + " scale rate is not finite");
    cursor = seg.t_end;
    if (cursor >= sc.duration - tol) return;
  }
  throw ScheduleGap("schedule ends at t = " + std::to_string(cursor) + " before duration " +
                    std::to_string(sc.duration));
}

std::vector<ResolvedSegment> resolve_schedule(const Scenario& sc,
                                              const std::optional<TargetSolver>& solver) {
  const int d = sc.graph.dimension();
  const int nl = sc.graph.leader_count();
  const double tol = kScheduleTol * std::max(1.0, sc.duration);
  Vector leaders = sc.initial_config.slice(0, nl);

  std::vector<ResolvedSegment> out;
  for (std::size_t k = 0; k < sc.schedule.size(); ++k) {
    const auto& seg = sc.schedule[k];
    const double t0 = out.empty() ? 0.0 : out.back().t_end;
    const double t1 = seg.t_end >= sc.duration - tol ? sc.duration : seg.t_end;

    auto push = [&](double a, double b, const ManeuverCommand& cmd, bool clamped) {
      ResolvedSegment r;
      r.t_start = a;
      r.t_end = b;
      r.v_leader = cmd.leader_velocities();
      r.scale_rate = cmd.ratio;
      r.predicted_scale_rate = cmd.scale_rate();
      r.predicted_centroid_rate = cmd.v_c;
      r.clamped = clamped;
      r.source = static_cast<int>(k);
      leaders += r.v_leader * (b - a);
      out.push_back(std::move(r));
    };

    if (seg.scale_rate == 0.0) {
      // Pure translation needs no target configuration.
      push(t0, t1,
           ManeuverCommand{seg.v_c, std::vector<double>(static_cast<std::size_t>(nl), 0.0),
                           std::vector<Vector>(static_cast<std::size_t>(nl), Vector::Zero(d)),
                           0.0, Configuration(d, leaders)},
           false);
    } else {
      if (!solver)
        throw NotLocalizable("scaling segment " + std::to_string(k) +
                             " needs a localizable target formation");
      const Configuration target(d, solver->complete(leaders));
      const ManeuverCommand cmd = combined_command(seg.v_c, target, nl, seg.scale_rate);
      const double s0 = scale(target);
      double t_stop = t1;
      if (seg.scale_rate < 0.0) {
        const double sdot = cmd.scale_rate();
        t_stop = std::min(t1, t0 + std::max(0.0, s0 - kMinScale) / -sdot);
      }
      if (t_stop > t0) push(t0, t_stop, cmd, t_stop < t1);
      if (t_stop < t1) {
        const Configuration now(d, solver->complete(leaders));
        push(t_stop, t1, combined_command(seg.v_c, now, nl, 0.0), true);
      }
    }
    if (t1 >= sc.duration) break;
  }
  return out;
}

}  // namespace

SimContext assemble(const Scenario& scenario, AssembleOptions options) {
  require_compatible(scenario.graph, scenario.reference_config);
  require_compatible(scenario.graph, scenario.initial_config);
  scenario.gains.validate();
  check_schedule(scenario);

  BearingSpec spec = BearingSpec::from_configuration(scenario.graph, scenario.reference_config);
  BearingLaplacian laplacian = bearing_laplacian(scenario.graph, spec);
  RigidityReport rigidity = rigidity_report(scenario.graph, scenario.reference_config);
  Localizability loc = check_localizable(laplacian);

  if (!options.force) {
    if (!rigidity.is_infinitesimally_bearing_rigid)
      throw NotRigid("target formation is not infinitesimally bearing rigid (rank " +
                     std::to_string(rigidity.rank) + ", need " +
                     std::to_string(rigidity.required_rank) + ")");
    if (scenario.graph.leader_count() < 2)
      throw NotLocalizable("at least two leaders are required");
    if (!loc.is_localizable)
      throw NotLocalizable("L_ff is not positive definite (lambda_min = " +
                           std::to_string(loc.min_eigenvalue) + ")");
  }

  std::optional<TargetSolver> solver;
  if (loc.is_localizable) solver.emplace(laplacian);

  auto segments = resolve_schedule(scenario, solver);
  return SimContext{scenario,         std::move(spec), std::move(laplacian), std::move(rigidity),
                    loc,              std::move(solver), std::move(segments)};
}

const ResolvedSegment& active_segment(const SimContext& ctx, double t) {
  for (const auto& seg : ctx.segments)
    if (t < seg.t_end) return seg;
  return ctx.segments.back();
}

SimState rk4_step(const SimContext& ctx, const SimState& state,
                  const Eigen::Ref<const Vector>& v_leader, double h) {
  const auto& L = ctx.laplacian;
  const auto& g = ctx.scenario.gains;
  const auto k1 = stacked_dynamics(L, state.p, state.xi, g, v_leader);
  const auto k2 = stacked_dynamics(L, state.p + 0.5 * h * k1.p_dot,
                                   state.xi + 0.5 * h * k1.xi_dot, g, v_leader);
  const auto k3 = stacked_dynamics(L, state.p + 0.5 * h * k2.p_dot,
                                   state.xi + 0.5 * h * k2.xi_dot, g, v_leader);
  const auto k4 = stacked_dynamics(L, state.p + h * k3.p_dot, state.xi + h * k3.xi_dot, g,
                                   v_leader);
  SimState next;
  next.p = state.p + (h / 6.0) * (k1.p_dot + 2.0 * k2.p_dot + 2.0 * k3.p_dot + k4.p_dot);
  next.xi = state.xi + (h / 6.0) * (k1.xi_dot + 2.0 * k2.xi_dot + 2.0 * k3.xi_dot + k4.xi_dot);
  return next;
}

SimState step(const SimContext& ctx, const SimState& state, double t, double dt) {
  return rk4_step(ctx, state, active_segment(ctx, t).v_leader, dt);
}

double bearing_error(const FormationGraph& graph, const BearingSpec& spec,
                     const Configuration& config) {
  const Vector f = bearing_function(graph, config);
  const int d = graph.dimension();
  double total = 0.0;
  for (int k = 0; k < graph.edge_count(); ++k) total += (f.segment(k * d, d) - spec[k]).norm();
  return total;
}

Trajectory run(const SimContext& ctx) {
  const auto& sc = ctx.scenario;
  const int d = sc.graph.dimension();
  const int nl = sc.graph.leader_count();
  const int nf = sc.graph.follower_count();

  std::size_t expected = 1;
  for (const auto& seg : ctx.segments)
    expected += static_cast<std::size_t>(std::ceil((seg.t_end - seg.t_start) / sc.dt)) + 1;

  Trajectory traj;
  traj.times.reserve(expected);
  traj.positions.reserve(expected);
  traj.xi.reserve(expected);
  traj.bearing_error.reserve(expected);
  traj.tracking_error.reserve(expected);
  traj.centroid.reserve(expected);
  traj.scale.reserve(expected);
  traj.segment.reserve(expected);

  auto record = [&](double t, const SimState& s, int seg) {
    const Configuration config(d, s.p);
    traj.times.push_back(t);
    traj.positions.push_back(s.p);
    traj.xi.push_back(s.xi);
    traj.bearing_error.push_back(bearing_error(sc.graph, ctx.spec, config));
    double tracking = std::numeric_limits<double>::quiet_NaN();
    if (ctx.solver) {
      tracking = nf == 0 ? 0.0
                         : (s.p.tail(static_cast<Eigen::Index>(d) * nf) -
                            ctx.solver->solve(s.p.head(static_cast<Eigen::Index>(d) * nl)))
                               .norm();
    }
    traj.tracking_error.push_back(tracking);
    traj.centroid.push_back(centroid(config));
    traj.scale.push_back(scale(config));
    traj.segment.push_back(seg);
  };

  SimState state{sc.initial_config.stacked(), ControllerState::zero(d, nf).xi};
  record(0.0, state, 0);

  for (std::size_t s = 0; s < ctx.segments.size(); ++s) {
    const auto& seg = ctx.segments[s];
    const double span = seg.t_end - seg.t_start;
    // Shorten the last step so the segment ends exactly on t_end.
    const auto steps = std::max<long long>(
        1, static_cast<long long>(std::ceil(span / sc.dt * (1.0 - 1e-12))));
    double t = seg.t_start;
    for (long long k = 1; k <= steps; ++k) {
      const double t_next = k == steps ? seg.t_end : seg.t_start + static_cast<double>(k) * sc.dt;
      state = rk4_step(ctx, state, seg.v_leader, t_next - t);
      t = t_next;
      record(t, state, static_cast<int>(s));
    }
  }
  return traj;
}

ExponentialFit exponential_fit(std::span<const double> times, std::span<const double> values) {
  if (times.size() != values.size()) throw DimensionMismatch("times and values differ in length");
  if (times.size() < 3) throw WindowTooShort("exponential fit needs at least 3 samples");

  const auto n = static_cast<double>(times.size());
  double mt = 0.0;
  double my = 0.0;
  std::vector<double> logs(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0)) throw std::domain_error("exponential fit needs positive samples");
    logs[i] = std::log(values[i]);
    mt += times[i];
    my += logs[i];
  }
  mt /= n;
  my /= n;
  double stt = 0.0;
  double sty = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    stt += (times[i] - mt) * (times[i] - mt);
    sty += (times[i] - mt) * (logs[i] - my);
    syy += (logs[i] - my) * (logs[i] - my);
  }
  if (!(stt > 0.0)) throw WindowTooShort("exponential fit needs distinct sample times");

  ExponentialFit fit;
  fit.rate = sty / stt;
  fit.intercept = my - fit.rate * mt;
  fit.r_squared = syy > 0.0 ? (sty * sty) / (stt * syy) : 0.0;
  fit.poor_fit = fit.r_squared < 0.9 || !(fit.rate < 0.0);
  return fit;
}

std::optional<ExponentialFit> fit_final_segment(const SimContext& ctx, const Trajectory& traj,
                                                double floor) {
  if (ctx.segments.empty() || traj.size() == 0) return std::nullopt;
  const int last = static_cast<int>(ctx.segments.size()) - 1;
  std::vector<double> t;
  std::vector<double> y;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (traj.segment[i] != last || i == 0) continue;
    const double e = traj.tracking_error[i];
    if (std::isfinite(e) && e > floor) {
      t.push_back(traj.times[i]);
      y.push_back(e);
    }
  }
  if (t.size() < 10) return std::nullopt;
  return exponential_fit(t, y);
}

Configuration perturb_followers(const Configuration& base, int leader_count, std::uint64_t seed,
                                double fraction) {
  const double amplitude = fraction * scale(base);
  std::mt19937_64 rng(seed);
  Vector p = base.stacked();
  // Raw 53-bit draws keep the noise identical across standard libraries.
  for (Eigen::Index i = static_cast<Eigen::Index>(base.dimension()) * leader_count; i < p.size();
       ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    p(i) += amplitude * (2.0 * u - 1.0);
  }
  return Configuration(base.dimension(), std::move(p));
}

Configuration perturbed_target(const TargetSolver& solver,
                               const Eigen::Ref<const Vector>& leader_positions, int dimension,
                               std::uint64_t seed, double fraction) {
  const Configuration target(dimension, solver.complete(leader_positions));
  return perturb_followers(target, static_cast<int>(leader_positions.size()) / dimension, seed,
                           fraction);
}

}  // namespace bfm
