#pragma once

#include <vector>

#include "bfm/formation.hpp"
#include "bfm/laplacian.hpp"

namespace bfm {

/// Relative tolerance on the common ratio alpha_i / |p*_i - c| across leaders.
inline constexpr double kAlphaRatioTol = 1e-9;

Vector centroid(const Configuration& config);

/// Root-mean-square distance of the agents to their centroid.
double scale(const Configuration& config);

/**
 * Constant leader velocities v*_i = v_c + alpha_i u_i, where u_i is the unit
 * direction from the target centroid to leader i at command time. The unit
 * directions stay valid while the target only translates and scales, so the
 * command is constant over a segment.
 */
struct ManeuverCommand {
  Vector v_c;
  std::vector<double> scale_alphas;  // one per leader, m/s
  std::vector<Vector> radial_units;  // one per leader; zero when alphas are all zero
  double ratio = 0.0;                // common alpha_i / |p*_i - c|, i.e. the rate k0
  Configuration reference_config;

  int leader_count() const noexcept { return static_cast<int>(scale_alphas.size()); }

  /// Stacked leader velocities, d * n_l long.
  Vector leader_velocities() const;

  /// Predicted centroid rate of the target formation (v_c).
  const Vector& centroid_rate() const noexcept { return v_c; }

  /// Predicted scale rate sgn(alpha) * sqrt(mean_i alpha_i^2), with alpha
  /// extended to every agent through the common ratio.
  double scale_rate() const;
};

/// Every leader moves at v_c.
Vector translation_command(const Eigen::Ref<const Vector>& v_c, int leader_count);

/// alpha_i = rate * |p*_i - c(p*)| for each leader; v_c = 0. `reference` is
/// the full target configuration at command time. Throws DegenerateVector
/// if rate != 0 and a leader sits on the centroid.
ManeuverCommand scaling_command(const Configuration& reference, int leader_count, double rate);

/// Superposition of translation and scaling.
ManeuverCommand combined_command(const Eigen::Ref<const Vector>& v_c,
                                 const Configuration& reference, int leader_count, double rate);

/// Builds a command from raw per-leader alphas. Throws InconsistentScaling
/// when the common-ratio or common-sign condition fails.
ManeuverCommand command_from_alphas(const Eigen::Ref<const Vector>& v_c,
                                    const Configuration& reference,
                                    const std::vector<double>& alphas);

/// Full target velocity [v_l; -L_ff^{-1} L_fl v_l].
Vector induced_velocity(const TargetSolver& solver, const Eigen::Ref<const Vector>& v_leader);

/// True iff |L v*| < 1e-8 (1 + |v*|), i.e. the commanded motion preserves
/// every desired bearing.
bool validate_command(const BearingLaplacian& laplacian, const Eigen::Ref<const Vector>& v_star);

}  // namespace bfm
