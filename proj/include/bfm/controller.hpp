#pragma once

#include <complex>
#include <vector>

#include "bfm/formation.hpp"
#include "bfm/laplacian.hpp"

namespace bfm {

/// Absolute margin on the largest real part for a Hurwitz verdict.
inline constexpr double kHurwitzTol = 1e-10;

/// PI gains. k_i == 0 gives the proportional-only law.
struct Gains {
  double k_p = 1.0;
  double k_i = 0.5;

  /// Throws std::invalid_argument unless k_p > 0 and k_i >= 0.
  void validate() const;
};

/// Stacked follower integral states, d * n_f long. Starts at zero.
struct ControllerState {
  Vector xi;

  static ControllerState zero(int dimension, int follower_count) {
    return {Vector::Zero(static_cast<Eigen::Index>(dimension) * follower_count)};
  }
};

/// Relative position p_i - p_j of follower i with respect to neighbor j.
struct NeighborMeasurement {
  int neighbor;
  Vector relative;
};

struct FollowerRate {
  Vector velocity;
  Vector xi_rate;
};

/**
 * Per-follower PI law using only relative positions of its neighbors:
 *   s_i = sum_j P_{g*_ij} (p_i - p_j),  v_i = -k_p s_i - k_i xi_i,  xi_i' = s_i.
 *
 * Throws UnknownNeighbor if the measurements do not cover exactly the
 * neighbor set of vertex i, and std::invalid_argument if i is a leader.
 */
FollowerRate follower_velocity(const FormationGraph& graph, const BearingSpec& spec, int i,
                               const std::vector<NeighborMeasurement>& measurements,
                               const Eigen::Ref<const Vector>& xi_i, const Gains& gains);

struct StateDerivative {
  Vector p_dot;   // d * n, leaders then followers
  Vector xi_dot;  // d * n_f
};

/// Matrix form of the closed loop: leaders follow v_leader, followers run
/// the PI law. This is the right-hand side the integrator consumes.
StateDerivative stacked_dynamics(const BearingLaplacian& laplacian,
                                 const Eigen::Ref<const Vector>& p,
                                 const Eigen::Ref<const Vector>& xi, const Gains& gains,
                                 const Eigen::Ref<const Vector>& v_leader);

/// Error-dynamics state matrix [[-k_p L_ff, -k_i I], [L_ff, 0]], with the
/// identity sized d * n_f.
Matrix closed_loop_matrix(const Eigen::Ref<const Matrix>& l_ff, const Gains& gains);

struct HurwitzReport {
  bool is_hurwitz = false;
  double max_real_part = 0.0;
  std::vector<std::complex<double>> spectrum;  // sorted by descending real part
};

/// Dense non-symmetric eigen-solve. Throws EigenSolveFailure.
HurwitzReport verify_hurwitz(const Eigen::Ref<const Matrix>& a);

/// Spectrum of the loop that actually feeds back: A when k_i > 0, and the
/// proportional block -k_p L_ff when k_i == 0 (the integrator then decouples).
HurwitzReport closed_loop_spectrum(const Eigen::Ref<const Matrix>& l_ff, const Gains& gains);

/// Steady-state integral L_ff^{-1} L_fl v_leader / k_i for constant leader
/// velocities. Requires k_i > 0.
Vector steady_state_integral(const BearingLaplacian& laplacian,
                             const Eigen::Ref<const Vector>& v_leader, const Gains& gains);

}  // namespace bfm
