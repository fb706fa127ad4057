#pragma once

#include <limits>

#include "bfm/formation.hpp"

namespace bfm {

/// L_ff counts as positive definite when lambda_min > kPdTol * lambda_max.
inline constexpr double kPdTol = 1e-9;

/**
 * Matrix-weighted graph Laplacian with projector weights P_{g*_ij}.
 *
 * Block (i, j) is -P_{g*_ij} for neighbors, block (i, i) is the sum of the
 * incident projectors. Rows and columns are ordered leaders first, so the
 * leader/follower partition is a plain 2x2 block split.
 */
class BearingLaplacian {
 public:
  BearingLaplacian(Matrix full, int dimension, int leader_count);

  int dimension() const noexcept { return d_; }
  int leader_count() const noexcept { return n_l_; }
  int follower_count() const noexcept { return n_f_; }

  const Matrix& full() const noexcept { return l_; }

  auto ll() const { return l_.topLeftCorner(d_ * n_l_, d_ * n_l_); }
  auto lf() const { return l_.topRightCorner(d_ * n_l_, d_ * n_f_); }
  auto fl() const { return l_.bottomLeftCorner(d_ * n_f_, d_ * n_l_); }
  auto ff() const { return l_.bottomRightCorner(d_ * n_f_, d_ * n_f_); }

 private:
  Matrix l_;
  int d_;
  int n_l_;
  int n_f_;
};

/// Throws DimensionMismatch if the spec is not aligned with the graph edges.
BearingLaplacian bearing_laplacian(const FormationGraph& graph, const BearingSpec& spec);

struct Localizability {
  bool is_localizable = false;
  /// Smallest eigenvalue of L_ff; +infinity when there are no followers.
  double min_eigenvalue = std::numeric_limits<double>::infinity();
  double max_eigenvalue = 0.0;
};

Localizability check_localizable(const BearingLaplacian& laplacian);

/**
 * Cached Cholesky factorization of L_ff for repeated target solves.
 *
 * Construction runs the localizability test once and throws NotLocalizable
 * when it fails. solve() returns x with L_ff x = -L_fl rhs, which gives the
 * target follower positions for a leader stack, and equally the induced
 * follower velocities for a leader velocity stack.
 */
class TargetSolver {
 public:
  explicit TargetSolver(const BearingLaplacian& laplacian);

  Vector solve(const Eigen::Ref<const Vector>& leader_stack) const;

  /// Leader stack followed by the solved follower stack.
  Vector complete(const Eigen::Ref<const Vector>& leader_stack) const;

  const Localizability& localizability() const noexcept { return loc_; }

 private:
  Matrix l_fl_;
  Matrix l_ff_;
  Eigen::LLT<Matrix> llt_;
  Localizability loc_;
};

/// One-shot form of TargetSolver::solve. Throws NotLocalizable.
Vector target_follower_positions(const BearingLaplacian& laplacian,
                                 const Eigen::Ref<const Vector>& leader_positions);

}  // namespace bfm
