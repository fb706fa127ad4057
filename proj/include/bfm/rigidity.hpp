#pragma once

#include <vector>

#include "bfm/formation.hpp"

namespace bfm {

/// Singular values at or below this fraction of the largest count as zero.
inline constexpr double kRankTol = 1e-9;

struct RigidityReport {
  int rank = 0;
  int required_rank = 0;  // d*n - d - 1
  bool is_infinitesimally_bearing_rigid = false;
  int null_space_dim = 0;
  std::vector<double> singular_values;  // descending
};

/// Analytic Jacobian of bearing_function: the block row of oriented edge
/// k = (i, j) holds -P_{g_k}/|e_k| in column block i and +P_{g_k}/|e_k| in j.
Matrix bearing_rigidity_matrix(const FormationGraph& graph, const Configuration& config);

RigidityReport rigidity_report(const FormationGraph& graph, const Configuration& config);

/// Orthonormalized trivial motions: d translations followed by the scaling
/// direction p - 1 (x) c. Throws DegenerateVector if every agent sits on the
/// centroid (no scaling direction exists).
std::vector<Vector> trivial_motion_basis(const Configuration& config);

/// Orthonormal basis (columns) of the numerical null space of R_B, using
/// the same rank threshold as rigidity_report.
Matrix numerical_null_space(const FormationGraph& graph, const Configuration& config);

/// Largest principal angle (radians) between the column spans of two
/// matrices with orthonormal columns. Returns pi/2 when dimensions differ.
double max_principal_angle(const Matrix& a, const Matrix& b);

}  // namespace bfm
