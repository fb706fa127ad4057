#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace bfm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Norm below which a vector is treated as zero (collocation threshold).
inline constexpr double kCollocationEps = 1e-12;

/// Tolerance on the norm of a supplied unit bearing.
inline constexpr double kUnitBearingTol = 1e-12;

struct Edge {
  int tail;
  int head;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/**
 * Undirected sensing graph with a leader/follower split.
 *
 * Vertices are 0-based internally. Leaders occupy indices [0, leader_count)
 * and followers the rest. Each undirected edge is stored once, oriented from
 * the smaller to the larger index, in the order it was supplied.
 */
class FormationGraph {
 public:
  /// Throws InvalidGraph on self-loops, duplicate undirected edges,
  /// out-of-range vertices, dimension < 2, or leader_count outside [1, n].
  FormationGraph(int agent_count, int dimension, int leader_count,
                 const std::vector<std::pair<int, int>>& edges);

  int agent_count() const noexcept { return n_; }
  int dimension() const noexcept { return d_; }
  int leader_count() const noexcept { return n_leaders_; }
  int follower_count() const noexcept { return n_ - n_leaders_; }
  int edge_count() const noexcept { return static_cast<int>(edges_.size()); }

  bool is_leader(int vertex) const noexcept { return vertex < n_leaders_; }

  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Edge& edge(int k) const { return edges_.at(static_cast<std::size_t>(k)); }

  /// Sorted neighbor list of a vertex.
  const std::vector<int>& neighbors(int vertex) const {
    return neighbors_.at(static_cast<std::size_t>(vertex));
  }

  /// Index of the edge joining a and b (either orientation), or -1.
  int edge_index(int a, int b) const;

 private:
  int n_;
  int d_;
  int n_leaders_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> neighbors_;
};

/// Stacked positions p = [p_1; ...; p_n] of n agents in R^d.
class Configuration {
 public:
  Configuration(int dimension, Vector stacked);

  /// Builds a configuration from per-agent points (all of the same size).
  static Configuration from_points(const std::vector<Vector>& points);

  int dimension() const noexcept { return d_; }
  int agent_count() const noexcept { return static_cast<int>(p_.size()) / d_; }

  const Vector& stacked() const noexcept { return p_; }

  auto agent(int i) const { return p_.segment(static_cast<Eigen::Index>(i) * d_, d_); }

  /// Stack of agents [first, first + count).
  Vector slice(int first, int count) const {
    return p_.segment(static_cast<Eigen::Index>(first) * d_,
                      static_cast<Eigen::Index>(count) * d_);
  }

 private:
  int d_;
  Vector p_;
};

/// Desired unit bearings, one per oriented edge in graph edge order.
class BearingSpec {
 public:
  /// Throws DegenerateVector if a bearing is not unit length within
  /// kUnitBearingTol and DimensionMismatch on wrong sizes.
  BearingSpec(int dimension, std::vector<Vector> bearings);

  /// Bearings realized by a configuration (the preferred way to get a
  /// consistent spec).
  static BearingSpec from_configuration(const FormationGraph& graph,
                                        const Configuration& config);

  int dimension() const noexcept { return d_; }
  int size() const noexcept { return static_cast<int>(bearings_.size()); }
  const Vector& operator[](int k) const { return bearings_[static_cast<std::size_t>(k)]; }
  const std::vector<Vector>& bearings() const noexcept { return bearings_; }

 private:
  int d_;
  std::vector<Vector> bearings_;
};

/// P_x = I - x x^T / |x|^2. Throws DegenerateVector if |x| <= kCollocationEps.
Matrix orthogonal_projector(const Eigen::Ref<const Vector>& x);

/// Unit vector from p_i toward p_j. Throws DegenerateVector on collocation.
Vector bearing(const Eigen::Ref<const Vector>& p_i, const Eigen::Ref<const Vector>& p_j);

/// Stacked bearings [g_1; ...; g_m] in graph edge order.
Vector bearing_function(const FormationGraph& graph, const Configuration& config);

/// Throws DimensionMismatch unless config matches the graph's n and d.
void require_compatible(const FormationGraph& graph, const Configuration& config);

}  // namespace bfm
