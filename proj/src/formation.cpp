#include "bfm/formation.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "bfm/errors.hpp"

namespace bfm {

FormationGraph::FormationGraph(int agent_count, int dimension, int leader_count,
                               const std::vector<std::pair<int, int>>& edges)
    : n_(agent_count), d_(dimension), n_leaders_(leader_count) {
  if (d_ < 2) throw InvalidGraph("dimension must be at least 2");
  if (n_ < 1) throw InvalidGraph("graph needs at least one agent");
  if (n_leaders_ < 1 || n_leaders_ > n_)
    throw InvalidGraph("leader count must lie in [1, " + std::to_string(n_) + "]");

  neighbors_.resize(static_cast<std::size_t>(n_));
  std::set<std::pair<int, int>> seen;
  edges_.reserve(edges.size());
  for (const auto& [a, b] : edges) {
    if (a < 0 || a >= n_ || b < 0 || b >= n_)
      throw InvalidGraph("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                         ") references a missing vertex");
    if (a == b) throw InvalidGraph("self-loop on vertex " + std::to_string(a));
    const Edge e{std::min(a, b), std::max(a, b)};
    if (!seen.insert({e.tail, e.head}).second)
      throw InvalidGraph("duplicate edge (" + std::to_string(e.tail) + ", " +
                         std::to_string(e.head) + ")");
    edges_.push_back(e);
    neighbors_[static_cast<std::size_t>(e.tail)].push_back(e.head);
    neighbors_[static_cast<std::size_t>(e.head)].push_back(e.tail);
  }
  for (auto& list : neighbors_) std::sort(list.begin(), list.end());
}

int FormationGraph::edge_index(int a, int b) const {
  const Edge key{std::min(a, b), std::max(a, b)};
  const auto it = std::find(edges_.begin(), edges_.end(), key);
  return it == edges_.end() ? -1 : static_cast<int>(it - edges_.begin());
}

Configuration::Configuration(int dimension, Vector stacked)
    : d_(dimension), p_(std::move(stacked)) {
  if (d_ < 1) throw DimensionMismatch("configuration dimension must be positive");
  if (p_.size() % d_ != 0)
    throw DimensionMismatch("stacked length " + std::to_string(p_.size()) +
                            " is not a multiple of dimension " + std::to_string(d_));
}

Configuration Configuration::from_points(const std::vector<Vector>& points) {
  if (points.empty()) throw DimensionMismatch("configuration needs at least one point");
  const auto d = points.front().size();
  Vector p(d * static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != d) throw DimensionMismatch("points have mixed dimensions");
    p.segment(static_cast<Eigen::Index>(i) * d, d) = points[i];
  }
  return Configuration(static_cast<int>(d), std::move(p));
}

BearingSpec::BearingSpec(int dimension, std::vector<Vector> bearings)
    : d_(dimension), bearings_(std::move(bearings)) {
  for (std::size_t k = 0; k < bearings_.size(); ++k) {
    if (bearings_[k].size() != d_)
      throw DimensionMismatch("bearing " + std::to_string(k) + " has wrong dimension");
    if (std::abs(bearings_[k].norm() - 1.0) > kUnitBearingTol)
      throw DegenerateVector("bearing " + std::to_string(k) + " is not a unit vector",
                             static_cast<int>(k));
  }
}

BearingSpec BearingSpec::from_configuration(const FormationGraph& graph,
                                            const Configuration& config) {
  const Vector stacked = bearing_function(graph, config);
  const int d = graph.dimension();
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(graph.edge_count()));
  for (int k = 0; k < graph.edge_count(); ++k) out.emplace_back(stacked.segment(k * d, d));
  return BearingSpec(d, std::move(out));
}

Matrix orthogonal_projector(const Eigen::Ref<const Vector>& x) {
  const double norm = x.norm();
  if (!(norm > kCollocationEps)) throw DegenerateVector("projector of a zero vector");
  const Vector g = x / norm;
  return Matrix::Identity(x.size(), x.size()) - g * g.transpose();
}

Vector bearing(const Eigen::Ref<const Vector>& p_i, const Eigen::Ref<const Vector>& p_j) {
  if (p_i.size() != p_j.size()) throw DimensionMismatch("bearing endpoints differ in size");
  const Vector e = p_j - p_i;
  const double dist = e.norm();
  if (!(dist > kCollocationEps)) throw DegenerateVector("collocated agents");
  return e / dist;
}

void require_compatible(const FormationGraph& graph, const Configuration& config) {
  if (config.dimension() != graph.dimension() || config.agent_count() != graph.agent_count())
    throw DimensionMismatch("configuration has " + std::to_string(config.agent_count()) +
                            " agents in R^" + std::to_string(config.dimension()) +
                            ", graph expects " + std::to_string(graph.agent_count()) +
                            " in R^" + std::to_string(graph.dimension()));
}

Vector bearing_function(const FormationGraph& graph, const Configuration& config) {
  require_compatible(graph, config);
  const int d = graph.dimension();
  Vector out(static_cast<Eigen::Index>(graph.edge_count()) * d);
  for (int k = 0; k < graph.edge_count(); ++k) {
    const Edge& e = graph.edge(k);
    try {
      out.segment(k * d, d) = bearing(config.agent(e.tail), config.agent(e.head));
    } catch (const DegenerateVector&) {
      throw DegenerateVector("agents " + std::to_string(e.tail) + " and " +
                                 std::to_string(e.head) + " are collocated on edge " +
                                 std::to_string(k),
                             k);
    }
  }
  return out;
}

}  // namespace bfm
