#include "bfm/rigidity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bfm/errors.hpp"

namespace bfm {

Matrix bearing_rigidity_matrix(const FormationGraph& graph, const Configuration& config) {
  require_compatible(graph, config);
  const int d = graph.dimension();
  Matrix rb = Matrix::Zero(static_cast<Eigen::Index>(graph.edge_count()) * d,
                           static_cast<Eigen::Index>(graph.agent_count()) * d);
  for (int k = 0; k < graph.edge_count(); ++k) {
    const Edge& e = graph.edge(k);
    const Vector edge_vec = config.agent(e.head) - config.agent(e.tail);
    const double len = edge_vec.norm();
    if (!(len > kCollocationEps))
      throw DegenerateVector("collocated agents on edge " + std::to_string(k), k);
    const Matrix block = orthogonal_projector(edge_vec) / len;
    rb.block(k * d, e.tail * d, d, d) = -block;
    rb.block(k * d, e.head * d, d, d) = block;
  }
  return rb;
}

namespace {

int numerical_rank(const Eigen::VectorXd& sv) {
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  const double cutoff = kRankTol * sv(0);
  return static_cast<int>((sv.array() > cutoff).count());
}

}  // namespace

RigidityReport rigidity_report(const FormationGraph& graph, const Configuration& config) {
  const Matrix rb = bearing_rigidity_matrix(graph, config);
  const Eigen::BDCSVD<Matrix> svd(rb);
  const Eigen::VectorXd& sv = svd.singularValues();

  RigidityReport report;
  const int d = graph.dimension();
  const int n = graph.agent_count();
  report.rank = numerical_rank(sv);
  report.required_rank = d * n - d - 1;
  report.is_infinitesimally_bearing_rigid = report.rank == report.required_rank;
  report.null_space_dim = d * n - report.rank;
  report.singular_values.assign(sv.data(), sv.data() + sv.size());
  return report;
}

std::vector<Vector> trivial_motion_basis(const Configuration& config) {
  const int d = config.dimension();
  const int n = config.agent_count();
  std::vector<Vector> basis;
  basis.reserve(static_cast<std::size_t>(d + 1));
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  for (int axis = 0; axis < d; ++axis) {
    Vector t = Vector::Zero(static_cast<Eigen::Index>(d) * n);
    for (int i = 0; i < n; ++i) t(i * d + axis) = inv_sqrt_n;
    basis.push_back(std::move(t));
  }

  Vector centroid = Vector::Zero(d);
  for (int i = 0; i < n; ++i) centroid += config.agent(i);
  centroid /= n;
  Vector s = config.stacked();
  for (int i = 0; i < n; ++i) s.segment(i * d, d) -= centroid;
  const double norm = s.norm();
  if (!(norm > kCollocationEps))
    throw DegenerateVector("all agents coincide with the centroid; no scaling motion");
  basis.push_back(s / norm);
  return basis;
}

Matrix numerical_null_space(const FormationGraph& graph, const Configuration& config) {
  const Matrix rb = bearing_rigidity_matrix(graph, config);
  // Full V is needed for the null-space columns; pad rows so that a wide
  // R_B (fewer edges than agents) still yields all dn right singular vectors.
  Matrix padded = Matrix::Zero(std::max(rb.rows(), rb.cols()), rb.cols());
  padded.topRows(rb.rows()) = rb;
  const Eigen::JacobiSVD<Matrix> svd(padded, Eigen::ComputeFullV);
  const int rank = numerical_rank(svd.singularValues());
  return svd.matrixV().rightCols(rb.cols() - rank);
}

double max_principal_angle(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return std::numbers::pi / 2;
  if (a.cols() == 0) return 0.0;
  // sin of the largest angle is the spectral norm of the part of a outside span(b).
  const Matrix residual = a - b * (b.transpose() * a);
  const Eigen::JacobiSVD<Matrix> svd(residual);
  const double s = std::clamp(svd.singularValues()(0), 0.0, 1.0);
  return std::asin(s);
}

}  // namespace bfm
