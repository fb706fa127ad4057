#include "bfm/laplacian.hpp"

#include <string>

#include "bfm/errors.hpp"

namespace bfm {

BearingLaplacian::BearingLaplacian(Matrix full, int dimension, int leader_count)
    : l_(std::move(full)), d_(dimension), n_l_(leader_count) {
  if (d_ < 1 || l_.rows() != l_.cols() || l_.rows() % d_ != 0)
    throw DimensionMismatch("bearing Laplacian must be square with d-sized blocks");
  const int n = static_cast<int>(l_.rows()) / d_;
  if (n_l_ < 0 || n_l_ > n) throw DimensionMismatch("leader count exceeds agent count");
  n_f_ = n - n_l_;
}

BearingLaplacian bearing_laplacian(const FormationGraph& graph, const BearingSpec& spec) {
  if (spec.size() != graph.edge_count())
    throw DimensionMismatch("bearing spec has " + std::to_string(spec.size()) +
                            " bearings for " + std::to_string(graph.edge_count()) + " edges");
  if (spec.dimension() != graph.dimension())
    throw DimensionMismatch("bearing spec dimension differs from graph dimension");

  const int d = graph.dimension();
  const int n = graph.agent_count();
  Matrix l = Matrix::Zero(static_cast<Eigen::Index>(d) * n, static_cast<Eigen::Index>(d) * n);
  for (int k = 0; k < graph.edge_count(); ++k) {
    const Edge& e = graph.edge(k);
    const Matrix proj = orthogonal_projector(spec[k]);
    l.block(e.tail * d, e.head * d, d, d) -= proj;
    l.block(e.head * d, e.tail * d, d, d) -= proj;
    l.block(e.tail * d, e.tail * d, d, d) += proj;
    l.block(e.head * d, e.head * d, d, d) += proj;
  }
  return BearingLaplacian(std::move(l), d, graph.leader_count());
}

Localizability check_localizable(const BearingLaplacian& laplacian) {
  Localizability out;
  if (laplacian.follower_count() == 0) {
    out.is_localizable = true;
    return out;
  }
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(Matrix(laplacian.ff()),
                                                  Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw EigenSolveFailure("L_ff eigen-solve failed");
  out.min_eigenvalue = eig.eigenvalues()(0);
  out.max_eigenvalue = eig.eigenvalues()(eig.eigenvalues().size() - 1);
  out.is_localizable = out.max_eigenvalue > 0.0 && out.min_eigenvalue > kPdTol * out.max_eigenvalue;
  return out;
}

TargetSolver::TargetSolver(const BearingLaplacian& laplacian)
    : l_fl_(laplacian.fl()), l_ff_(laplacian.ff()), loc_(check_localizable(laplacian)) {
  if (!loc_.is_localizable)
    throw NotLocalizable("L_ff is not positive definite (lambda_min = " +
                         std::to_string(loc_.min_eigenvalue) + ")");
  if (l_ff_.size() > 0) {
    llt_.compute(l_ff_);
    if (llt_.info() != Eigen::Success) throw NotLocalizable("Cholesky factorization of L_ff failed");
  }
}

Vector TargetSolver::solve(const Eigen::Ref<const Vector>& leader_stack) const {
  if (leader_stack.size() != l_fl_.cols())
    throw DimensionMismatch("leader stack has length " + std::to_string(leader_stack.size()) +
                            ", expected " + std::to_string(l_fl_.cols()));
  if (l_ff_.size() == 0) return Vector(0);
  const Vector rhs = -(l_fl_ * leader_stack);
  Vector x = llt_.solve(rhs);
  // One step of iterative refinement keeps the residual near machine precision
  // for poorly conditioned L_ff.
  x += llt_.solve(rhs - l_ff_ * x);
  const double residual = (l_ff_ * x - rhs).norm();
  if (!(residual < 1e-9 * (1.0 + leader_stack.norm())))
    throw NotLocalizable("target solve residual " + std::to_string(residual) + " too large");
  return x;
}

Vector TargetSolver::complete(const Eigen::Ref<const Vector>& leader_stack) const {
  Vector full(leader_stack.size() + l_ff_.rows());
  full << leader_stack, solve(leader_stack);
  return full;
}

Vector target_follower_positions(const BearingLaplacian& laplacian,
                                 const Eigen::Ref<const Vector>& leader_positions) {
  return TargetSolver(laplacian).solve(leader_positions);
}

}  // namespace bfm
