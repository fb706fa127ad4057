#include "bfm/controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "bfm/errors.hpp"

namespace bfm {

void Gains::validate() const {
  if (!(k_p > 0.0) || !std::isfinite(k_p))
    throw std::invalid_argument("k_p must be positive, got " + std::to_string(k_p));
  if (!(k_i >= 0.0) || !std::isfinite(k_i))
    throw std::invalid_argument("k_i must be non-negative, got " + std::to_string(k_i));
}

FollowerRate follower_velocity(const FormationGraph& graph, const BearingSpec& spec, int i,
                               const std::vector<NeighborMeasurement>& measurements,
                               const Eigen::Ref<const Vector>& xi_i, const Gains& gains) {
  gains.validate();
  if (i < 0 || i >= graph.agent_count()) throw std::invalid_argument("vertex out of range");
  if (graph.is_leader(i))
    throw std::invalid_argument("vertex " + std::to_string(i) + " is a leader");
  const int d = graph.dimension();
  if (xi_i.size() != d) throw DimensionMismatch("xi_i must have length d");

  const auto& expected = graph.neighbors(i);
  std::vector<int> got;
  got.reserve(measurements.size());
  for (const auto& m : measurements) got.push_back(m.neighbor);
  std::sort(got.begin(), got.end());
  if (got != expected)
    throw UnknownNeighbor("measurements for vertex " + std::to_string(i) +
                          " do not match its neighbor set");

  Vector s = Vector::Zero(d);
  for (const auto& m : measurements) {
    if (m.relative.size() != d) throw DimensionMismatch("relative position has wrong size");
    // P_g = P_{-g}, so the stored edge orientation does not matter here.
    s += orthogonal_projector(spec[graph.edge_index(i, m.neighbor)]) * m.relative;
  }
  return {-gains.k_p * s - gains.k_i * xi_i, s};
}

StateDerivative stacked_dynamics(const BearingLaplacian& laplacian,
                                 const Eigen::Ref<const Vector>& p,
                                 const Eigen::Ref<const Vector>& xi, const Gains& gains,
                                 const Eigen::Ref<const Vector>& v_leader) {
  const int d = laplacian.dimension();
  const Eigen::Index nl = static_cast<Eigen::Index>(d) * laplacian.leader_count();
  const Eigen::Index nf = static_cast<Eigen::Index>(d) * laplacian.follower_count();
  if (p.size() != nl + nf || xi.size() != nf || v_leader.size() != nl)
    throw DimensionMismatch("stacked state sizes do not match the Laplacian partition");

  StateDerivative out;
  out.xi_dot = laplacian.ff() * p.tail(nf) + laplacian.fl() * p.head(nl);
  out.p_dot.resize(nl + nf);
  out.p_dot.head(nl) = v_leader;
  out.p_dot.tail(nf) = -gains.k_p * out.xi_dot - gains.k_i * xi;
  return out;
}

Matrix closed_loop_matrix(const Eigen::Ref<const Matrix>& l_ff, const Gains& gains) {
  if (l_ff.rows() != l_ff.cols()) throw DimensionMismatch("L_ff must be square");
  const Eigen::Index m = l_ff.rows();
  Matrix a = Matrix::Zero(2 * m, 2 * m);
  a.topLeftCorner(m, m) = -gains.k_p * l_ff;
  a.topRightCorner(m, m) = -gains.k_i * Matrix::Identity(m, m);
  a.bottomLeftCorner(m, m) = l_ff;
  return a;
}

HurwitzReport verify_hurwitz(const Eigen::Ref<const Matrix>& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("matrix must be square");
  HurwitzReport report;
  if (a.rows() == 0) {
    report.is_hurwitz = true;
    report.max_real_part = -std::numeric_limits<double>::infinity();
    return report;
  }
  const Eigen::EigenSolver<Matrix> eig(a, false);
  if (eig.info() != Eigen::Success) throw EigenSolveFailure("eigenvalue iteration did not converge");
  const auto& values = eig.eigenvalues();
  report.spectrum.assign(values.data(), values.data() + values.size());
  std::sort(report.spectrum.begin(), report.spectrum.end(),
            [](const auto& x, const auto& y) {
              return x.real() != y.real() ? x.real() > y.real() : x.imag() > y.imag();
            });
  report.max_real_part = report.spectrum.front().real();
  report.is_hurwitz = report.max_real_part < -kHurwitzTol;
  return report;
}

HurwitzReport closed_loop_spectrum(const Eigen::Ref<const Matrix>& l_ff, const Gains& gains) {
  gains.validate();
  if (gains.k_i == 0.0) return verify_hurwitz(-gains.k_p * l_ff);
  return verify_hurwitz(closed_loop_matrix(l_ff, gains));
}

Vector steady_state_integral(const BearingLaplacian& laplacian,
                             const Eigen::Ref<const Vector>& v_leader, const Gains& gains) {
  if (!(gains.k_i > 0.0)) throw std::invalid_argument("steady-state integral needs k_i > 0");
  // TargetSolver returns -L_ff^{-1} L_fl v.
  return -TargetSolver(laplacian).solve(v_leader) / gains.k_i;
}

}  // namespace bfm
