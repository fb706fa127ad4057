#include "bfm/maneuver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bfm/errors.hpp"

namespace bfm {

Vector centroid(const Configuration& config) {
  const int n = config.agent_count();
  Vector c = Vector::Zero(config.dimension());
  for (int i = 0; i < n; ++i) c += config.agent(i);
  return c / static_cast<double>(n);
}

double scale(const Configuration& config) {
  const int n = config.agent_count();
  const Vector c = centroid(config);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += (config.agent(i) - c).squaredNorm();
  return std::sqrt(sum / static_cast<double>(n));
}

Vector ManeuverCommand::leader_velocities() const {
  const auto d = v_c.size();
  Vector out(d * leader_count());
  for (int i = 0; i < leader_count(); ++i) {
    out.segment(i * d, d) = v_c;
    if (scale_alphas[static_cast<std::size_t>(i)] != 0.0)
      out.segment(i * d, d) += scale_alphas[static_cast<std::size_t>(i)] *
                               radial_units[static_cast<std::size_t>(i)];
  }
  return out;
}

double ManeuverCommand::scale_rate() const {
  // alpha_j = ratio * |p*_j - c| for all agents, so sqrt(mean alpha^2) = |ratio| * s.
  return ratio * scale(reference_config);
}

Vector translation_command(const Eigen::Ref<const Vector>& v_c, int leader_count) {
  return v_c.replicate(leader_count, 1);
}

namespace {

std::vector<Vector> radial_directions(const Configuration& reference, int leader_count,
                                      std::vector<double>* distances) {
  const Vector c = centroid(reference);
  std::vector<Vector> units;
  for (int i = 0; i < leader_count; ++i) {
    const Vector offset = reference.agent(i) - c;
    const double dist = offset.norm();
    if (!(dist > kCollocationEps))
      throw DegenerateVector("leader " + std::to_string(i) + " sits on the formation centroid");
    units.emplace_back(offset / dist);
    if (distances) distances->push_back(dist);
  }
  return units;
}

void require_leaders(const Configuration& reference, int leader_count) {
  if (leader_count < 1 || leader_count > reference.agent_count())
    throw DimensionMismatch("leader count outside the reference configuration");
}

}  // namespace

ManeuverCommand combined_command(const Eigen::Ref<const Vector>& v_c,
                                 const Configuration& reference, int leader_count, double rate) {
  require_leaders(reference, leader_count);
  if (v_c.size() != reference.dimension())
    throw DimensionMismatch("v_c dimension differs from the configuration");

  std::vector<double> alphas(static_cast<std::size_t>(leader_count), 0.0);
  std::vector<Vector> units(static_cast<std::size_t>(leader_count),
                            Vector::Zero(reference.dimension()));
  if (rate != 0.0) {
    std::vector<double> dist;
    units = radial_directions(reference, leader_count, &dist);
    for (std::size_t i = 0; i < dist.size(); ++i) alphas[i] = rate * dist[i];
  }
  return ManeuverCommand{Vector(v_c), std::move(alphas), std::move(units), rate, reference};
}

ManeuverCommand scaling_command(const Configuration& reference, int leader_count, double rate) {
  return combined_command(Vector::Zero(reference.dimension()), reference, leader_count, rate);
}

ManeuverCommand command_from_alphas(const Eigen::Ref<const Vector>& v_c,
                                    const Configuration& reference,
                                    const std::vector<double>& alphas) {
  const int leader_count = static_cast<int>(alphas.size());
  require_leaders(reference, leader_count);
  if (v_c.size() != reference.dimension())
    throw DimensionMismatch("v_c dimension differs from the configuration");

  const bool all_zero = std::all_of(alphas.begin(), alphas.end(), [](double a) { return a == 0.0; });
  if (all_zero) return combined_command(v_c, reference, leader_count, 0.0);

  const bool all_pos = std::all_of(alphas.begin(), alphas.end(), [](double a) { return a > 0.0; });
  const bool all_neg = std::all_of(alphas.begin(), alphas.end(), [](double a) { return a < 0.0; });
  if (!all_pos && !all_neg) throw InconsistentScaling("leader alphas do not share one sign");

  std::vector<double> dist;
  auto units = radial_directions(reference, leader_count, &dist);
  const double ratio = alphas[0] / dist[0];
  for (std::size_t i = 1; i < alphas.size(); ++i) {
    const double r = alphas[i] / dist[i];
    if (std::abs(r - ratio) > kAlphaRatioTol * std::abs(ratio))
      throw InconsistentScaling("alpha_" + std::to_string(i) + " / |p_i - c| = " +
                                std::to_string(r) + " differs from " + std::to_string(ratio));
  }
  return ManeuverCommand{Vector(v_c), alphas, std::move(units), ratio, reference};
}

Vector induced_velocity(const TargetSolver& solver, const Eigen::Ref<const Vector>& v_leader) {
  return solver.complete(v_leader);
}

bool validate_command(const BearingLaplacian& laplacian, const Eigen::Ref<const Vector>& v_star) {
  if (v_star.size() != laplacian.full().rows())
    throw DimensionMismatch("v* length differs from the Laplacian size");
  return (laplacian.full() * v_star).norm() < 1e-8 * (1.0 + v_star.norm());
}

}  // namespace bfm
