#pragma once

// Test-only helpers: random formations and oracles that are independent of
// the library code paths they check.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "bfm/formation.hpp"

namespace bfm::testing {

inline std::filesystem::path scenario_dir() { return BFM_SCENARIO_DIR; }

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Points in [-1, 1]^d with pairwise distance at least min_sep.
inline Configuration random_points(std::mt19937_64& rng, int n, int d, double min_sep = 0.25) {
  std::vector<Vector> pts;
  while (static_cast<int>(pts.size()) < n) {
    Vector candidate(d);
    for (int k = 0; k < d; ++k) candidate(k) = uniform(rng, -1.0, 1.0);
    const bool ok = std::all_of(pts.begin(), pts.end(),
                                [&](const Vector& q) { return (q - candidate).norm() >= min_sep; });
    if (ok) pts.push_back(candidate);
  }
  return Configuration::from_points(pts);
}

inline std::vector<std::pair<int, int>> complete_edges(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return e;
}

/// Random graph that always contains a spanning path, plus each other pair
/// with probability `p`.
inline std::vector<std::pair<int, int>> random_edges(std::mt19937_64& rng, int n, double p) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (j == i + 1 || uniform(rng, 0.0, 1.0) < p) e.emplace_back(i, j);
  return e;
}

/// Unit square (0,0),(1,0),(1,1),(0,1).
inline Configuration unit_square() {
  return Configuration(2, (Vector(8) << 0, 0, 1, 0, 1, 1, 0, 1).finished());
}

/// Square cycle plus both diagonals.
inline FormationGraph square_with_diagonals(int leaders) {
  return FormationGraph(4, 2, leaders, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}, {1, 3}});
}

/// Bearing function evaluated from scratch, without the library.
inline Vector naive_bearings(const FormationGraph& g, const Vector& p) {
  const int d = g.dimension();
  Vector out(g.edge_count() * d);
  for (int k = 0; k < g.edge_count(); ++k) {
    const auto& e = g.edge(k);
    const Vector diff = p.segment(e.head * d, d) - p.segment(e.tail * d, d);
    out.segment(k * d, d) = diff / diff.norm();
  }
  return out;
}

/// Central finite-difference Jacobian of the bearing function.
inline Matrix fd_jacobian(const FormationGraph& g, const Configuration& c, double h = 1e-6) {
  const Vector& p = c.stacked();
  Matrix jac(g.edge_count() * g.dimension(), p.size());
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    Vector plus = p;
    Vector minus = p;
    plus(j) += h;
    minus(j) -= h;
    jac.col(j) = (naive_bearings(g, plus) - naive_bearings(g, minus)) / (2.0 * h);
  }
  return jac;
}

/// Bearing Laplacian assembled by explicit loops over vertex pairs.
inline Matrix naive_laplacian(const FormationGraph& g, const std::vector<Vector>& bearings) {
  const int d = g.dimension();
  const int n = g.agent_count();
  Matrix l = Matrix::Zero(n * d, n * d);
  for (int i = 0; i < n; ++i) {
    for (int j : g.neighbors(i)) {
      const Vector& b = bearings[static_cast<std::size_t>(g.edge_index(i, j))];
      const Matrix proj = Matrix::Identity(d, d) - b * b.transpose();
      l.block(i * d, j * d, d, d) = -proj;
      l.block(i * d, i * d, d, d) += proj;
    }
  }
  return l;
}

/// Exact flow of x' = M x + b over time t, via the augmented matrix exponential.
inline Vector affine_flow(const Matrix& m, const Vector& b, const Vector& x0, double t) {
  const Eigen::Index n = m.rows();
  Matrix aug = Matrix::Zero(n + 1, n + 1);
  aug.topLeftCorner(n, n) = m * t;
  aug.topRightCorner(n, 1) = b * t;
  const Matrix e = aug.exp();
  return e.topLeftCorner(n, n) * x0 + e.topRightCorner(n, 1);
}

}  // namespace bfm::testing
