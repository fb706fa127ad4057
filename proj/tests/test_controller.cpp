#include <doctest.h>

#include <complex>
#include <random>

#include "bfm/controller.hpp"
#include "bfm/errors.hpp"
#include "support.hpp"

using namespace bfm;

namespace {

struct Fixture {
  FormationGraph graph;
  Configuration config;
  BearingSpec spec;
  BearingLaplacian lap;
};

Fixture random_fixture(std::mt19937_64& rng, int n, int d, int nl) {
  auto c = testing::random_points(rng, n, d);
  FormationGraph g(n, d, nl, testing::random_edges(rng, n, 0.6));
  auto spec = BearingSpec::from_configuration(g, c);
  auto lap = bearing_laplacian(g, spec);
  return {std::move(g), std::move(c), std::move(spec), std::move(lap)};
}

Matrix random_spd(std::mt19937_64& rng, int m) {
  Matrix b(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) b(i, j) = testing::uniform(rng, -1, 1);
  return b * b.transpose() + 0.05 * Matrix::Identity(m, m);
}

}  // namespace

TEST_CASE("per-follower law matches the stacked dynamics") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 2 + trial % 2;
    const int n = 3 + trial % 5;
    const int nl = 1 + trial % (n - 1);
    const auto fx = random_fixture(rng, n, d, nl);
    const Gains gains{testing::uniform(rng, 0.1, 5), testing::uniform(rng, 0, 5)};

    Vector p(n * d);
    Vector xi((n - nl) * d);
    for (auto& v : p) v = testing::uniform(rng, -2, 2);
    for (auto& v : xi) v = testing::uniform(rng, -1, 1);
    const Vector vl = Vector::Zero(nl * d);
    const auto stacked = stacked_dynamics(fx.lap, p, xi, gains, vl);

    for (int i = nl; i < n; ++i) {
      std::vector<NeighborMeasurement> ms;
      for (int j : fx.graph.neighbors(i))
        ms.push_back({j, p.segment(i * d, d) - p.segment(j * d, d)});
      const int f = i - nl;
      const auto rate =
          follower_velocity(fx.graph, fx.spec, i, ms, xi.segment(f * d, d), gains);
      CHECK((rate.velocity - stacked.p_dot.segment(i * d, d)).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((rate.xi_rate - stacked.xi_dot.segment(f * d, d)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("follower_velocity error paths") {
  const FormationGraph g = testing::square_with_diagonals(2);
  const auto spec = BearingSpec::from_configuration(g, testing::unit_square());
  const Vector xi = Vector::Zero(2);
  const Vector r = Vector::Ones(2);

  // Vertex 2 has neighbors 0, 1 and 3.
  CHECK_THROWS_AS(follower_velocity(g, spec, 2, {{0, r}, {1, r}}, xi, {}), UnknownNeighbor);
  const FormationGraph sparse(4, 2, 2, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  const auto sparse_spec = BearingSpec::from_configuration(sparse, testing::unit_square());
  CHECK_THROWS_AS(follower_velocity(sparse, sparse_spec, 2, {{1, r}, {3, r}, {0, r}}, xi, {}),
                  UnknownNeighbor);
  CHECK_THROWS_AS(follower_velocity(g, spec, 0, {{1, r}, {2, r}, {3, r}}, xi, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(follower_velocity(g, spec, 2, {{0, r}, {1, r}, {3, r}}, xi, {-1.0, 0.5}),
                  std::invalid_argument);
  CHECK_NOTHROW(follower_velocity(g, spec, 2, {{3, r}, {0, r}, {1, r}}, xi, {}));
}

TEST_CASE("gain validation") {
  CHECK_NOTHROW((Gains{1.0, 0.0}.validate()));
  CHECK_THROWS_AS((Gains{0.0, 1.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((Gains{1.0, -0.1}.validate()), std::invalid_argument);
}

TEST_CASE("target with zero integral state is an equilibrium") {
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 4 + trial % 4;
    const auto fx = random_fixture(rng, n, 2, 2);
    const int nf = n - 2;
    const auto der = stacked_dynamics(fx.lap, fx.config.stacked(), Vector::Zero(2 * nf), Gains{},
                                      Vector::Zero(4));
    CHECK(der.p_dot.norm() < 1e-12);
    CHECK(der.xi_dot.norm() < 1e-12);
  }
}

TEST_CASE("steady-state integral reproduces the induced follower velocity") {
  const FormationGraph g = testing::square_with_diagonals(2);
  const auto lap = bearing_laplacian(g, BearingSpec::from_configuration(g, testing::unit_square()));
  const Gains gains{2.0, 3.0};
  const Vector vl = (Vector(4) << 1, 0.5, 1, 0.5).finished();
  const Vector xi = steady_state_integral(lap, vl, gains);
  const auto der = stacked_dynamics(lap, testing::unit_square().stacked(), xi, gains, vl);
  CHECK((der.p_dot.tail(4) - TargetSolver(lap).solve(vl)).norm() < 1e-12);
  CHECK(der.xi_dot.norm() < 1e-12);
  CHECK_THROWS_AS(steady_state_integral(lap, vl, {1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("closed-loop matrix for one planar follower") {
  const Matrix a = closed_loop_matrix(Matrix::Identity(2, 2), {2.0, 1.0});
  Matrix expected = Matrix::Zero(4, 4);
  expected.topLeftCorner(2, 2) = -2.0 * Matrix::Identity(2, 2);
  expected.topRightCorner(2, 2) = -Matrix::Identity(2, 2);
  expected.bottomLeftCorner(2, 2) = Matrix::Identity(2, 2);
  CHECK(a == expected);
  CHECK(a.rows() == 2 * 2 * 1);
}

TEST_CASE("closed-loop matrix for a scalar L_ff block") {
  const Matrix lff = 2.0 * Matrix::Identity(2, 2);
  const Matrix a = closed_loop_matrix(lff, {1.0, 0.5});
  Matrix expected(4, 4);
  expected << -2, 0, -0.5, 0,
              0, -2, 0, -0.5,
              2, 0, 0, 0,
              0, 2, 0, 0;
  CHECK(a == expected);
  CHECK(a.trace() == doctest::Approx(-1.0 * lff.trace()));

  // lambda^2 + 2 lambda + 1 = 0: double root at -1 (defective, so loose tolerance).
  const auto report = verify_hurwitz(a);
  CHECK(report.is_hurwitz);
  for (const auto& z : report.spectrum) CHECK(std::abs(z - std::complex<double>(-1, 0)) < 1e-6);
}

TEST_CASE("spectrum roots solve the per-eigenvalue quadratic") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 1 + trial % 6;
    const Matrix lff = random_spd(rng, m);
    const Gains gains{testing::uniform(rng, 0.1, 5), testing::uniform(rng, 0.1, 5)};
    const Matrix a = closed_loop_matrix(lff, gains);
    CHECK(a.trace() == doctest::Approx(-gains.k_p * lff.trace()));

    const auto report = verify_hurwitz(a);
    CHECK(report.is_hurwitz);
    CHECK(report.spectrum.size() == static_cast<std::size_t>(2 * m));

    const Vector sigma = Eigen::SelfAdjointEigenSolver<Matrix>(lff).eigenvalues();
    for (const auto& z : report.spectrum) {
      double best = 1e300;
      for (double s : sigma)
        best = std::min(best, std::abs(z * z + gains.k_p * s * z + gains.k_i * s));
      CHECK(best < 1e-7 * (1.0 + std::norm(z)));
    }
  }
}

TEST_CASE("proportional-only and degenerate spectra") {
  const Matrix lff = (Matrix(2, 2) << 2, 0, 0, 3).finished();
  const auto p_only = closed_loop_spectrum(lff, {2.0, 0.0});
  CHECK(p_only.spectrum.size() == 2);
  CHECK(p_only.max_real_part == doctest::Approx(-4.0));

  // Singular L_ff leaves a zero eigenvalue, so the loop is not Hurwitz.
  const Matrix singular = (Matrix(2, 2) << 1, 0, 0, 0).finished();
  CHECK_FALSE(closed_loop_spectrum(singular, {1.0, 1.0}).is_hurwitz);
  CHECK(verify_hurwitz(Matrix(0, 0)).is_hurwitz);
  CHECK_THROWS_AS(verify_hurwitz(Matrix::Zero(2, 3)), DimensionMismatch);
}
