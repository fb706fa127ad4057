#include <doctest.h>

#include <cmath>
#include <random>

#include "bfm/errors.hpp"
#include "bfm/formation.hpp"
#include "support.hpp"

using namespace bfm;

TEST_CASE("orthogonal_projector on axis-aligned and diagonal vectors") {
  const Matrix p = orthogonal_projector(Vector::Unit(2, 0));
  CHECK(p(0, 0) == doctest::Approx(0.0));
  CHECK(p(0, 1) == doctest::Approx(0.0));
  CHECK(p(1, 1) == doctest::Approx(1.0));

  // I - g g^T with g = (1,1)/sqrt(2), evaluated by hand.
  const Matrix q = orthogonal_projector((Vector(2) << 1, 1).finished());
  Matrix expected(2, 2);
  expected << 0.5, -0.5, -0.5, 0.5;
  CHECK((q - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("orthogonal_projector properties on random vectors") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + trial % 3;
    Vector x(d);
    for (int k = 0; k < d; ++k) x(k) = testing::uniform(rng, -5.0, 5.0);
    const Matrix p = orthogonal_projector(x);
    CHECK((p - p.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((p * x).cwiseAbs().maxCoeff() < 1e-12);

    const Eigen::SelfAdjointEigenSolver<Matrix> eig(p);
    CHECK(std::abs(eig.eigenvalues()(0)) < 1e-12);
    for (int k = 1; k < d; ++k) CHECK(std::abs(eig.eigenvalues()(k) - 1.0) < 1e-12);
  }
}

TEST_CASE("orthogonal_projector rejects zero vectors") {
  CHECK_THROWS_AS(orthogonal_projector(Vector::Zero(3)), DegenerateVector);
  CHECK_THROWS_AS(orthogonal_projector(Vector::Constant(2, 1e-14)), DegenerateVector);
}

TEST_CASE("bearing values and antisymmetry") {
  const Vector g = bearing(Vector::Zero(2), (Vector(2) << 2, 0).finished());
  CHECK(g(0) == doctest::Approx(1.0));
  CHECK(g(1) == doctest::Approx(0.0));

  const Vector h = bearing(Vector::Zero(3), Vector::Ones(3));
  for (int k = 0; k < 3; ++k) CHECK(h(k) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(h(0) == doctest::Approx(0.5774).epsilon(1e-4));

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto c = testing::random_points(rng, 2, 3);
    const Vector ab = bearing(c.agent(0), c.agent(1));
    const Vector ba = bearing(c.agent(1), c.agent(0));
    CHECK((ab + ba).norm() < 1e-15);
    CHECK(std::abs(ab.norm() - 1.0) < 1e-15);
  }

  CHECK_THROWS_AS(bearing(Vector::Ones(2), Vector::Ones(2)), DegenerateVector);
}

TEST_CASE("bearing_function on a single edge and the unit square") {
  const FormationGraph pair(2, 2, 1, {{0, 1}});
  const Vector f = bearing_function(pair, Configuration(2, (Vector(4) << 0, 0, 1, 0).finished()));
  CHECK(f.isApprox((Vector(2) << 1, 0).finished()));

  const FormationGraph cycle(4, 2, 2, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  const Vector sq = bearing_function(cycle, testing::unit_square());
  // Edge (4,1) is stored as (1,4) since the tail is the smaller index.
  Vector expected(8);
  expected << 1, 0, 0, 1, -1, 0, 0, 1;
  CHECK((sq - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("bearing_function invariance under translation and scaling") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + trial % 2;
    const int n = 3 + trial % 5;
    const auto c = testing::random_points(rng, n, d);
    const FormationGraph g(n, d, 1, testing::complete_edges(n));
    const Vector f = bearing_function(g, c);

    Vector shift(d);
    for (int k = 0; k < d; ++k) shift(k) = testing::uniform(rng, -10, 10);
    const double factor = testing::uniform(rng, 0.1, 10.0);
    Vector moved = c.stacked();
    for (int i = 0; i < n; ++i) moved.segment(i * d, d) = factor * moved.segment(i * d, d) + shift;
    CHECK((bearing_function(g, Configuration(d, moved)) - f).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("edge orientation is normalized at construction") {
  const FormationGraph a(3, 2, 1, {{1, 0}, {2, 1}});
  CHECK(a.edge(0).tail == 0);
  CHECK(a.edge(0).head == 1);
  CHECK(a.edge(1).tail == 1);
  CHECK(a.edge(1).head == 2);
  CHECK(a.neighbors(1) == std::vector<int>{0, 2});
  CHECK(a.edge_index(2, 1) == 1);
  CHECK(a.edge_index(0, 2) == -1);

  // Reversing an edge negates exactly its own block of the raw bearings.
  const Configuration c(2, (Vector(6) << 0, 0, 1, 0, 1, 2).finished());
  const Vector f = bearing_function(a, c);
  CHECK(bearing(c.agent(1), c.agent(0)).isApprox(-f.segment(0, 2)));
}

TEST_CASE("graph construction rejects invalid input") {
  CHECK_THROWS_AS(FormationGraph(3, 2, 1, {{0, 0}}), InvalidGraph);
  CHECK_THROWS_AS(FormationGraph(3, 2, 1, {{0, 1}, {1, 0}}), InvalidGraph);
  CHECK_THROWS_AS(FormationGraph(3, 2, 1, {{0, 3}}), InvalidGraph);
  CHECK_THROWS_AS(FormationGraph(3, 2, 0, {{0, 1}}), InvalidGraph);
  CHECK_THROWS_AS(FormationGraph(3, 2, 4, {{0, 1}}), InvalidGraph);
  CHECK_THROWS_AS(FormationGraph(3, 1, 1, {{0, 1}}), InvalidGraph);
}

TEST_CASE("collocated endpoints report the edge index") {
  const FormationGraph g(3, 2, 1, {{0, 1}, {1, 2}});
  const Configuration c(2, (Vector(6) << 0, 0, 1, 1, 1, 1).finished());
  try {
    (void)bearing_function(g, c);
    FAIL("expected DegenerateVector");
  } catch (const DegenerateVector& ex) {
    CHECK(ex.edge() == 1);
  }
}

TEST_CASE("BearingSpec validates unit length and dimension") {
  CHECK_NOTHROW(BearingSpec(2, {Vector::Unit(2, 1)}));
  CHECK_THROWS_AS(BearingSpec(2, {(Vector(2) << 1.0 + 1e-9, 0).finished()}), DegenerateVector);
  CHECK_THROWS_AS(BearingSpec(2, {Vector::Unit(3, 0)}), DimensionMismatch);
  CHECK_THROWS_AS(Configuration(2, Vector::Zero(5)), DimensionMismatch);
}
