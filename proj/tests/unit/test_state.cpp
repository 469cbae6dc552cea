#include "orbitlab/errors.hpp"
#include "orbitlab/state.hpp"

#include <doctest.h>

using namespace orbitlab;

TEST_SUITE("state") {

TEST_CASE("chart names round-trip") {
  for (Chart c : {Chart::euclidean, Chart::simplex_product, Chart::sphere, Chart::bipartite_pair})
    CHECK(chart_from_string(to_string(c)) == c);
  CHECK(to_string(Chart::simplex_product) == "simplex-product");
  CHECK_THROWS_AS(chart_from_string("torus"), DomainError);
}

TEST_CASE("simplex membership") {
  Eigen::VectorXd v(5);
  v << 0.2, 0.3, 0.5, 0.6, 0.4;
  CHECK_NOTHROW(State::simplex(v, {3, 2}).validate());

  Eigen::VectorXd off = v;
  off[0] += 1e-9;
  CHECK_THROWS_AS(State::simplex(off, {3, 2}).validate(), DomainError);

  Eigen::VectorXd neg = v;
  neg[0] = -0.1;
  neg[1] = 0.6;
  CHECK_FALSE(State(neg, Chart::simplex_product, {3, 2}).is_valid());
  CHECK_THROWS_AS(State::simplex(neg, {3, 2}), DomainError);
  CHECK_THROWS_AS(State::simplex(v, {3, 3}).validate(), DomainError);
}

TEST_CASE("sphere membership") {
  Eigen::VectorXd v(3);
  v << 0.6, 0.8, 0.0;
  CHECK(State::sphere(v).is_valid());
  CHECK_FALSE(State(1.01 * v, Chart::sphere).is_valid());
  CHECK_THROWS_AS(State::sphere(1.01 * v), DomainError);
}

TEST_CASE("bipartite blocks") {
  Eigen::VectorXd x(2), y(3);
  x << 1, 2;
  y << 3, 4, 5;
  const State s = State::bipartite(x, y);
  CHECK(s.dim() == 5);
  CHECK(s.x_block() == x);
  CHECK(s.y_block() == y);
  CHECK_THROWS_AS(State::scalar(1.0).x_block(), DomainError);
}

TEST_CASE("renormalization reports the pre-normalization defect") {
  Eigen::VectorXd v(4);
  v << 0.25, 0.25, 0.6, 0.6;
  const double defect = renormalize_simplex(v, {2, 2});
  CHECK(defect == doctest::Approx(0.5));
  CHECK(v[0] == doctest::Approx(0.5));
  CHECK(v[2] == doctest::Approx(0.5));

  Eigen::VectorXd tiny(2);
  tiny << -1e-14, 1.0;
  renormalize_simplex(tiny, {2});
  CHECK(tiny[0] == 0.0);
  CHECK(tiny[1] == 1.0);
}

TEST_CASE("distance and layout") {
  const State a = State::scalar(1.0), b = State::scalar(4.0);
  CHECK(distance(a, b) == 3.0);
  CHECK(same_layout(a, b));
  CHECK_FALSE(same_layout(a, State::sphere(Eigen::Vector2d(1.0, 0.0))));
  CHECK_FALSE(State::euclidean(Eigen::VectorXd::Constant(1, std::nan(""))).is_valid());
}

}
