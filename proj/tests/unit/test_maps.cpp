#include "orbitlab/dynamics.hpp"
#include "orbitlab/errors.hpp"
#include "orbitlab/maps.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace orbitlab;
using namespace orbitlab::testing;

TEST_SUITE("maps") {

TEST_CASE("gd step on the double well") {
  const auto map = MapInstance::gd(catalog::double_well(1.5), 0.1);
  CHECK(map.validated());
  CHECK(map.chart() == Chart::euclidean);
  CHECK(step(map, State::scalar(0.5))[0] == 0.5375);
  CHECK(step(map, State::scalar(1.0))[0] == 1.0);
}

TEST_CASE("gd with a rejected step size is flagged but usable") {
  const auto map = MapInstance::gd(catalog::double_well(1.5), 0.5);
  CHECK_FALSE(map.validated());
  CHECK(map.verdict()->status == VerdictStatus::reject);
  CHECK_NOTHROW(step(map, State::scalar(0.5)));
  CHECK_THROWS_AS(MapInstance::gd(catalog::quadratic(1), 0.0), DomainError);
}

TEST_CASE("mwu exponential and linear updates") {
  Eigen::VectorXd c(3);
  c << 1.0, 0.0, -1.0;
  Eigen::VectorXd x(3);
  x << 0.2, 0.3, 0.5;
  const State s = State::simplex(x, {3});
  const double eps = 0.1;

  const auto exp_map = MapInstance::mwu_exp(catalog::linear(c), {eps}, {3});
  const State e = step(exp_map, s);
  Eigen::VectorXd w(3);
  for (int i = 0; i < 3; ++i) w[i] = x[i] * std::exp(-eps * c[i]);
  w /= w.sum();
  CHECK((e.coords() - w).norm() <= 1e-15);

  const auto lin_map = MapInstance::mwu_lin(catalog::linear(c), {eps}, {3});
  const State l = step(lin_map, s);
  const double denom = 1.0 - eps * x.dot(c);
  for (int i = 0; i < 3; ++i) CHECK(l[i] == doctest::Approx(x[i] * (1.0 - eps * c[i]) / denom).epsilon(1e-15));
  CHECK(std::abs(l.coords().sum() - 1.0) <= 1e-15);
}

TEST_CASE("mwu linear step rejects non-positive factors") {
  Eigen::VectorXd c(2);
  c << 1.0, -1.0;
  const auto map = MapInstance::mwu_lin(catalog::linear(c), {5.0}, {2});
  const State s = State::simplex(Eigen::Vector2d(0.5, 0.5), {2});
  CHECK_THROWS_AS(step(map, s), StepSizeError);
  CHECK_FALSE(map.validated());
}

TEST_CASE("mwu learning rates are per block") {
  Eigen::VectorXd c(5);
  c << 1.0, -0.5, 0.25, 0.3, -0.7;
  CHECK_THROWS_AS(MapInstance::mwu_exp(catalog::linear(c), {0.1}, {3, 2}), DomainError);
  CHECK_THROWS_AS(MapInstance::mwu_exp(catalog::linear(c), {0.1, 0.1}, {3, 3}), DomainError);
  const auto map = MapInstance::mwu_exp(catalog::linear(c), {0.05, 0.1}, {3, 2});
  CHECK(map.validated());
  const DiffeomorphismCheck check = mwu_diffeomorphism_check(map);
  CHECK(check.passed);
  CHECK(check.min_factor > 0.0);
  CHECK(check.min_determinant > 0.0);
}

TEST_CASE("alternating play uses the updated X") {
  const Payoff p = Payoff::scalar(1.0);
  const State next = alt_play_step(p, 0.1, 0.2, pair_state(60, -25));
  CHECK(next[0] == 57.5);
  CHECK(next[1] == -25 + 0.2 * 57.5);
  const State back = alt_play_inverse(p, 0.1, 0.2, next);
  CHECK(back[0] == doctest::Approx(60.0).epsilon(1e-15));
  CHECK(back[1] == doctest::Approx(-25.0).epsilon(1e-15));
}

TEST_CASE("alternating play with blocks") {
  std::mt19937_64 rng(5);
  const Payoff p = random_payoff(rng, 2, 3, 2, 1);
  CHECK(p.assembled().rows() == 4);
  CHECK(p.assembled().cols() == 3);
  const auto map = MapInstance::alt_play(p, 0.1, 0.3);
  const State s = map.make_state(uniform_vector(rng, 7, -1, 1));
  const State t = step(map, s);
  const Eigen::VectorXd x1 = s.x_block() + 0.1 * p.assembled() * s.y_block();
  const Eigen::VectorXd y1 = s.y_block() + 0.3 * p.assembled().transpose() * x1;
  CHECK((t.x_block() - x1).norm() <= 1e-14);
  CHECK((t.y_block() - y1).norm() <= 1e-14);
  CHECK_THROWS_AS(Payoff(2, 2, 1, 1, {Eigen::MatrixXd::Ones(1, 1)}), DomainError);
}

TEST_CASE("rgd on the sphere") {
  Eigen::VectorXd c(2);
  c << 1.0, 0.0;
  const auto map = MapInstance::rgd_sphere(catalog::linear(c), 0.1, 1.0);
  CHECK(map.validated());
  const State s = State::sphere(Eigen::Vector2d(0.0, 1.0));
  const State t = step(map, s);
  CHECK(t[0] == doctest::Approx(-0.09950371902099893).epsilon(1e-15));
  CHECK(t[1] == doctest::Approx(0.9950371902099893).epsilon(1e-15));
  CHECK(std::abs(t.coords().norm() - 1.0) <= 1e-15);
  CHECK_THROWS_AS(MapInstance::rgd_sphere(catalog::quadratic(1), 0.1, 1.0), DomainError);
}

TEST_CASE("riemannian gradient is tangent") {
  std::mt19937_64 rng(8);
  const auto f = catalog::bump(4);
  for (int k = 0; k < 100; ++k) {
    const State x = sphere_point(rng, 4);
    CHECK(std::abs(riemannian_gradient(*f, x.coords()).dot(x.coords())) <= 1e-14);
  }
}

TEST_CASE("chart checks") {
  const auto gd = MapInstance::gd(catalog::quadratic(2), 0.1);
  CHECK_THROWS_AS(step(gd, State::scalar(1.0)), DomainError);
  const auto sphere = MapInstance::rgd_sphere(catalog::bump(2), 0.1, 2.0);
  CHECK_THROWS_AS(step(sphere, State::euclidean(Eigen::Vector2d(2.0, 0.0))), DomainError);
}

TEST_CASE("jacobians match finite differences") {
  std::mt19937_64 rng(9);
  auto fd_jacobian = [](const MapInstance& map, const State& s) {
    const Eigen::Index d = s.dim();
    Eigen::MatrixXd j(d, d);
    const double h = 1e-6;
    for (Eigen::Index c = 0; c < d; ++c) {
      Eigen::VectorXd up = s.coords(), down = s.coords();
      up[c] += h;
      down[c] -= h;
      Eigen::VectorXd fu, fl;
      if (map.kind() == MapKind::mwu_exp || map.kind() == MapKind::mwu_lin) {
        fu = mwu_ambient(map, up);
        fl = mwu_ambient(map, down);
      } else {
        fu = step(map, State(up, s.chart(), s.blocks())).coords();
        fl = step(map, State(down, s.chart(), s.blocks())).coords();
      }
      j.col(c) = (fu - fl) / (2 * h);
    }
    return j;
  };
  const auto gd = MapInstance::gd(catalog::bump(3), 0.2);
  const State x = State::euclidean(uniform_vector(rng, 3, -1, 1));
  CHECK((jacobian(gd, x.coords()) - fd_jacobian(gd, x)).cwiseAbs().maxCoeff() <= 1e-7);

  const auto mwu = MapInstance::mwu_exp(catalog::quadratic(5), {0.05, 0.1}, {3, 2});
  const State y = interior_simplex(rng, {3, 2});
  CHECK((jacobian(mwu, y.coords()) - fd_jacobian(mwu, y)).cwiseAbs().maxCoeff() <= 1e-7);

  const auto alt = MapInstance::alt_play(random_payoff(rng, 1, 2, 2, 1), 0.2, 0.1);
  const State z = alt.make_state(uniform_vector(rng, 4, -1, 1));
  CHECK((jacobian(alt, z.coords()) - fd_jacobian(alt, z)).cwiseAbs().maxCoeff() <= 1e-7);
}

TEST_CASE("simplex tangent basis") {
  const Eigen::MatrixXd b = simplex_tangent_basis({3, 2});
  CHECK(b.rows() == 5);
  CHECK(b.cols() == 3);
  CHECK((b.transpose() * b - Eigen::MatrixXd::Identity(3, 3)).norm() <= 1e-14);
  CHECK(std::abs(b.col(0).head(3).sum()) <= 1e-14);
  CHECK(std::abs(b.col(2).tail(2).sum()) <= 1e-14);
}

TEST_CASE("map kind names") {
  for (MapKind k : {MapKind::gd, MapKind::mwu_exp, MapKind::mwu_lin, MapKind::alt_play, MapKind::rgd_sphere})
    CHECK(map_kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(map_kind_from_string("sgd"), DomainError);
}

}
