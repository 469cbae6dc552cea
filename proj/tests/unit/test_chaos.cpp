#include "orbitlab/chaos.hpp"
#include "orbitlab/errors.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace orbitlab;
using namespace orbitlab::testing;

namespace {

MapInstance fig1_map() { return MapInstance::alt_play(Payoff::scalar(1.0), 0.1, 0.2); }

}  // namespace

TEST_SUITE("chaos") {

TEST_CASE("verdict boundaries") {
  const ChaosThresholds t;
  CHECK(classify_distances(1e-7, 1e-2, t) == ChaosVerdict::scramble_candidate);
  CHECK(classify_distances(1e-6, 1e-3, t) == ChaosVerdict::scramble_candidate);
  CHECK(classify_distances(1e-9, 1e-7, t) == ChaosVerdict::converging_pair);
  CHECK(classify_distances(1e-2, 1.0, t) == ChaosVerdict::separated);
  CHECK(classify_distances(1e-7, 1e-4, t) == ChaosVerdict::inconclusive);
  CHECK(to_string(ChaosVerdict::scramble_candidate) == "scramble-candidate");
}

TEST_CASE("contracting gd pairs converge") {
  const auto map = MapInstance::gd(catalog::quadratic(2), 0.5);
  const ChaosReport r = scrambled_pair_estimate(map, State::euclidean(Eigen::Vector2d(1, 2)),
                                                State::euclidean(Eigen::Vector2d(-3, 0.5)), 200);
  CHECK(r.verdict == ChaosVerdict::converging_pair);
  CHECK(r.limsup_estimate <= 1e-6);
  CHECK(std::isnan(r.invariant_gap));
}

TEST_CASE("pairs on different level sets separate under alternating play") {
  const auto map = fig1_map();
  const Invariant phi = Invariant::closed_form(Payoff::scalar(1.0), 0.1, 0.2);
  const ChaosReport r = scrambled_pair_estimate(map, pair_state(60, -25), pair_state(-20, 2), 10000, {}, &phi);
  CHECK(r.verdict == ChaosVerdict::separated);
  CHECK(r.invariant_gap == 31375.0 - 3940.0);
  CHECK(r.phi_defect <= 1e-15);
  // The pair separates geometrically; by t = 10^4 the distance exceeds the double range.
  CHECK(r.liminf_estimate > 1e300);
}

TEST_CASE("the estimate is symmetric in the pair") {
  std::mt19937_64 rng(31);
  const auto map = fig1_map();
  for (int k = 0; k < 10; ++k) {
    const State x = map.make_state(uniform_vector(rng, 2, -10, 10));
    const State y = map.make_state(uniform_vector(rng, 2, -10, 10));
    const ChaosReport a = scrambled_pair_estimate(map, x, y, 500);
    const ChaosReport b = scrambled_pair_estimate(map, y, x, 500);
    CHECK(a.liminf_estimate == b.liminf_estimate);
    CHECK(a.limsup_estimate == b.limsup_estimate);
    CHECK(a.verdict == b.verdict);
  }
  const auto gd = MapInstance::gd(catalog::double_well(1.5), 0.1);
  const ChaosReport a = scrambled_pair_estimate(gd, State::scalar(0.3), State::scalar(-0.7), 100);
  const ChaosReport b = scrambled_pair_estimate(gd, State::scalar(-0.7), State::scalar(0.3), 100);
  CHECK(a.liminf_estimate == b.liminf_estimate);
  CHECK(a.limsup_estimate == b.limsup_estimate);
}

TEST_CASE("pair estimate input checks") {
  const auto map = fig1_map();
  CHECK_THROWS_AS(scrambled_pair_estimate(map, pair_state(1, 1), pair_state(1, 1), 10), std::invalid_argument);
  CHECK_THROWS_AS(scrambled_pair_estimate(map, pair_state(1, 1), pair_state(1, 2), 0), std::invalid_argument);
}

TEST_CASE("level-set confinement") {
  std::mt19937_64 rng(41);
  const auto map = fig1_map();
  const Invariant phi = Invariant::closed_form(Payoff::scalar(1.0), 0.1, 0.2);
  std::vector<std::pair<State, State>> pairs;
  for (int k = 0; k < 20; ++k)
    pairs.emplace_back(map.make_state(uniform_vector(rng, 2, -50, 50)), map.make_state(uniform_vector(rng, 2, -50, 50)));
  const ConfinementReport rep = level_set_confinement(map, phi, pairs, 2000);
  CHECK(rep.status == ConfinementStatus::confirmed);
  CHECK(rep.candidates == 0);
  CHECK(rep.refutations == 0);
  CHECK(rep.reports.size() == pairs.size());
  CHECK(rep.separated + rep.converging + rep.inconclusive == pairs.size());
  CHECK(rep.max_phi_defect <= 1e-15);

  // A closed form paired with a different map is not applicable.
  const auto other = MapInstance::alt_play(Payoff::scalar(2.0), 0.1, 0.2);
  CHECK(level_set_confinement(other, phi, pairs, 10).status == ConfinementStatus::skipped);

  // A function that is not conserved must be rejected loudly.
  const auto gd = MapInstance::gd(catalog::double_well(1.5), 0.1);
  const Invariant fake = Invariant::custom("x", [](const State& s) { return s[0]; });
  const std::vector<std::pair<State, State>> gd_pairs = {{State::scalar(0.2), State::scalar(0.4)}};
  CHECK_THROWS_AS(level_set_confinement(gd, fake, gd_pairs, 50), std::logic_error);
}

TEST_CASE("orbit signatures") {
  const Invariant phi = Invariant::closed_form(Payoff::scalar(1.0), 0.1, 0.2);
  const OrbitSignature sig = orbit_signature(pair_state(60, -25), {phi, Invariant::constant(3.0)});
  REQUIRE(sig.invariant_values.size() == 2);
  CHECK(sig.invariant_values[0].first == "bipartite");
  CHECK(sig.invariant_values[0].second == 31375.0);
  CHECK(sig.invariant_values[1].second == 3.0);
}

TEST_CASE("same orbit: sound answers") {
  const auto map = fig1_map();
  const State x = pair_state(60, -25);
  State y = x;
  for (int k = 0; k < 3; ++k) y = step(map, y);
  SameOrbitResult r = same_orbit(map, x, y, 50, 1e-9);
  CHECK(r.verdict == OrbitVerdict::yes);
  CHECK(r.index == 3);
  r = same_orbit(map, y, x, 50, 1e-9);
  CHECK(r.verdict == OrbitVerdict::yes);
  CHECK(r.index == -3);

  r = same_orbit(map, x, pair_state(-20, 2), 50, 1e-9);
  CHECK(r.verdict == OrbitVerdict::no);
  CHECK(r.reason == "invariant-filter");

  const auto gd = MapInstance::gd(catalog::double_well(1.5), 0.1);
  r = same_orbit(gd, State::scalar(1.0), State::scalar(0.5), 50, 1e-9);
  CHECK(r.verdict == OrbitVerdict::no);
  CHECK(r.reason == "fixed-point");

  r = same_orbit(gd, State::scalar(0.5), State::scalar(0.6), 30, 1e-9);
  CHECK(r.verdict == OrbitVerdict::inconclusive);
  CHECK(r.closest_distance > 0.0);
}

TEST_CASE("same orbit never answers NO for points on one orbit") {
  std::mt19937_64 rng(51);
  const auto map = MapInstance::alt_play(random_payoff(rng, 1, 1, 2, 2), 0.1, 0.2);
  for (int trial = 0; trial < 20; ++trial) {
    const State x = map.make_state(uniform_vector(rng, 4, -2, 2));
    const int k = static_cast<int>(uniform(rng, 1, 15));
    State y = x;
    for (int j = 0; j < k; ++j) y = step(map, y);
    const SameOrbitResult r = same_orbit(map, x, y, 30, 1e-9);
    CHECK(r.verdict != OrbitVerdict::no);
    CHECK(r.verdict == OrbitVerdict::yes);
    CHECK(r.index == k);
  }
}

}
