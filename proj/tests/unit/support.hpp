#pragma once

#include "orbitlab/maps.hpp"
#include "orbitlab/payoff.hpp"
#include "orbitlab/state.hpp"

#include <Eigen/Core>

#include <random>
#include <vector>

namespace orbitlab::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Eigen::VectorXd uniform_vector(std::mt19937_64& rng, Eigen::Index n, double lo, double hi) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(rng, lo, hi);
  return v;
}

/// Interior simplex-product point with every coordinate at least `floor` before normalization.
inline State interior_simplex(std::mt19937_64& rng, const std::vector<Eigen::Index>& blocks,
                              double floor = 0.05) {
  Eigen::Index d = 0;
  for (auto b : blocks) d += b;
  Eigen::VectorXd v = uniform_vector(rng, d, floor, 1.0);
  renormalize_simplex(v, blocks);
  return State::simplex(v, blocks);
}

inline State sphere_point(std::mt19937_64& rng, Eigen::Index d) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = normal(rng);
  return State::sphere(v / v.norm());
}

inline Payoff random_payoff(std::mt19937_64& rng, int n, int m, int k1, int k2) {
  std::vector<Eigen::MatrixXd> blocks;
  for (int b = 0; b < n * m; ++b) {
    Eigen::MatrixXd a(k1, k2);
    for (int i = 0; i < k1; ++i)
      for (int j = 0; j < k2; ++j) a(i, j) = uniform(rng, -1.0, 1.0);
    blocks.push_back(a);
  }
  return Payoff(n, m, k1, k2, std::move(blocks));
}

inline State pair_state(double x, double y) {
  Eigen::VectorXd a(1), b(1);
  a << x;
  b << y;
  return State::bipartite(a, b);
}

}  // namespace orbitlab::testing
