#include "orbitlab/kernels.hpp"

#include <cmath>
#include <exception>
#include <optional>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace orbitlab::kernels {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace {

// Runs body(i) for i in [0, n). Exceptions are captured per item and the one
// with the smallest index is rethrown, so failures are deterministic too.
template <typename Body>
void for_each_index(std::size_t n, Backend backend, Body&& body) {
  if (backend == Backend::serial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

std::vector<ChaosReport> scan_pairs(const MapInstance& map,
                                    const std::vector<std::pair<State, State>>& pairs,
                                    std::size_t horizon, const ChaosThresholds& thresholds,
                                    const Invariant* phi, Backend backend) {
  std::vector<ChaosReport> out(pairs.size());
  for_each_index(pairs.size(), backend, [&](std::size_t i) {
    out[i] = scrambled_pair_estimate(map, pairs[i].first, pairs[i].second, horizon,
                                     thresholds, phi);
  });
  return out;
}

std::vector<double> descent_values(const MapInstance& map, const std::vector<State>& points,
                                   Backend backend) {
  std::vector<double> out(points.size());
  for_each_index(points.size(), backend,
                 [&](std::size_t i) { out[i] = descent_check(map, points[i]); });
  return out;
}

std::vector<double> roundtrip_errors(const MapInstance& map, const std::vector<State>& points,
                                     const InverseConfig& cfg, Backend backend) {
  std::vector<double> out(points.size());
  for_each_index(points.size(), backend, [&](std::size_t i) {
    out[i] = distance(inverse_step(map, step(map, points[i]), cfg), points[i]);
  });
  return out;
}

namespace {

// Real roots of q2 t^2 + q1 t + q0 = 0 without cancellation.
std::vector<double> quadratic_roots(double q2, double q1, double q0) {
  const double disc = q1 * q1 - 4.0 * q2 * q0;
  if (disc < 0.0 || q2 == 0.0) return {};
  const double q = -0.5 * (q1 + std::copysign(std::sqrt(disc), q1));
  if (q == 0.0) return {0.0};
  return {q / q2, q0 / q};
}

double level_phi(double eta1, double eta2, double a, double x, double y) {
  return x * x / eta1 - y * y / eta2 + a * x * y;
}

}  // namespace

std::vector<LevelPoint> level_curve(double eta1, double eta2, double a, double c,
                                    double half_width, std::size_t grid_points,
                                    Backend backend) {
  // Slot 2 per grid node per sweep (two roots), missing roots stay empty.
  const std::size_t slots = 2 * grid_points;
  std::vector<std::optional<LevelPoint>> found(2 * slots);
  const double tol = 1e-9 * (1.0 + std::abs(c));
  auto grid = [&](std::size_t i) {
    if (grid_points == 1) return 0.0;
    return -half_width + 2.0 * half_width * static_cast<double>(i) /
                             static_cast<double>(grid_points - 1);
  };
  for_each_index(2 * grid_points, backend, [&](std::size_t task) {
    const bool solve_for_y = task < grid_points;
    const std::size_t i = solve_for_y ? task : task - grid_points;
    const double s = grid(i);
    // Solve for y at fixed x = s:  -y^2/eta2 + a s y + (s^2/eta1 - c) = 0
    // Solve for x at fixed y = s:   x^2/eta1 + a s x - (s^2/eta2 + c) = 0
    const std::vector<double> roots =
        solve_for_y ? quadratic_roots(-1.0 / eta2, a * s, s * s / eta1 - c)
                    : quadratic_roots(1.0 / eta1, a * s, -(s * s / eta2 + c));
    for (std::size_t r = 0; r < roots.size() && r < 2; ++r) {
      double x = solve_for_y ? s : roots[r];
      double y = solve_for_y ? roots[r] : s;
      double resid = level_phi(eta1, eta2, a, x, y) - c;
      if (std::abs(resid) > tol) {
        // One Newton step along the free coordinate.
        if (solve_for_y) y -= resid / (-2.0 * y / eta2 + a * x);
        else x -= resid / (2.0 * x / eta1 + a * y);
        resid = level_phi(eta1, eta2, a, x, y) - c;
      }
      if (std::abs(resid) > tol || std::abs(x) > half_width || std::abs(y) > half_width) continue;
      found[2 * task + r] = LevelPoint{x, y};
    }
  });
  std::vector<LevelPoint> out;
  for (const auto& p : found)
    if (p) out.push_back(*p);
  return out;
}

}  // namespace orbitlab::kernels
