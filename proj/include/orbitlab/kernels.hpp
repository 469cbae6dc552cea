#pragma once

// Batch kernels over independent initial conditions. Each kernel has a
// serial reference loop and an OpenMP loop; both call the same per-item
// function, write into a preallocated slot per item, and so produce
// identical output regardless of thread count or scheduling.

#include "orbitlab/chaos.hpp"
#include "orbitlab/dynamics.hpp"
#include "orbitlab/invariants.hpp"
#include "orbitlab/maps.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace orbitlab::kernels {

enum class Backend { serial, openmp };

/// Number of threads the OpenMP backend would use (1 without OpenMP).
int max_threads();

std::vector<ChaosReport> scan_pairs(const MapInstance& map,
                                    const std::vector<std::pair<State, State>>& pairs,
                                    std::size_t horizon, const ChaosThresholds& thresholds,
                                    const Invariant* phi, Backend backend);

/// f(x) - f(T(x)) at each point.
std::vector<double> descent_values(const MapInstance& map, const std::vector<State>& points,
                                   Backend backend);

/// |T^-1(T(x)) - x| at each point.
std::vector<double> roundtrip_errors(const MapInstance& map, const std::vector<State>& points,
                                     const InverseConfig& cfg, Backend backend);

struct LevelPoint {
  double x = 0.0;
  double y = 0.0;
};

/// Points of {x^2/eta1 - y^2/eta2 + a x y = c} inside [-half_width, half_width]^2,
/// found by solving the quadratic in y on an x grid and in x on a y grid.
/// Points failing |Phi - c| <= 1e-9 (1 + |c|) after one Newton polish are dropped.
std::vector<LevelPoint> level_curve(double eta1, double eta2, double a, double c,
                                    double half_width, std::size_t grid_points,
                                    Backend backend);

}  // namespace orbitlab::kernels
