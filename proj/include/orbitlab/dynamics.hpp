#pragma once

#include "orbitlab/maps.hpp"
#include "orbitlab/state.hpp"

#include <cstddef>
#include <vector>

namespace orbitlab {

inline constexpr double kDefaultFixedPointTolerance = 1e-10;

struct InverseConfig {
  double tolerance = 1e-12;  // on |T(y) - x|
  int max_iterations = 60;
};

/// Returns y with |T(y) - x| <= cfg.tolerance.
///
/// GD uses damped Newton with Jacobian I - eta Hess f, MWU uses Gauss-Newton
/// in ambient coordinates with the block sums as extra equations followed by
/// exact renormalization, the sphere uses Newton in a tangent chart, and
/// alternating play uses its closed form. Throws InversionError on
/// divergence, on leaving the objective's region, or on leaving the simplex
/// interior.
State inverse_step(const MapInstance& map, const State& x, const InverseConfig& cfg = {});

struct OrbitOptions {
  bool stop_at_fixed_point = true;
  double fixed_point_tolerance = kDefaultFixedPointTolerance;
  InverseConfig inverse;
};

/// A finite piece {T^k x} of an orbit. forward[k-1] = T^k(origin) and
/// backward[k-1] = T^{-k}(origin).
struct OrbitSegment {
  State origin;
  std::vector<State> forward;
  std::vector<State> backward;
  MapKind map_kind = MapKind::gd;
  std::size_t requested_forward = 0;
  std::size_t requested_backward = 0;
  bool forward_truncated = false;   // stopped at a fixed point
  bool backward_truncated = false;  // stopped at a fixed point
  double max_renorm_defect = 0.0;

  /// T^k(origin) for -backward.size() <= k <= forward.size().
  const State& at(long k) const;
};

/// Forward iterates exactly; backward iterates through inverse_step.
/// InversionError carries the (negative) index of the failing step;
/// non-finite forward states raise NumericalError.
OrbitSegment orbit(const MapInstance& map, const State& x, std::size_t n_forward,
                   std::size_t n_backward, const OrbitOptions& opts = {});

/// |T(x) - x| <= tol.
bool detect_fixed_point(const MapInstance& map, const State& x,
                        double tol = kDefaultFixedPointTolerance);

/// f(x) - f(T(x)) for the map's objective.
double descent_check(const Objective& obj, const MapInstance& map, const State& x);
inline double descent_check(const MapInstance& map, const State& x) {
  return descent_check(map.objective(), map, x);
}

}  // namespace orbitlab
