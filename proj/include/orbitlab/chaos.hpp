#pragma once

#include "orbitlab/dynamics.hpp"
#include "orbitlab/invariants.hpp"
#include "orbitlab/maps.hpp"
#include "orbitlab/state.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace orbitlab {

struct ChaosThresholds {
  double eps_low = 1e-6;
  double eps_high = 1e-3;
  double tail_fraction = 0.2;  // liminf/limsup are taken over the last 20% of steps
};

/// A finite-horizon proxy only: a candidate is never reported as "scrambled".
enum class ChaosVerdict { scramble_candidate, separated, converging_pair, inconclusive };
std::string_view to_string(ChaosVerdict verdict);

struct ChaosReport {
  std::pair<State, State> pair;
  double liminf_estimate = 0.0;
  double limsup_estimate = 0.0;
  std::size_t horizon = 0;
  /// |Phi(x) - Phi(y)|; NaN when no invariant was supplied.
  double invariant_gap = 0.0;
  /// Largest relative Phi defect seen along either orbit; NaN without Phi.
  double phi_defect = 0.0;
  ChaosVerdict verdict = ChaosVerdict::inconclusive;
};

/// Iterates x and y for `horizon` steps and summarizes |T^k x - T^k y| over
/// the tail window. Alternating play runs on the extended-precision path.
ChaosReport scrambled_pair_estimate(const MapInstance& map, const State& x, const State& y,
                                    std::size_t horizon, const ChaosThresholds& thresholds = {},
                                    const Invariant* phi = nullptr);

ChaosVerdict classify_distances(double liminf, double limsup, const ChaosThresholds& t);

enum class ConfinementStatus { confirmed, refuted, skipped };
std::string_view to_string(ConfinementStatus status);

struct ConfinementOptions {
  ChaosThresholds thresholds;
  double defect_tolerance = 1e-9;
  /// A candidate pair refutes confinement when gap > gap_tolerance * (1 + max |Phi|).
  double gap_tolerance = 1e-9;
  bool parallel = true;
};

struct ConfinementReport {
  ConfinementStatus status = ConfinementStatus::confirmed;
  std::string note;
  std::vector<ChaosReport> reports;
  std::size_t candidates = 0;
  std::size_t refutations = 0;
  std::size_t separated = 0;
  std::size_t converging = 0;
  std::size_t inconclusive = 0;
  double max_phi_defect = 0.0;
};

/// Every scramble candidate must have (numerically) equal invariant values.
/// A candidate across level sets is reported as a refutation. Throws
/// std::logic_error if phi is not conserved (defect above tolerance) on the
/// tested orbits. A closed-form alternating-play invariant paired with any
/// other map is skipped.
ConfinementReport level_set_confinement(const MapInstance& map, const Invariant& phi,
                                        const std::vector<std::pair<State, State>>& pairs,
                                        std::size_t horizon, const ConfinementOptions& opts = {});

/// phi(x) = (phi_1(x), ..., phi_d(x)) at one point.
struct OrbitSignature {
  State source;
  std::vector<std::pair<std::string, double>> invariant_values;
  std::size_t depth = 0;  // series truncation depth, 0 for closed forms
};

OrbitSignature orbit_signature(const State& x, const std::vector<Invariant>& invariants,
                               std::size_t depth = 0);

enum class OrbitVerdict { yes, no, inconclusive };
std::string_view to_string(OrbitVerdict verdict);

struct SameOrbitResult {
  OrbitVerdict verdict = OrbitVerdict::inconclusive;
  std::string reason;  // invariant-filter | fixed-point | search
  long index = 0;      // k with |T^k x - y| <= tol when verdict is yes
  double closest_distance = 0.0;
  long closest_index = 0;
  bool forward_only = false;
  std::string note;
  std::vector<std::pair<std::string, double>> phi_x, phi_y;
};

/// Semi-decision: a sound NO from the invariant filter (or from a fixed
/// point), a sound YES from the orbit search, otherwise INCONCLUSIVE. When
/// `filters` is empty and the map is alternating play, its closed-form
/// invariant is used.
SameOrbitResult same_orbit(const MapInstance& map, const State& x, const State& y,
                           std::size_t max_iter, double tol,
                           const std::vector<Invariant>& filters = {},
                           const OrbitOptions& opts = {});

}  // namespace orbitlab
