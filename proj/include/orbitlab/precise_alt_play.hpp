#pragma once

#include "orbitlab/bigfloat.hpp"
#include "orbitlab/payoff.hpp"
#include "orbitlab/state.hpp"

#include <array>
#include <vector>

namespace orbitlab {

/// Alternating play iterated in extended precision.
///
/// The map is linear and hyperbolic, so |z_t| grows geometrically and the
/// quadratic invariant is a difference of terms of size |z_t|^2 / eta. The
/// working precision is raised before every step so that the rounding error
/// in Phi stays around 2^-64 relative to 1 + |Phi|. Step sizes and payoff
/// entries are taken exactly from their double values.
class PreciseAltPlay {
 public:
  PreciseAltPlay(const Payoff& payoff, double eta1, double eta2, const State& start);

  void step();
  /// Closed-form inverse step.
  void step_back();

  /// Current index t (negative after step_back from the origin).
  long index() const noexcept { return index_; }
  mpfr_prec_t precision() const noexcept { return precision_; }

  /// Current state rounded to double (coordinates may overflow to +-inf).
  State state() const;
  /// Phi(start) evaluated in double plus the extended-precision drift
  /// Phi_t - Phi_0, so the value matches bipartite_invariant at t = 0.
  double phi() const;
  /// bipartite_invariant at the starting state.
  double phi_initial() const { return phi0_double_; }
  /// |Phi_t - Phi_0| / (1 + |Phi_0|), evaluated before rounding.
  double relative_defect() const;
  /// <X, A Y> at the current state.
  double payoff_value() const;
  /// Euclidean distance to another tracker of the same dimension.
  double distance_to(const PreciseAltPlay& other) const;

 private:
  void raise_precision();
  const BigFloat& evaluate_scaled_phi() const;
  double scaled_drift() const;

  std::vector<std::vector<double>> a_;  // assembled payoff, row-major
  double eta1_, eta2_;
  std::vector<BigFloat> x_, y_;
  BigFloat phi0_;  // eta1 eta2 Phi at the start
  mutable std::array<BigFloat, 6> scratch_;
  double phi0_double_ = 0.0;
  long index_ = 0;
  mpfr_prec_t precision_;
  mpfr_prec_t scale_bits_;  // log2 of the constants multiplying |z|^2 in Phi
};

}  // namespace orbitlab
