#pragma once

#include "orbitlab/objectives.hpp"
#include "orbitlab/payoff.hpp"
#include "orbitlab/state.hpp"

#include <Eigen/Core>

#include <optional>
#include <string_view>
#include <vector>

namespace orbitlab {

enum class MapKind { gd, mwu_exp, mwu_lin, alt_play, rgd_sphere };
enum class InverseStrategy { closed_form, newton, unavailable };

std::string_view to_string(MapKind kind);
MapKind map_kind_from_string(std::string_view name);
std::string_view to_string(InverseStrategy strategy);

/// One concrete update rule T with its parameters. Immutable; cheap to copy
/// (the objective is shared).
class MapInstance {
 public:
  static MapInstance gd(ObjectivePtr objective, double eta);
  static MapInstance mwu_exp(ObjectivePtr objective, std::vector<double> eps,
                             std::vector<Eigen::Index> blocks);
  static MapInstance mwu_lin(ObjectivePtr objective, std::vector<double> eps,
                             std::vector<Eigen::Index> blocks);
  static MapInstance alt_play(Payoff payoff, double eta1, double eta2);
  static MapInstance rgd_sphere(ObjectivePtr objective, double eta,
                                std::optional<double> lipschitz = std::nullopt);

  MapKind kind() const noexcept { return kind_; }
  const Objective& objective() const noexcept { return *objective_; }
  const ObjectivePtr& objective_ptr() const noexcept { return objective_; }
  const std::vector<double>& step_sizes() const noexcept { return step_sizes_; }
  double eta() const { return step_sizes_.at(0); }
  const std::optional<Payoff>& payoff() const noexcept { return payoff_; }
  const std::vector<Eigen::Index>& blocks() const noexcept { return blocks_; }
  InverseStrategy inverse_strategy() const noexcept { return inverse_; }
  Chart chart() const noexcept;
  Eigen::Index dimension() const noexcept { return objective_->dimension(); }

  /// False when the step size was rejected or could not be checked.
  bool validated() const noexcept { return validated_; }
  const std::optional<StepSizeVerdict>& verdict() const noexcept { return verdict_; }

  /// The objective f at a state (for alternating play: the shared payoff).
  double value(const State& x) const { return objective_->value(x.coords()); }

  /// A state on this map's chart with the given coordinates.
  State make_state(Eigen::VectorXd coords) const;

  /// Throws DomainError if x is not on this map's chart.
  void check_domain(const State& x) const;

 private:
  MapInstance() = default;
  static MapInstance mwu(MapKind kind, ObjectivePtr objective, std::vector<double> eps,
                         std::vector<Eigen::Index> blocks);

  MapKind kind_ = MapKind::gd;
  ObjectivePtr objective_;
  std::vector<double> step_sizes_;
  std::optional<Payoff> payoff_;
  std::vector<Eigen::Index> blocks_;
  InverseStrategy inverse_ = InverseStrategy::newton;
  bool validated_ = false;
  std::optional<StepSizeVerdict> verdict_;
};

struct StepResult {
  State next;
  /// Largest |block sum - 1| (simplex) or |norm - 1| (sphere) before the
  /// final renormalization; zero for charts without a constraint.
  double renorm_defect = 0.0;
};

// Individual update rules. All of them are pure.

/// x - eta grad f(x).
Eigen::VectorXd gd_step(const Objective& obj, double eta, const Eigen::VectorXd& x);

StepResult mwu_exp_step(const Objective& obj, const std::vector<double>& eps,
                        const State& x);
/// Throws StepSizeError when some factor 1 - eps_i df/dx_ij is not positive.
StepResult mwu_lin_step(const Objective& obj, const std::vector<double>& eps,
                        const State& x);

/// X <- X + eta1 A Y, then Y <- Y + eta2 A^T X (using the new X).
State alt_play_step(const Payoff& payoff, double eta1, double eta2, const State& xy);
/// Closed-form inverse of alt_play_step.
State alt_play_inverse(const Payoff& payoff, double eta1, double eta2, const State& xy);

/// (x + s) / |x + s|.
Eigen::VectorXd retract_sphere(const Eigen::VectorXd& x, const Eigen::VectorXd& s);
/// (I - x x^T) grad f(x).
Eigen::VectorXd riemannian_gradient(const Objective& obj, const Eigen::VectorXd& x);
StepResult rgd_sphere_step(const Objective& obj, double eta, const State& x);

/// Dispatches on the map kind; validates the chart first.
StepResult step_detailed(const MapInstance& map, const State& x);
State step(const MapInstance& map, const State& x);

/// Ambient Jacobian of T at x. For MWU this is the Jacobian of the
/// normalizer form x_ij w_ij / sum_s x_is w_is, valid off the simplex too.
Eigen::MatrixXd jacobian(const MapInstance& map, const Eigen::VectorXd& x);

/// The MWU update evaluated in normalizer form on arbitrary positive ambient
/// coordinates (no chart checks). Used by the Newton inverse.
Eigen::VectorXd mwu_ambient(const MapInstance& map, const Eigen::VectorXd& x);

/// Orthonormal basis of the tangent space of the simplex product
/// (block-wise zero-sum vectors).
Eigen::MatrixXd simplex_tangent_basis(const std::vector<Eigen::Index>& blocks);

struct DiffeomorphismCheck {
  bool passed = false;
  double min_factor = 0.0;       // smallest multiplicative factor seen
  double min_determinant = 0.0;  // smallest tangent Jacobian determinant
  int samples = 0;
};

/// Spot-checks an MWU instance at random interior points: every factor must
/// be positive and the tangent Jacobian determinant must be positive.
DiffeomorphismCheck mwu_diffeomorphism_check(const MapInstance& map, int samples = 64,
                                             std::uint64_t seed = 0x5eed);

}  // namespace orbitlab
