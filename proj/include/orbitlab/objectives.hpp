#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>

namespace orbitlab {

/// Compact working region: an axis-aligned box or a closed ball.
class Region {
 public:
  static Region box(Eigen::VectorXd lo, Eigen::VectorXd hi);
  static Region cube(Eigen::Index dim, double half_width);
  static Region ball(Eigen::VectorXd center, double radius);

  bool contains(const Eigen::VectorXd& x, double slack = 0.0) const;
  Eigen::VectorXd sample(std::mt19937_64& rng) const;
  Eigen::Index dim() const;

  bool is_box() const noexcept { return is_box_; }
  const Eigen::VectorXd& lo() const noexcept { return lo_; }
  const Eigen::VectorXd& hi() const noexcept { return hi_; }
  double radius() const noexcept { return radius_; }

 private:
  bool is_box_ = true;
  Eigen::VectorXd lo_, hi_;  // for a ball: lo_ holds the center
  double radius_ = 0.0;
};

/// A smooth objective with analytic derivatives.
///
/// `hessian_entry_bound` is a uniform bound L on |d2f/dxi dxj| over the
/// working region (or the whole space when no region is declared).
class Objective {
 public:
  using ScalarFn = std::function<double(const Eigen::VectorXd&)>;
  using VectorFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
  using MatrixFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

  struct Definition {
    std::string name;
    Eigen::Index dimension = 0;
    ScalarFn value;
    VectorFn gradient;
    std::optional<MatrixFn> hessian;
    std::optional<double> hessian_entry_bound;
    std::optional<Region> region;
    bool bounded = false;  // |f| bounded on the whole domain
  };

  explicit Objective(Definition def);

  const std::string& name() const noexcept { return def_.name; }
  Eigen::Index dimension() const noexcept { return def_.dimension; }
  double value(const Eigen::VectorXd& x) const { return def_.value(x); }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const { return def_.gradient(x); }
  bool has_hessian() const noexcept { return def_.hessian.has_value(); }
  /// Analytic Hessian, or central differences of the gradient when absent.
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const;
  const std::optional<double>& hessian_entry_bound() const noexcept {
    return def_.hessian_entry_bound;
  }
  const std::optional<Region>& region() const noexcept { return def_.region; }
  bool bounded() const noexcept { return def_.bounded; }

 private:
  Definition def_;
};

using ObjectivePtr = std::shared_ptr<const Objective>;

namespace catalog {

/// f(x) = 1/2 |x|^2, L = 1.
ObjectivePtr quadratic(Eigen::Index dim);
/// f(x, y) = <x, A y> on R^{k1 + k2}, L = max |A_ij|.
ObjectivePtr bilinear(const Eigen::MatrixXd& a);
/// f(x) = x^4/4 - x^2/2 restricted to [-w, w]; L = max |3x^2 - 1| there.
ObjectivePtr double_well(double half_width = 1.5);
/// f(x) = <c, x>; intended for simplex products. L = 0.
ObjectivePtr linear(Eigen::VectorXd c);
/// f(x) = -1 / (1 + |x|^2); bounded, L = 2.
ObjectivePtr bump(Eigen::Index dim);

}  // namespace catalog

enum class VerdictStatus { accept, reject, unverifiable };

struct StepSizeVerdict {
  VerdictStatus status = VerdictStatus::unverifiable;
  double eta = 0.0;
  double bound = 0.0;   // strict upper limit on eta
  double margin = 0.0;  // bound - eta
  std::optional<double> lipschitz;  // L used to form the bound
  bool estimated = false;           // L came from sampling, not a declaration

  bool accepted() const noexcept { return status == VerdictStatus::accept; }
};

std::string_view to_string(VerdictStatus status);

/// Samples |d2f/dxi dxj| over the region and returns 1.25 times the maximum.
double estimate_hessian_entry_bound(const Objective& obj, int samples = 1000,
                                    std::uint64_t seed = 0x5eed);

/// Accepts iff eta < 2 / (d L) with d the ambient dimension.
///
/// Uses the declared L when present; otherwise falls back to a sampled
/// estimate when the objective has a region, and reports `unverifiable`
/// when it has neither.
StepSizeVerdict validate_step_size_gd(const Objective& obj, double eta);

/// Largest sampled |grad fhat_x(s) - grad fhat_x(0)| / |s| for the pullback
/// fhat_x = f o Retr_x on the unit sphere, times the 1.25 safety factor.
double estimate_pullback_lipschitz(const Objective& obj, int samples = 1000,
                                   double radius = 0.5,
                                   std::uint64_t seed = 0x5eed);

/// Accepts iff eta < 1 / L. When `lipschitz` is empty it is estimated with
/// estimate_pullback_lipschitz and the verdict is marked estimated.
StepSizeVerdict validate_step_size_manifold(const Objective& obj, double eta,
                                            std::optional<double> lipschitz);

/// Central finite-difference gradient; used by tests and the L estimator.
Eigen::VectorXd finite_difference_gradient(const Objective& obj,
                                           const Eigen::VectorXd& x,
                                           double h = 1e-6);

}  // namespace orbitlab
