#pragma once

#include "orbitlab/dynamics.hpp"
#include "orbitlab/maps.hpp"
#include "orbitlab/payoff.hpp"
#include "orbitlab/state.hpp"

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace orbitlab {

/// Bounded continuous weights p for the series invariant.
class WeightFunction {
 public:
  struct Constant { double c; };
  struct Coordinate { Eigen::Index index; };
  struct GaussianBump { Eigen::VectorXd center; double width; };

  static WeightFunction constant(double c) { return WeightFunction(Constant{c}); }
  static WeightFunction coordinate(Eigen::Index i) { return WeightFunction(Coordinate{i}); }
  static WeightFunction gaussian_bump(Eigen::VectorXd center, double width);

  double operator()(const State& x) const;
  std::string describe() const;
  bool is_constant() const noexcept { return std::holds_alternative<Constant>(kind_); }

 private:
  using Kind = std::variant<Constant, Coordinate, GaussianBump>;
  explicit WeightFunction(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

/// Phi(X, Y) = |X|^2/eta1 - |Y|^2/eta2 + <X, A Y>.
double bipartite_invariant(const Payoff& payoff, double eta1, double eta2, const State& xy);

struct SeriesOptions {
  std::size_t n = 64;             // symmetric truncation depth
  bool auto_stop = true;          // stop once both increments drop below stop_threshold
  double stop_threshold = 1e-14;
  std::size_t divergence_window = 32;
  std::size_t defect_horizon = 0;  // fill per_step_defect for k = 1..defect_horizon
  OrbitOptions orbit;
};

struct InvariantReport {
  double value = 0.0;  // NaN when divergent
  std::size_t truncation_n = 0;
  std::vector<double> per_step_defect;  // |Phi(T^k x) - Phi(x)| / (1 + |Phi(x)|), k = 1..horizon
  /// Partial sums in the order term_0, term_1, term_-1, term_2, term_-2, ...
  std::vector<double> partial_sums;
  double tail_estimate = 0.0;
  bool fixed_point = false;
  bool one_sided = false;  // backward half cut short by an inversion failure
  std::size_t backward_depth = 0;  // backward terms actually evaluated
  std::string bias_note;
  bool divergent = false;
  bool auto_stopped = false;
  double forward_endpoint_f = 0.0;   // f(T^n x)
  double backward_endpoint_f = 0.0;  // f(T^{-n-1} x)
};

/// Truncated sum_{k=-n}^{n} p(T^k x) (f(T^{k-1} x) - f(T^k x)) with f the
/// map's objective.
InvariantReport series_invariant(const MapInstance& map, const WeightFunction& p,
                                 const State& x, const SeriesOptions& opts = {});

/// A scalar function of the state, used as a candidate constant of motion.
class Invariant {
 public:
  struct BipartiteForm {
    Payoff payoff;
    double eta1, eta2;
  };

  static Invariant closed_form(Payoff payoff, double eta1, double eta2);
  static Invariant series(MapInstance map, WeightFunction p, SeriesOptions opts = {});
  static Invariant constant(double c);
  static Invariant custom(std::string id, std::function<double(const State&)> fn);

  double operator()(const State& x) const { return fn_(x); }
  const std::string& id() const noexcept { return id_; }
  const BipartiteForm* bipartite_form() const noexcept {
    return form_ ? &*form_ : nullptr;
  }
  /// True when this is the closed form for exactly this alternating-play map.
  bool is_closed_form_for(const MapInstance& map) const;

 private:
  Invariant(std::string id, std::function<double(const State&)> fn)
      : id_(std::move(id)), fn_(std::move(fn)) {}

  std::string id_;
  std::function<double(const State&)> fn_;
  std::optional<BipartiteForm> form_;
};

/// max_{1<=k<=horizon} |Phi(T^k x) - Phi(x)| / (1 + |Phi(x)|).
///
/// The closed form on its own alternating-play map is evaluated on the
/// extended-precision orbit; everything else iterates in double.
double invariance_defect(const Invariant& phi, const MapInstance& map, const State& x,
                         std::size_t horizon);

/// Per-step values |Phi(T^k x) - Phi(x)| / (1 + |Phi(x)|) for k = 1..horizon.
std::vector<double> invariance_defect_trace(const Invariant& phi, const MapInstance& map,
                                            const State& x, std::size_t horizon);

struct RankResult {
  Eigen::MatrixXd matrix;
  Eigen::Index rank = 0;
  Eigen::VectorXd singular_values;
};

/// H = [[2/eta1 I, A], [A^T, -2/eta2 I]] and its numerical rank
/// (singular values above 1e-10 sigma_max).
RankResult dphi_rank(const Payoff& payoff, double eta1, double eta2);

}  // namespace orbitlab
