#pragma once

#include <Eigen/Core>

#include <string_view>
#include <vector>

namespace orbitlab {

enum class Chart { euclidean, simplex_product, sphere, bipartite_pair };

std::string_view to_string(Chart chart);
Chart chart_from_string(std::string_view name);

// Tolerances on chart membership.
inline constexpr double kSimplexSumTolerance = 1e-12;
inline constexpr double kSimplexNegativeTolerance = 1e-12;
inline constexpr double kSphereNormTolerance = 1e-12;

/// A point of the phase space together with the chart it lives on.
///
/// `blocks` is the partition of the coordinates: one entry per simplex for
/// the simplex-product chart, exactly two entries (|X|, |Y|) for the
/// bipartite-pair chart, and empty otherwise.
class State {
 public:
  State() = default;
  explicit State(Eigen::VectorXd coords, Chart chart = Chart::euclidean,
                 std::vector<Eigen::Index> blocks = {});

  static State euclidean(Eigen::VectorXd coords) { return State(std::move(coords)); }
  static State scalar(double x);
  static State simplex(Eigen::VectorXd coords, std::vector<Eigen::Index> blocks);
  static State sphere(Eigen::VectorXd coords);
  static State bipartite(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

  const Eigen::VectorXd& coords() const noexcept { return coords_; }
  Chart chart() const noexcept { return chart_; }
  const std::vector<Eigen::Index>& blocks() const noexcept { return blocks_; }
  Eigen::Index dim() const noexcept { return coords_.size(); }
  double operator[](Eigen::Index i) const { return coords_[i]; }

  /// Same chart and partition, new coordinates.
  State with_coords(Eigen::VectorXd coords) const;

  /// Throws DomainError if the chart invariants do not hold.
  void validate() const;
  bool is_valid() const noexcept;

  /// X and Y halves of a bipartite-pair state.
  Eigen::VectorXd x_block() const;
  Eigen::VectorXd y_block() const;

 private:
  Eigen::VectorXd coords_;
  Chart chart_ = Chart::euclidean;
  std::vector<Eigen::Index> blocks_;
};

bool same_layout(const State& a, const State& b) noexcept;
double distance(const State& a, const State& b);

/// Divides every simplex block by its sum after clamping tiny negatives to
/// zero. Returns the largest pre-renormalization |block sum - 1|.
double renormalize_simplex(Eigen::VectorXd& coords,
                           const std::vector<Eigen::Index>& blocks);

}  // namespace orbitlab
