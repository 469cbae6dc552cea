#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace orbitlab {

/// A state does not satisfy the invariants of its chart, or an operation was
/// handed a state outside the map's domain.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The step size pushes a multiplicative factor (or similar) out of the
/// admissible range. `coordinate` is the offending ambient index.
class StepSizeError : public std::runtime_error {
 public:
  StepSizeError(const std::string& what, Eigen::Index coordinate)
      : std::runtime_error(what), coordinate_(coordinate) {}
  Eigen::Index coordinate() const noexcept { return coordinate_; }

 private:
  Eigen::Index coordinate_;
};

/// Newton-type inversion failed to converge or left the certified region.
class InversionError : public std::runtime_error {
 public:
  InversionError(const std::string& what, Eigen::VectorXd last_iterate,
                 double residual)
      : std::runtime_error(what),
        last_iterate_(std::move(last_iterate)),
        residual_(residual) {}

  const Eigen::VectorXd& last_iterate() const noexcept { return last_iterate_; }
  double residual() const noexcept { return residual_; }

  /// Orbit index (negative, backward) at which the failure happened; 0 when
  /// raised by a single inverse_step call.
  long index() const noexcept { return index_; }
  InversionError with_index(long index) const {
    InversionError copy = *this;
    copy.index_ = index;
    return copy;
  }

 private:
  Eigen::VectorXd last_iterate_;
  double residual_;
  long index_ = 0;
};

/// Non-finite values or similar breakdowns while iterating a map.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, long index)
      : std::runtime_error(what), index_(index) {}
  long index() const noexcept { return index_; }

 private:
  long index_;
};

}  // namespace orbitlab
