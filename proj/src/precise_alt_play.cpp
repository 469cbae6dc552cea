#include "orbitlab/precise_alt_play.hpp"

#include "orbitlab/errors.hpp"
#include "orbitlab/invariants.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>

namespace orbitlab {

namespace {

constexpr mpfr_prec_t kGuardBits = 64;
constexpr mpfr_prec_t kDistanceBits = 64;

mpfr_prec_t ceil_log2(double v) {
  return static_cast<mpfr_prec_t>(std::ceil(std::log2(std::max(v, 1.0))));
}

// acc <- sum_j row[j] * v[j], skipping zero entries; tmp is scratch.
void dot_row(BigFloat& acc, BigFloat& tmp, const std::vector<double>& row,
             const std::vector<BigFloat>& v) {
  mpfr_set_zero(acc.get(), 1);
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (row[j] == 0.0) continue;
    mpfr_mul_d(tmp.get(), v[j].get(), row[j], MPFR_RNDN);
    mpfr_add(acc.get(), acc.get(), tmp.get(), MPFR_RNDN);
  }
}

void dot_col(BigFloat& acc, BigFloat& tmp, const std::vector<std::vector<double>>& a,
             std::size_t col, const std::vector<BigFloat>& v) {
  mpfr_set_zero(acc.get(), 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i][col] == 0.0) continue;
    mpfr_mul_d(tmp.get(), v[i].get(), a[i][col], MPFR_RNDN);
    mpfr_add(acc.get(), acc.get(), tmp.get(), MPFR_RNDN);
  }
}

}  // namespace

PreciseAltPlay::PreciseAltPlay(const Payoff& payoff, double eta1, double eta2,
                               const State& start)
    : eta1_(eta1), eta2_(eta2), precision_(kGuardBits + 53) {
  if (!(eta1 > 0.0) || !(eta2 > 0.0)) throw DomainError("step sizes must be positive");
  const Eigen::MatrixXd& a = payoff.assembled();
  if (start.chart() != Chart::bipartite_pair || start.blocks()[0] != a.rows() ||
      start.blocks()[1] != a.cols())
    throw DomainError("state does not match the payoff layout");
  if (!start.coords().allFinite()) throw DomainError("non-finite starting state");

  a_.assign(static_cast<std::size_t>(a.rows()), std::vector<double>(static_cast<std::size_t>(a.cols())));
  double abs_sum = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      a_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = a(i, j);
      abs_sum += std::abs(a(i, j));
    }
  // Bound on the constants in Phi and on the per-step amplification of
  // cancellation in X + eta1 A Y and Y + eta2 A^T X.
  scale_bits_ = ceil_log2(1.0 + 2.0 / eta1 + 2.0 / eta2 + abs_sum) +
                ceil_log2(1.0 + eta1 * abs_sum) + ceil_log2(1.0 + eta2 * abs_sum) +
                ceil_log2(static_cast<double>(a.size()) + 1.0) + 8;

  for (Eigen::Index i = 0; i < a.rows(); ++i) x_.emplace_back(start.coords()[i], precision_);
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    y_.emplace_back(start.coords()[a.rows() + j], precision_);
  for (BigFloat& v : scratch_) v.reset(precision_ + 32);
  raise_precision();
  phi0_ = evaluate_scaled_phi();
  phi0_double_ = bipartite_invariant(payoff, eta1, eta2, start);
}

void PreciseAltPlay::raise_precision() {
  long e = 0;
  for (const BigFloat& v : x_) e = std::max(e, v.exponent());
  for (const BigFloat& v : y_) e = std::max(e, v.exponent());
  const mpfr_prec_t steps_bits = ceil_log2(static_cast<double>(std::abs(index_)) + 2.0);
  const mpfr_prec_t needed =
      std::max<mpfr_prec_t>(53, kGuardBits + 2 * static_cast<mpfr_prec_t>(e) + scale_bits_ + steps_bits);
  if (needed <= precision_) return;
  // Grow in chunks so the widening cost is amortized.
  precision_ = needed + 64;
  for (BigFloat& v : x_) v.widen(precision_);
  for (BigFloat& v : y_) v.widen(precision_);
  for (BigFloat& v : scratch_) v.reset(precision_ + 32);
}

void PreciseAltPlay::step() {
  raise_precision();
  BigFloat& acc = scratch_[0];
  BigFloat& tmp = scratch_[1];
  for (std::size_t i = 0; i < x_.size(); ++i) {
    dot_row(acc, tmp, a_[i], y_);
    mpfr_mul_d(acc.get(), acc.get(), eta1_, MPFR_RNDN);
    mpfr_add(x_[i].get(), x_[i].get(), acc.get(), MPFR_RNDN);
  }
  for (std::size_t j = 0; j < y_.size(); ++j) {
    dot_col(acc, tmp, a_, j, x_);
    mpfr_mul_d(acc.get(), acc.get(), eta2_, MPFR_RNDN);
    mpfr_add(y_[j].get(), y_[j].get(), acc.get(), MPFR_RNDN);
  }
  ++index_;
}

void PreciseAltPlay::step_back() {
  raise_precision();
  BigFloat& acc = scratch_[0];
  BigFloat& tmp = scratch_[1];
  for (std::size_t j = 0; j < y_.size(); ++j) {
    dot_col(acc, tmp, a_, j, x_);
    mpfr_mul_d(acc.get(), acc.get(), eta2_, MPFR_RNDN);
    mpfr_sub(y_[j].get(), y_[j].get(), acc.get(), MPFR_RNDN);
  }
  for (std::size_t i = 0; i < x_.size(); ++i) {
    dot_row(acc, tmp, a_[i], y_);
    mpfr_mul_d(acc.get(), acc.get(), eta1_, MPFR_RNDN);
    mpfr_sub(x_[i].get(), x_[i].get(), acc.get(), MPFR_RNDN);
  }
  --index_;
}

// eta1 eta2 Phi = eta2 |X|^2 - eta1 |Y|^2 + eta1 eta2 <X, A Y>. Scaling by
// the step sizes keeps every operation a multiplication by a double.
const BigFloat& PreciseAltPlay::evaluate_scaled_phi() const {
  BigFloat& sx = scratch_[2];
  BigFloat& sy = scratch_[3];
  BigFloat& cross = scratch_[4];
  BigFloat& out = scratch_[5];
  BigFloat& acc = scratch_[0];
  BigFloat& tmp = scratch_[1];
  mpfr_set_zero(sx.get(), 1);
  mpfr_set_zero(sy.get(), 1);
  mpfr_set_zero(cross.get(), 1);
  for (const BigFloat& v : x_) {
    mpfr_sqr(tmp.get(), v.get(), MPFR_RNDN);
    mpfr_add(sx.get(), sx.get(), tmp.get(), MPFR_RNDN);
  }
  for (const BigFloat& v : y_) {
    mpfr_sqr(tmp.get(), v.get(), MPFR_RNDN);
    mpfr_add(sy.get(), sy.get(), tmp.get(), MPFR_RNDN);
  }
  for (std::size_t i = 0; i < x_.size(); ++i) {
    dot_row(acc, tmp, a_[i], y_);
    mpfr_mul(tmp.get(), acc.get(), x_[i].get(), MPFR_RNDN);
    mpfr_add(cross.get(), cross.get(), tmp.get(), MPFR_RNDN);
  }
  mpfr_mul_d(sx.get(), sx.get(), eta2_, MPFR_RNDN);
  mpfr_mul_d(sy.get(), sy.get(), eta1_, MPFR_RNDN);
  mpfr_mul_d(cross.get(), cross.get(), eta1_, MPFR_RNDN);
  mpfr_mul_d(cross.get(), cross.get(), eta2_, MPFR_RNDN);
  mpfr_sub(out.get(), sx.get(), sy.get(), MPFR_RNDN);
  mpfr_add(out.get(), out.get(), cross.get(), MPFR_RNDN);
  return out;
}

double PreciseAltPlay::scaled_drift() const {
  // Correctly rounded difference; a short mantissa suffices.
  BigFloat diff(kDistanceBits);
  mpfr_sub(diff.get(), evaluate_scaled_phi().get(), phi0_.get(), MPFR_RNDN);
  return diff.to_double();
}

State PreciseAltPlay::state() const {
  Eigen::VectorXd x(static_cast<Eigen::Index>(x_.size()));
  Eigen::VectorXd y(static_cast<Eigen::Index>(y_.size()));
  for (std::size_t i = 0; i < x_.size(); ++i) x[static_cast<Eigen::Index>(i)] = x_[i].to_double();
  for (std::size_t j = 0; j < y_.size(); ++j) y[static_cast<Eigen::Index>(j)] = y_[j].to_double();
  return State::bipartite(x, y);
}

double PreciseAltPlay::phi() const {
  return phi0_double_ + scaled_drift() / (eta1_ * eta2_);
}

double PreciseAltPlay::relative_defect() const {
  return std::abs(scaled_drift()) / (eta1_ * eta2_ * (1.0 + std::abs(phi0_double_)));
}

double PreciseAltPlay::payoff_value() const {
  const mpfr_prec_t p = precision_ + 32;
  BigFloat out(p), acc(p), tmp(p);
  for (std::size_t i = 0; i < x_.size(); ++i) {
    dot_row(acc, tmp, a_[i], y_);
    mpfr_mul(tmp.get(), acc.get(), x_[i].get(), MPFR_RNDN);
    mpfr_add(out.get(), out.get(), tmp.get(), MPFR_RNDN);
  }
  return out.to_double();
}

double PreciseAltPlay::distance_to(const PreciseAltPlay& other) const {
  if (other.x_.size() != x_.size() || other.y_.size() != y_.size())
    throw DomainError("distance between trackers of different dimension");
  BigFloat diff(kDistanceBits), sum(kDistanceBits);
  auto accumulate = [&](const std::vector<BigFloat>& a, const std::vector<BigFloat>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      mpfr_sub(diff.get(), a[i].get(), b[i].get(), MPFR_RNDN);
      mpfr_sqr(diff.get(), diff.get(), MPFR_RNDN);
      mpfr_add(sum.get(), sum.get(), diff.get(), MPFR_RNDN);
    }
  };
  accumulate(x_, other.x_);
  accumulate(y_, other.y_);
  mpfr_sqrt(sum.get(), sum.get(), MPFR_RNDN);
  return sum.to_double();
}

}  // namespace orbitlab
