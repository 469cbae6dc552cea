#pragma once

#include <mpfr.h>

#include <utility>

namespace orbitlab {

/// Owning wrapper around an mpfr_t. Arithmetic is done through the free
/// mpfr_* functions on get(); this type only handles lifetime and precision.
class BigFloat {
 public:
  explicit BigFloat(mpfr_prec_t precision = 53) { mpfr_init2(value_, precision); mpfr_set_zero(value_, 1); }
  BigFloat(double v, mpfr_prec_t precision) {
    mpfr_init2(value_, precision);
    mpfr_set_d(value_, v, MPFR_RNDN);
  }
  BigFloat(const BigFloat& other) {
    mpfr_init2(value_, mpfr_get_prec(other.value_));
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  BigFloat(BigFloat&& other) noexcept {
    // Steal the limbs: leave `other` as a minimal valid number.
    mpfr_init2(value_, MPFR_PREC_MIN);
    mpfr_swap(value_, other.value_);
  }
  BigFloat& operator=(const BigFloat& other) {
    if (this != &other) {
      mpfr_set_prec(value_, mpfr_get_prec(other.value_));
      mpfr_set(value_, other.value_, MPFR_RNDN);
    }
    return *this;
  }
  BigFloat& operator=(BigFloat&& other) noexcept {
    mpfr_swap(value_, other.value_);
    return *this;
  }
  ~BigFloat() { mpfr_clear(value_); }

  mpfr_ptr get() noexcept { return value_; }
  mpfr_srcptr get() const noexcept { return value_; }
  mpfr_prec_t precision() const noexcept { return mpfr_get_prec(value_); }

  /// Raises the precision without changing the value (exact for increases).
  void widen(mpfr_prec_t precision) {
    if (precision > mpfr_get_prec(value_)) mpfr_prec_round(value_, precision, MPFR_RNDN);
  }
  /// Changes the precision and discards the value.
  void reset(mpfr_prec_t precision) { mpfr_set_prec(value_, precision); }

  double to_double() const noexcept { return mpfr_get_d(value_, MPFR_RNDN); }
  /// Binary exponent (value = m * 2^exp with 0.5 <= |m| < 1); 0 for zero.
  long exponent() const noexcept {
    return mpfr_regular_p(value_) ? static_cast<long>(mpfr_get_exp(value_)) : 0;
  }

 private:
  mpfr_t value_;
};

}  // namespace orbitlab
