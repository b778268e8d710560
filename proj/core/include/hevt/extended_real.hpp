#pragma once

#include <limits>

#include "hevt/errors.hpp"

namespace hevt {

/// A nonnegative quantity that may be infinite.
///
/// Moments, Wasserstein distances and relative entropies are finite only on
/// part of their natural domain. Divergence is reported as a value rather
/// than as a large float so that callers can tell "big" from "undefined".
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  constexpr ExtendedReal(double value) : value_(value) {}  // NOLINT(implicit)

  static constexpr ExtendedReal infinite() {
    ExtendedReal r;
    r.finite_ = false;
    r.value_ = std::numeric_limits<double>::infinity();
    return r;
  }

  constexpr bool is_finite() const { return finite_; }
  constexpr bool is_infinite() const { return !finite_; }

  // Throws DivergenceError when infinite.
  double value() const {
    if (!finite_) throw DivergenceError("quantity is infinite");
    return value_;
  }

  // +inf when infinite; convenient for comparisons and printing.
  constexpr double value_or_inf() const { return value_; }

  friend constexpr bool operator==(const ExtendedReal&, const ExtendedReal&) = default;

 private:
  double value_ = 0.0;
  bool finite_ = true;
};

}  // namespace hevt
