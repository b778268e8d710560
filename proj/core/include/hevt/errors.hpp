#pragma once

#include <stdexcept>
#include <string>

namespace hevt {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

// An argument lies outside the mathematical domain of the operation
// (negative Laplace argument, u outside (0,1), nonpositive support, ...).
class DomainError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "domain"; }
};

// A structural precondition on the inputs does not hold (unbalanced
// perturbation, unequal means for convex order, mismatched atoms).
class PreconditionError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "precondition"; }
};

// The tail-index regime excludes the requested quantity, e.g. p*gamma >= 1
// in the Frechet case where the p-th moment of the limit law is infinite.
class RegimeError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "regime"; }
};

// An integral that the operation needs is infinite or failed to converge.
class DivergenceError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "divergence"; }
};

// The tilt normalizer Z(eta) or one of its moments is not finite for the
// score/baseline pair.
class AdmissibilityError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "admissibility"; }
};

// Bracket expansion for a scalar root failed to find a sign change.
class BracketError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "bracket"; }
};

}  // namespace hevt
