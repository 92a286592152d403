#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace exo {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Model description rejected at construction (bad tables, non-bijective
/// action, failed homomorphism check, malformed JSON).
class InvalidModel : public Error {
 public:
  using Error::Error;
};

/// compose() called on a pair with source(g) != range(h). A caller bug.
class NotComposable : public Error {
 public:
  using Error::Error;
};

class InvalidMeasure : public Error {
 public:
  using Error::Error;
};

class InvalidKernel : public Error {
 public:
  using Error::Error;
};

class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

/// The model lacks the exponential growth needed for exotic completions.
class SubexponentialGrowth : public Error {
 public:
  using Error::Error;
};

/// An enumeration or support guard would be exceeded. Never silently
/// truncated; `required()` reports what the call would have needed.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& what, double required, double budget)
      : Error(what + ": requires " + fmt(required) + ", budget " + fmt(budget)),
        required_(required),
        budget_(budget) {}

  double required() const noexcept { return required_; }
  double budget() const noexcept { return budget_; }

 private:
  static std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.0f", v);
    return buf;
  }

  double required_;
  double budget_;
};

}  // namespace exo
