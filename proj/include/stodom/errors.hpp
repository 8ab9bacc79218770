#pragma once

#include <stdexcept>
#include <string>

namespace stodom {

/// A parameter or input violates a documented precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A requested density or intensity lies on the wrong side of a domination
/// threshold, so the requested coupling cannot exist.
class ThresholdViolation : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// An ordering or consistency property that must hold on every realization
/// was observed to fail. Never caught inside the library.
class AssertionFailure : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

inline void ensure(bool ok, const std::string& what) {
  if (!ok) throw AssertionFailure(what);
}

}  // namespace detail
}  // namespace stodom
