#pragma once

#include <stdexcept>
#include <string>

namespace mixedts {

/// Argument outside the region where a transform is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Parameter values the closed forms do not cover (alpha == 1, or alpha == 2
/// where a Gaussian reduction must be used instead).
class UnsupportedParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parameter set violating its type invariants.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Not enough (distinct) observations for the requested statistic.
class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mixedts
