#pragma once

#include <stdexcept>
#include <string>

namespace deskcech {

// Bad input values: non-positive weights, non-nested boxes, gamma <= 1 ...
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The caller broke an operation's contract (kernel conditions, pattern, contraction).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A solve that should succeed did not within tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace deskcech
