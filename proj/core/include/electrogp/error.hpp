#pragma once

#include <stdexcept>
#include <string>

namespace electrogp {

// Bad input: out-of-range coordinates, malformed files, inconsistent sizes.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A model file does not belong to the data it is paired with.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Cholesky breakdown after jitter escalation, exhausted rejection sampler, ...
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace electrogp
