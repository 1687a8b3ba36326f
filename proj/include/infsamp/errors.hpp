#pragma once

#include <stdexcept>
#include <string>

namespace infsamp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input violates a structural invariant (non-CPTP Kraus set, bad arity, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Requested size exceeds a configured resource cap.
class SizeError : public Error {
 public:
  using Error::Error;
};

// The data at hand cannot answer the question asked, e.g. a multi-qubit
// overlap probability requested from marginal-only counts.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace infsamp
