#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace forestlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside the mathematical domain of an operation (e.g. a walk
// dimension for which the conditioning event has probability zero).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A configured budget (vertices, steps, enumeration size) would be exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

class StepBudgetExceeded : public ResourceError {
 public:
  using ResourceError::ResourceError;
};

// Caller broke a precondition that is not a domain question.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed text input (edge lists, forest dumps, config files).
class FormatError : public Error {
 public:
  using Error::Error;
};

class StatisticalFailure : public Error {
 public:
  StatisticalFailure(const std::string& what, std::uint64_t attempts)
      : Error(what), attempts_(attempts) {}
  std::uint64_t attempts() const noexcept { return attempts_; }

 private:
  std::uint64_t attempts_;
};

}  // namespace forestlab
