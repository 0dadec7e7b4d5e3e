#pragma once

#include <stdexcept>
#include <string>

namespace nlsim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

// Bad arguments or configuration.
class ValidationError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "validation"; }
};

// Overflow, non-convergence, blow-up guard trips.
class NumericalError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "numerical"; }
};

// A statistical acceptance check did not hold.
class StatisticalError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "statistical"; }
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw ValidationError(what);
}

}  // namespace nlsim
