#pragma once

#include <stdexcept>
#include <string>

namespace sparse_jacobi {

// Input outside the domain of an operation (lambda outside (-2, 2), p outside (0, 1], ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed model or configuration data; the message names the offending field or index.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical target could not be met. Carries the best estimate achieved.
class ToleranceError : public std::runtime_error {
 public:
  ToleranceError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

// Multi-precision recomputation disagreed with itself.
class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sparse_jacobi
