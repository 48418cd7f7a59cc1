#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace suslab {

/// Input outside the domain of an operation (e.g. x not in [0,1)).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Data that cannot describe a bijection (e.g. a point outside every image interval).
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A construction parameter violates a hard constraint such as 0 < b_i < l_i/2.
class ConstraintViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Quadrature or iteration failed to reach its tolerance.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The roof was asked for a value inside the exclusion band around a breakpoint,
/// where r is treated as infinite.
class SingularityProximity : public std::runtime_error {
 public:
  SingularityProximity(std::size_t interval, double offset, double length)
      : std::runtime_error("point within exclusion band of interval " + std::to_string(interval) +
                           " (offset " + std::to_string(offset) + ", length " +
                           std::to_string(length) + ")"),
        interval_(interval),
        offset_(offset) {}

  std::size_t interval() const noexcept { return interval_; }
  double offset() const noexcept { return offset_; }

 private:
  std::size_t interval_;
  double offset_;
};

}  // namespace suslab
