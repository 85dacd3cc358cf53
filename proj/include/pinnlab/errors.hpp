#ifndef PINNLAB_ERRORS_HPP
#define PINNLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pinnlab {

// Bad shapes, inconsistent settings, counts exceeding capacity.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A loss or gradient evaluation produced a non-finite value, or the
// loss guard tripped. Carries the offending value when known.
struct DivergenceError : std::runtime_error {
  explicit DivergenceError(const std::string& msg, double value = 0.0)
      : std::runtime_error(msg), offending_value(value) {}
  double offending_value;
};

// Value outside the admissible domain of an update rule (e.g. BBI with
// a non-positive potential).
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Not enough valid data points for a statistic.
struct InsufficientDataError : std::runtime_error {
  explicit InsufficientDataError(const std::string& msg)
      : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace pinnlab

#endif
