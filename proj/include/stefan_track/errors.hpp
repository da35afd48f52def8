#pragma once

#include <stdexcept>
#include <string>

namespace stefan_track {

/// A parameter set violates a model assumption or a type invariant.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A series evaluation fell outside its radius of convergence or failed the tail test.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The interface left the admissible band s_floor <= s < L.
class DomainViolation : public std::runtime_error {
 public:
  DomainViolation(const std::string& what, double time) : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

}  // namespace stefan_track
