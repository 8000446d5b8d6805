#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sirl {

// Malformed or inconsistent configuration. `field` is a dotted path such as
// "cost.lambda" when the problem can be pinned to one entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// An input outside the domain of a function (e.g. |u_i| > lambda).
class DomainError : public std::domain_error {
 public:
  DomainError(int component, const std::string& what)
      : std::domain_error(what), component_(component) {}
  int component() const { return component_; }

 private:
  int component_;
};

// The plant trajectory left the region the run can handle.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double time, Eigen::VectorXd state)
      : std::runtime_error(what), time_(time), state_(std::move(state)) {}
  double time() const { return time_; }
  const Eigen::VectorXd& state() const { return state_; }

 private:
  double time_;
  Eigen::VectorXd state_;
};

// NaN/Inf in learner quantities, or an iterative solver that did not converge.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what, double time = 0.0)
      : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

}  // namespace sirl
