#pragma once

#include <stdexcept>
#include <string>

namespace lindyna {

/// Thrown when a caller breaks a documented precondition.
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

/// Thrown when a parameter vector leaves the finite range during learning or
/// planning. Carries the step index at which the guard tripped (-1 if the
/// caller did not supply one).
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, long step)
      : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

  long step() const { return step_; }

 private:
  long step_;
};

/// Thrown when a linear system is singular or numerically near-singular, i.e.
/// the planning problem has no usable fixed point.
class IllPosedError : public std::runtime_error {
 public:
  explicit IllPosedError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown on malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown on unreadable/unwritable files and malformed snapshots.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lindyna
