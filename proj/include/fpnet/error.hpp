#pragma once

#include <stdexcept>
#include <string>

namespace fpnet {

/// Invalid construction input: malformed matrices, out-of-range blocks,
/// inconsistent problem instances, bad CLI configuration.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// A source loop that cannot be solved algebraically.
class SingularLoopError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// The iteration produced a non-finite value.
class DivergedError : public std::runtime_error {
 public:
  explicit DivergedError(const std::string& what) : std::runtime_error(what) {}
};

/// A state that was required to be a fixed point is not one.
class NotFixedPointError : public std::runtime_error {
 public:
  NotFixedPointError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Reference solver did not reach its tolerance within budget.
class OracleError : public std::runtime_error {
 public:
  explicit OracleError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fpnet
