#pragma once

#include <stdexcept>
#include <string>

namespace phaseless {

/// Base for all library errors. The exit code is what the CLI returns.
class Error : public std::runtime_error {
 public:
  Error(std::string const& what, int exit_code)
      : std::runtime_error(what), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

/// Precondition or input validation failure.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::string const& what) : Error(what, 2) {}
};

/// File missing, unreadable, truncated or corrupted.
class IoError : public Error {
 public:
  explicit IoError(std::string const& what) : Error(what, 3) {}
};

/// Requested work exceeds the configured budget.
class BudgetError : public Error {
 public:
  explicit BudgetError(std::string const& what) : Error(what, 4) {}
};

}  // namespace phaseless
