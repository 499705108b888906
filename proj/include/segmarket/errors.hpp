#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace segmarket {

/// Base class for all toolkit errors. `code` is a stable machine-readable
/// identifier (e.g. "bad_argument", "non_triviality") used by the CLI to
/// build diagnostic payloads.
class error : public std::runtime_error {
 public:
  error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// Invalid input: bad argument values, domain violations, malformed
/// scenarios. Maps to CLI exit code 2.
class validation_error : public error {
 public:
  using error::error;
};

/// A maintained model assumption fails for the given primitives (e.g. the
/// non-triviality requirement on the surplus split). Maps to exit code 4.
class assumption_error : public error {
 public:
  using error::error;
};

/// Internal numerical failure: bracket not found, LP did not converge,
/// infeasible planner problem. Maps to exit code 3.
class solver_error : public error {
 public:
  using error::error;
};

}  // namespace segmarket
