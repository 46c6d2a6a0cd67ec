#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace aamkit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (wrong shape, point outside its
/// set, empty set, infeasible parameters).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A projection oracle failed inside an iteration of the engine.
class ProjectionError : public Error {
 public:
  ProjectionError(std::size_t iteration, const std::string& what)
      : Error("projection failed at iteration " + std::to_string(iteration) +
              ": " + what),
        iteration_(iteration) {}

  std::size_t iteration() const { return iteration_; }

 private:
  std::size_t iteration_;
};

/// Should be unreachable for valid inputs; raised instead of silently clamping.
class InternalError : public Error {
 public:
  using Error::Error;
};

/// Scenario configuration failed to parse or validate. Carries every problem
/// found, not only the first.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems)
      : Error(join(problems)), problems_(std::move(problems)) {}

  const std::vector<std::string>& problems() const { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& problems) {
    std::string out;
    for (const auto& p : problems) {
      if (!out.empty()) out += "; ";
      out += p;
    }
    return out;
  }

  std::vector<std::string> problems_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class CorruptTraceError : public Error {
 public:
  CorruptTraceError(std::size_t row, const std::string& what)
      : Error("corrupt trace at row " + std::to_string(row) + ": " + what),
        row_(row) {}

  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

}  // namespace aamkit
