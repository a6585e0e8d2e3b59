#pragma once

#include <stdexcept>
#include <string>

namespace hng {

// Exit codes shared with the CLI: 1 usage, 2 data, 3 numeric/degenerate.
class Error : public std::runtime_error {
public:
  Error(const std::string& msg, int exit_code)
      : std::runtime_error(msg), exit_code_(exit_code) {}
  int exit_code() const { return exit_code_; }

private:
  int exit_code_;
};

// Bad argument values: NaN/Inf entries, dimension mismatches, out-of-range
// indices, asymmetric distance matrices.
class InvalidInputError : public Error {
public:
  explicit InvalidInputError(const std::string& msg) : Error(msg, 2) {}
};

// File I/O and parse failures; messages carry file (and line) context.
class DataError : public Error {
public:
  explicit DataError(const std::string& msg) : Error(msg, 2) {}
};

// Fewer samples than the operation can work with.
class InsufficientDataError : public Error {
public:
  explicit InsufficientDataError(const std::string& msg) : Error(msg, 2) {}
};

// Point on or outside the unit ball.
class DomainError : public Error {
public:
  explicit DomainError(const std::string& msg) : Error(msg, 3) {}
};

// Inputs that admit no meaningful result (all-zero feature matrix,
// infeasible synthetic generation).
class DegenerateInputError : public Error {
public:
  explicit DegenerateInputError(const std::string& msg) : Error(msg, 3) {}
};

// Singular normal equations at lambda = 0.
class IllConditionedError : public Error {
public:
  explicit IllConditionedError(const std::string& msg) : Error(msg, 3) {}
};

// Graph shape unusable for the requested operation (isolated vertex).
class TopologyError : public Error {
public:
  explicit TopologyError(const std::string& msg) : Error(msg, 3) {}
};

}  // namespace hng
