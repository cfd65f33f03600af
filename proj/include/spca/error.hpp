#pragma once

#include <stdexcept>
#include <string>

namespace spca {

/// Error categories. Each maps to exactly one CLI exit code.
enum class ErrorKind {
  parameter,     // bad argument / violated precondition          -> 1
  numerical,     // solver non-convergence, degenerate input      -> 2
  construction,  // instance cannot be built / certificate failed -> 2
  io,            // missing file, malformed input                 -> 3
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what) : Error(ErrorKind::parameter, what) {}
};

class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double residual = 0.0)
      : Error(ErrorKind::numerical, what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Thrown by solvers whose input leaves the output undefined (e.g. an all-zero thresholded matrix).
class DegenerateError : public NumericalError {
 public:
  explicit DegenerateError(const std::string& what) : NumericalError(what) {}
};

class ConstructionError : public Error {
 public:
  explicit ConstructionError(const std::string& what) : Error(ErrorKind::construction, what) {}
};

/// A covariance profile that violates the model assumptions of the requested operation.
class InstanceError : public ConstructionError {
 public:
  explicit InstanceError(const std::string& what) : ConstructionError(what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

class ParseError : public IoError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : IoError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

int exit_code(ErrorKind kind) noexcept;

}  // namespace spca
