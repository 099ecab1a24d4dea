#pragma once

#include <stdexcept>
#include <string>

namespace vmb {

// Base class for all library failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConstructionError : public Error { using Error::Error; };
class ConfigurationError : public Error { using Error::Error; };
class AssemblyError : public Error { using Error::Error; };
class ArgumentError : public Error { using Error::Error; };
class InfeasibleError : public Error { using Error::Error; };
class ConvergenceError : public Error { using Error::Error; };
class IntegrationError : public Error { using Error::Error; };
class CheckpointError : public Error { using Error::Error; };

/// Config parse failure carrying the 1-based line it refers to (0 when global).
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace vmb
