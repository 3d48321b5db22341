#pragma once

#include <stdexcept>
#include <string>

namespace aoisat {

enum class ErrorKind {
  config,
  lookup,
  contract,
  parse,
  io,
  infeasible,
  numeric,
  end_of_trace,
  unsupported,
};

/// Base of every error the library throws. The kind maps onto a CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

class LookupError : public Error {
 public:
  explicit LookupError(const std::string& what) : Error(ErrorKind::lookup, what) {}
};

class ContractError : public Error {
 public:
  explicit ContractError(const std::string& what) : Error(ErrorKind::contract, what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what) : Error(ErrorKind::infeasible, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

class EndOfTrace : public Error {
 public:
  EndOfTrace() : Error(ErrorKind::end_of_trace, "availability trace exhausted") {}
};

class UnsupportedError : public Error {
 public:
  explicit UnsupportedError(const std::string& what) : Error(ErrorKind::unsupported, what) {}
};

// Process exit codes used by the command-line tool.
inline int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::config:
    case ErrorKind::lookup:
    case ErrorKind::contract:
    case ErrorKind::unsupported:
      return 2;
    case ErrorKind::io:
      return 3;
    case ErrorKind::parse:
      return 4;
    case ErrorKind::infeasible:
      return 5;
    case ErrorKind::numeric:
      return 6;
    case ErrorKind::end_of_trace:
      return 7;
  }
  return 1;
}

}  // namespace aoisat
