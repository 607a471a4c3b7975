#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pagesel {

/// Base for all tool-level failures (bad input, capacity, instance bounds).
/// The CLI maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ParseError : public Error {
 public:
  ParseError(uint32_t line, uint32_t col, const std::string& msg)
      : Error("parse error at " + std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
        line_(line),
        col_(col) {}

  uint32_t line() const { return line_; }
  uint32_t col() const { return col_; }

 private:
  uint32_t line_;
  uint32_t col_;
};

/// A page cannot hold what was assigned to it.
class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& msg) : Error(msg) {}
};

/// Exhaustive enumeration refused (too many functions or pages).
class InstanceTooLargeError : public Error {
 public:
  explicit InstanceTooLargeError(const std::string& msg) : Error(msg) {}
};

/// The path oracle only handles acyclic CFGs and call graphs.
class CyclicProgramError : public Error {
 public:
  explicit CyclicProgramError(const std::string& msg) : Error(msg) {}
};

/// Generator spec cannot produce a valid program.
class InfeasibleSpecError : public Error {
 public:
  explicit InfeasibleSpecError(const std::string& msg) : Error(msg) {}
};

}  // namespace pagesel
