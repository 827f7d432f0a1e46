#pragma once

#include <stdexcept>
#include <string>

namespace supercrit {

/// Thrown when an argument violates an operation's precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed text or binary input; carries the offending line when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, long line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

/// The time integrator produced non-finite values or runaway energy growth.
class BlowUp : public std::runtime_error {
 public:
  BlowUp(const std::string& what, double time, long step)
      : std::runtime_error(what), time_(time), step_(step) {}
  double time() const { return time_; }
  long step() const { return step_; }

 private:
  double time_;
  long step_;
};

}  // namespace supercrit
