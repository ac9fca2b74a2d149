#pragma once

#include <stdexcept>
#include <string>

namespace dequant {

// Failure while reading a .dqc or .tt stream; line numbers are 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

// Request exceeds a hard resource bound (dense width cap, outcome-map size).
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Circuit cannot be executed as given: unresolved oracle, gate outside the
// backend's gate set, malformed run configuration.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dequant
