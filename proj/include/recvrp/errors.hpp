#pragma once

#include <stdexcept>
#include <string>

namespace recvrp {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input document. `line` is 1-based, -1 when unknown.
struct ParseError : Error {
  int line;
  explicit ParseError(const std::string& msg, int line_no = -1)
      : Error(line_no >= 0 ? msg + " (line " + std::to_string(line_no) + ")" : msg),
        line(line_no) {}
};

struct ValidationError : Error {
  using Error::Error;
};

struct DomainError : Error {
  using Error::Error;
};

// A charging plan violates the battery cap along its route.
struct PlanError : Error {
  using Error::Error;
};

// No charging plan can make the route energy-feasible.
struct InfeasibleRoute : Error {
  using Error::Error;
};

struct InfeasibleClustering : Error {
  using Error::Error;
};

struct InfeasibleGroup : Error {
  bool timed_out;
  explicit InfeasibleGroup(const std::string& msg, bool timeout = false)
      : Error(msg), timed_out(timeout) {}
};

struct RefusedTooLarge : Error {
  using Error::Error;
};

struct Infeasible : Error {
  using Error::Error;
};

}  // namespace recvrp
