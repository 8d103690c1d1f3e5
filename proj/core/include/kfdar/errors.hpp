#pragma once

#include <stdexcept>
#include <string>

namespace kfdar {

// Base of every error the library raises. Feasibility violations are not
// errors; they are reported as data by check_tour_feasible().
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInstance : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DisconnectedGraph : public Error {
 public:
  using Error::Error;
};

class Infeasible : public Error {
 public:
  using Error::Error;
};

// Raised by exhaustive routines when asked to run beyond their size limits.
class TooLarge : public Error {
 public:
  using Error::Error;
};

}  // namespace kfdar
