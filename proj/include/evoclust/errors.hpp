#pragma once

#include <stdexcept>
#include <string>

namespace evoclust {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input or configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: CFL violation, loss of positive-definiteness, degenerate init (exit code 3).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class CflError : public NumericalError {
 public:
  CflError(const std::string& what, double cfl, int step = -1)
      : NumericalError(what), cfl_(cfl), step_(step) {}
  double cfl() const { return cfl_; }
  int step() const { return step_; }

 private:
  double cfl_;
  int step_;
};

}  // namespace evoclust
