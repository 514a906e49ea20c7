#pragma once

#include <stdexcept>
#include <string>

namespace monlab {

// Arguments outside a function's mathematical domain (C <= 0, p outside (0,1), ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed or insufficient input: bad CSV rows, missing plan keys, short samples.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Distribution fitting failed (degenerate data, root-finder did not converge).
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A benchmark run could not be started or had to be stopped early.
class RunAborted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace monlab
