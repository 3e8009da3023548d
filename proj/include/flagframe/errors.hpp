#pragma once

#include <stdexcept>
#include <string>

namespace flagframe {

// Bad user input: malformed JSON, invalid flags, failed preconditions on
// supplied data. The CLI maps this family to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& msg, std::size_t pos)
      : InputError(msg + " at position " + std::to_string(pos)), position(pos) {}
  std::size_t position;
};

class DomainError : public InputError {
 public:
  using InputError::InputError;
};

class AlgebraMismatch : public InputError {
 public:
  using InputError::InputError;
};

class DegenerateFrame : public InputError {
 public:
  DegenerateFrame(const std::string& msg, double t_at) : InputError(msg), t(t_at) {}
  double t;
};

class PreconditionError : public InputError {
 public:
  using InputError::InputError;
};

// Floating point kernel has more than one dimension (exit code 3).
class RankAmbiguity : public std::runtime_error {
 public:
  RankAmbiguity(const std::string& msg, int kernel_dim)
      : std::runtime_error(msg), dimension(kernel_dim) {}
  int dimension;
};

// A postcondition that exact arithmetic guarantees was violated.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace flagframe
