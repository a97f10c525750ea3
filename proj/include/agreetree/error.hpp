#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace agreetree {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed Newick input. `position()` is the byte offset where parsing stopped.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// An operation was called outside its domain (unbalanced input, bad label set, delta out of range...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive routines refuse inputs above their size guard unless guards are lifted.
class GuardError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// A claimed agreement set does not induce isomorphic restrictions.
class VerificationError : public Error {
 public:
  using Error::Error;
};

}  // namespace agreetree
