#pragma once

#include <stdexcept>
#include <string>

namespace quiltsign {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Structurally invalid object (broken invariant or dangling reference).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Valid object that does not satisfy an operation's hypotheses.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace quiltsign
