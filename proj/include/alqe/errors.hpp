#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace alqe {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed formula or term text; `offset` is the byte position of the
/// offending token.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Unknown symbol, arity mismatch, or symbol outside the expected language.
class SymbolError : public Error {
 public:
  using Error::Error;
};

/// A formula outside the fragment an operation accepts (non-affine, quantified,
/// free variables where a sentence is required, ...).
class FragmentError : public Error {
 public:
  using Error::Error;
};

/// Evaluation failed: unbound variable, uninterpretable term, ...
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// Inputs violate a documented precondition (weights, primes, caps).
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace alqe
