#pragma once

#include <stdexcept>
#include <string>

namespace versatility {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// dist-core
class ParameterArityError : public Error { using Error::Error; };
class DomainError : public Error { using Error::Error; };
class SupportError : public Error { using Error::Error; };
class NonNormalizableError : public Error { using Error::Error; };

// expectations over the outcome space (entropy, Fisher entries)
class DivergenceError : public Error { using Error::Error; };
class DivergentEntropyError : public DivergenceError { using DivergenceError::DivergenceError; };
class ScoreUndefinedError : public Error { using Error::Error; };
class NumericPsdError : public Error { using Error::Error; };

// prior integration and catalog lookups
class PolicyError : public Error { using Error::Error; };
class CatalogError : public Error { using Error::Error; };

/// Lexing, parsing and notation errors carry the byte offset into the input.
class ExpressionError : public Error {
 public:
  ExpressionError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class LexError : public ExpressionError { using ExpressionError::ExpressionError; };
class ParseError : public ExpressionError { using ExpressionError::ExpressionError; };
class UnsupportedNotationError : public ExpressionError { using ExpressionError::ExpressionError; };

}  // namespace versatility
