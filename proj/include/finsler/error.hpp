#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace finsler {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset` is the byte offset of the offending token.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// A quantity was evaluated outside its domain: zero denominator, negative
/// radicand, a frame on the boundary of the admissible cone, ...
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature ran out of subdivisions.
class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// Two routes that must agree did not (cross-derivative check, spray
/// consistency, residual of a defining equation).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Bad user input: unknown catalog id, malformed JSON spec, invalid option.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace finsler
