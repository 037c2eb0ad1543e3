#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dlsgraph {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A node or edge id that is out of range or no longer live.
class InvalidEntity : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. `offset` is the byte offset of the failure.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Identifier bindings that do not form a registered combination.
class GrammarError : public Error {
 public:
  using Error::Error;
};

/// Bad input data. `row` is 1-based; 0 when not tied to a row.
class DataError : public Error {
 public:
  DataError(const std::string& what, std::size_t row = 0)
      : Error(row == 0 ? what : "row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

/// A distributed solve stopped before convergence.
class SolveAborted : public Error {
 public:
  SolveAborted(const std::string& what, std::size_t round)
      : Error(what + " (round " + std::to_string(round) + ")"), round_(round) {}
  std::size_t round() const noexcept { return round_; }

 private:
  std::size_t round_;
};

class NoPath : public Error {
 public:
  using Error::Error;
};

}  // namespace dlsgraph
