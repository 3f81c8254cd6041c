#pragma once

#include <stdexcept>
#include <string>

namespace dqcp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed construction: arity, shapes, parameters.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class UnknownAtomError : public Error {
 public:
  using Error::Error;
};

class NameCollisionError : public Error {
 public:
  using Error::Error;
};

// A value left an atom's domain (constant folding or numeric evaluation).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Level set of an atom has no conic representation (card, rank).
class NoRepresentationError : public Error {
 public:
  using Error::Error;
};

// An atom occurrence cannot be expanded into cone constraints.
class UnsupportedAtomError : public Error {
 public:
  using Error::Error;
};

class VerificationError : public Error {
 public:
  using Error::Error;
};

// Numerical breakdown inside the conic solver; distinct from infeasibility.
class SolverError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& msg)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace dqcp
