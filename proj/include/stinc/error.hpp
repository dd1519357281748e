#pragma once

#include <stdexcept>
#include <string>

namespace stinc {

// Base for all analyzer failures. `what()` carries a human readable message;
// parse errors additionally carry a position.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
public:
  SyntaxError(int line, int col, const std::string &msg)
      : Error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
        line_(line), col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

private:
  int line_;
  int col_;
};

class UnsupportedFeature : public SyntaxError {
public:
  using SyntaxError::SyntaxError;
};

class UnknownIdentifier : public Error {
public:
  using Error::Error;
};

class RecursionUnsupported : public Error {
public:
  using Error::Error;
};

class UnknownNode : public Error {
public:
  using Error::Error;
};

class IOError : public Error {
public:
  using Error::Error;
};

class StratificationError : public Error {
public:
  using Error::Error;
};

} // namespace stinc
