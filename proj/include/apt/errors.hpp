#pragma once

#include <stdexcept>
#include <string>

namespace apt {

// Base class for everything thrown by the library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DimensionMismatch : public Error {
public:
  explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

class NotPositiveDefinite : public Error {
public:
  explicit NotPositiveDefinite(const std::string& msg) : Error(msg) {}
};

class SingularDesign : public Error {
public:
  explicit SingularDesign(const std::string& msg) : Error(msg) {}
};

// Raised by a state-dependent swap proposal when every pair weight is zero.
// The swap phase treats it as a no-op step.
class DegenerateSupport : public Error {
public:
  explicit DegenerateSupport(const std::string& msg) : Error(msg) {}
};

class ParseError : public Error {
public:
  ParseError(const std::string& msg, int row, int col)
      : Error(msg), row(row), col(col) {}
  int row;  // 1-based data row (0 = header)
  int col;  // 1-based column
};

class ConstantColumn : public Error {
public:
  explicit ConstantColumn(const std::string& msg) : Error(msg) {}
};

class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& field, const std::string& msg)
      : Error(field + ": " + msg), field(field) {}
  std::string field;
};

}  // namespace apt
