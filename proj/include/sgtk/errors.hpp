#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sgtk {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : Error {
  using Error::Error;
};

// Malformed input file; carries the 1-based line number.
struct ParseError : Error {
  ParseError(const std::string& msg, std::size_t line_no)
      : Error(msg + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
  std::size_t line;
};

struct OverflowError : Error {
  using Error::Error;
};

struct DegreeError : Error {
  using Error::Error;
};

struct GeometryError : Error {
  using Error::Error;
};

struct IndexError : Error {
  using Error::Error;
};

struct RangeError : Error {
  using Error::Error;
};

struct ShapeError : Error {
  using Error::Error;
};

struct NonFiniteError : Error {
  using Error::Error;
};

}  // namespace sgtk
