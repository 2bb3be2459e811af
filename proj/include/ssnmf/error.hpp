#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ssnmf {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shapes of the operands do not agree.
struct DimensionError : Error {
  using Error::Error;
};

// Numeric input violates an invariant (non-finite entries, constant vector, ...).
struct InputError : Error {
  using Error::Error;
};

// A parameter is outside its admissible range.
struct ParameterError : Error {
  using Error::Error;
};

// An extracted column lies in the span of the current basis; the extraction
// cannot continue.
struct RankDeficiencyError : Error {
  using Error::Error;
};

// A binary file does not conform to its format; byte_offset locates the
// first offending byte.
struct FormatError : Error {
  FormatError(const std::string& msg, std::size_t offset)
      : Error(msg + " (byte offset " + std::to_string(offset) + ")"),
        byte_offset(offset) {}
  std::size_t byte_offset;
};

// A text file failed to parse; line is 1-based.
struct ParseError : Error {
  ParseError(const std::string& msg, std::size_t line_no)
      : Error(msg + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
  std::size_t line;
};

// The operating system refused a file operation.
struct IoError : Error {
  using Error::Error;
};

}  // namespace ssnmf
