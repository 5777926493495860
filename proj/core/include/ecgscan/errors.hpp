#pragma once

#include <stdexcept>
#include <string>

namespace ecgscan {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class UnsupportedFormatError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class TruncationError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

/// Malformed CSV or similar interchange text.
class FormatError : public Error {
 public:
  using Error::Error;
};

class DegenerateHistogramError : public Error {
 public:
  using Error::Error;
};

class NoSignalError : public Error {
 public:
  using Error::Error;
};

class ReconstructionError : public Error {
 public:
  using Error::Error;
};

class AssemblyError : public Error {
 public:
  AssemblyError(int row, int col, const std::string& what)
      : Error("panel (" + std::to_string(row) + ", " + std::to_string(col) + "): " + what),
        row_(row),
        col_(col) {}
  int row() const noexcept { return row_; }
  int col() const noexcept { return col_; }

 private:
  int row_;
  int col_;
};

class AlignmentError : public Error {
 public:
  using Error::Error;
};

/// A summary statistic has no value for the given inputs.
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

/// A caller broke a documented precondition.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace ecgscan
