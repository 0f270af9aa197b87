#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace railcal {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. The message carries "file:line: reason".
class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& reason)
      : Error(file + ":" + std::to_string(line) + ": " + reason), file_(file), line_(line) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

/// Cross-reference failure, e.g. a path naming a station that does not exist.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

/// Timetable events that cannot be put in a consistent order.
class OrderingError : public Error {
 public:
  using Error::Error;
};

/// Missing lookup data (path attributes for an interval, unknown OD, ...).
class LookupError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// Parameter vector outside its box.
class BoundsError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent run configuration (unknown algorithm, OD without paths, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace railcal
