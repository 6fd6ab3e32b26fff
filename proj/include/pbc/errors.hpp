#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pbc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A reference title normalized to the empty string.
class EmptyKeyError : public Error {
 public:
  explicit EmptyKeyError(std::string raw)
      : Error("reference title normalizes to an empty key: \"" + raw + "\""),
        raw_title_(std::move(raw)) {}

  const std::string& raw_title() const noexcept { return raw_title_; }

 private:
  std::string raw_title_;
};

/// A corpus record that does not match the line format.
class MalformedRecordError : public Error {
 public:
  MalformedRecordError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class CorruptFileError : public Error {
 public:
  using Error::Error;
};

class TooFewRefsError : public Error {
 public:
  using Error::Error;
};

class WrongArityError : public Error {
 public:
  using Error::Error;
};

class EmptySetError : public Error {
 public:
  using Error::Error;
};

/// Two hash sets or a query and an index disagree on k or the hash function.
class ConfigMismatchError : public Error {
 public:
  using Error::Error;
};

/// No integer m satisfies C(m, k) == j.
class NotBinomialError : public Error {
 public:
  NotBinomialError(unsigned long long j, unsigned k)
      : Error(std::to_string(j) + " is not a binomial number C(m, " + std::to_string(k) + ")"),
        value_(j),
        k_(k) {}

  unsigned long long value() const noexcept { return value_; }
  unsigned k() const noexcept { return k_; }

 private:
  unsigned long long value_;
  unsigned k_;
};

class InvalidParameterError : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

}  // namespace pbc
