#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace sgmstream {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed file contents. `offset` is the byte position where parsing failed.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// One or more violated constraints; every violation is kept.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}
  explicit ValidationError(const std::string& violation)
      : ValidationError(std::vector<std::string>{violation}) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) {
      if (!out.empty()) out += "; ";
      out += s;
    }
    return out;
  }
  std::vector<std::string> violations_;
};

// A value does not fit the requested encoding.
class RangeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// File system failures: cannot open, cannot write.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace sgmstream
