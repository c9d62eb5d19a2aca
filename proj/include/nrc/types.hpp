#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace nrc {

// Shift index inside a roster cell: 0 is a day off, 1..s are shift types.
using Shift = std::uint8_t;
inline constexpr Shift kDayOff = 0;

// Penalties are integral so delta evaluation can be compared exactly.
using Cost = std::int64_t;

inline constexpr int kMinutesPerDay = 24 * 60;

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class SemanticError : public std::runtime_error {
 public:
  SemanticError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class MoveError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InfeasibleRoster : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InconsistentContext : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class VersionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nrc
