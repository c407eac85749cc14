#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace photostyle {

/// Network/weight/shape wiring problems. Carries the offending layer name when known.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed weight file. `offset` is the byte position where parsing failed.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Eigensolver non-convergence, singular factorization, degenerate graphs.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// A projection pair cannot be formed because one side has no retained eigenvalue.
class DegenerateRegionError : public NumericError {
 public:
  explicit DegenerateRegionError(const std::string& what) : NumericError(what) {}
};

/// Image and label-map file problems.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace photostyle
