#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fccd {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or truncated binary input. offset is the byte position where
// decoding failed.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"), reason_(what), offset_(offset) {}
  std::uint64_t offset() const noexcept { return offset_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string reason_;
  std::uint64_t offset_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Manifest or configuration rejected.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Caller violated an operation's input contract.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Numerical breakdown: degenerate logits, failed factorization, non-convergence.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace fccd
