#pragma once

#include <stdexcept>
#include <string>

namespace jpr {

/// Failure categories. The CLI maps these onto process exit codes.
enum class ErrorKind {
  invalid_argument,  // bad input: malformed spec, out-of-range parameter
  unsupported,       // valid input, but the combination has no implementation
  numeric,           // NaN, underflow, residue above threshold
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorKind::invalid_argument, what);
}

}  // namespace jpr
