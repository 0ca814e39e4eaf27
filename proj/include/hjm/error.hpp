#pragma once

#include <stdexcept>
#include <string>

namespace hjm {

enum class ErrorKind {
  validation,   // malformed or out-of-domain input
  degenerate,   // arrangement in non-general position
  numeric,      // overflow, non-convergence, inconsistent numerics
  capability,   // request beyond the supported problem size
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorKind::validation, what);
}

}  // namespace hjm
