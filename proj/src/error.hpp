#pragma once

#include <stdexcept>
#include <string>

namespace qwfin {

// Mirrors the qwf_error values in include/qwfin/qwfin.h (kept in sync by
// static_asserts in capi.cpp).
enum class ErrorCode : int {
  invalid_argument = 1,
  parse = 2,
  insufficient_data = 3,
  degenerate_data = 4,
  out_of_range = 5,
  numeric = 6,
  io = 7,
  internal = 8,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace qwfin
