#pragma once

#include <stdexcept>
#include <string>

namespace rnkm {

enum class ErrorCode {
  InvalidArgument = 1,
  Domain = 2,
  Io = 3,
  Parse = 4,
  Numeric = 5,
};

/// Library-wide exception. The C API maps `code()` onto its status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_invalid(const std::string& what) {
  throw Error(ErrorCode::InvalidArgument, what);
}

[[noreturn]] inline void throw_domain(const std::string& what) {
  throw Error(ErrorCode::Domain, what);
}

}  // namespace rnkm
