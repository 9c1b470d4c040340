#pragma once

#include <stdexcept>
#include <string>

namespace refmap {

enum class ErrorCode {
  kContractViolation,  // precondition on arguments not met
  kMalformedHeader,
  kTruncatedPayload,
  kNonFinite,
  kIo,
  kInvalidInput,  // well-formed but semantically unusable input
  kNumeric,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorCode::kContractViolation, what);
}

}  // namespace refmap
