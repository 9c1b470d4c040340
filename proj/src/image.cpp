#include "refmap/image.hpp"

#include <algorithm>
#include <cmath>

#include "refmap/error.hpp"

namespace refmap {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kContractViolation: return "contract violation";
    case ErrorCode::kMalformedHeader: return "malformed header";
    case ErrorCode::kTruncatedPayload: return "truncated payload";
    case ErrorCode::kNonFinite: return "non-finite value";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kInvalidInput: return "invalid input";
    case ErrorCode::kNumeric: return "numeric error";
  }
  return "unknown error";
}

Image::Image(int width, int height, float fill) : width_(width), height_(height) {
  require(width >= 0 && height >= 0, "image dimensions must be non-negative");
  data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3, fill);
}

bool Image::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](float v) { return std::isfinite(v); });
}

}  // namespace refmap
