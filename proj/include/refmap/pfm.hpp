#pragma once

#include <filesystem>
#include <string>

#include "refmap/image.hpp"

namespace refmap {

// Portable float map, 3-channel ("PF") only. Rows are stored bottom row
// first; a negative scale marks little-endian payload. save_pfm always
// writes little-endian with scale -1.

/// Throws kIo, kMalformedHeader or kTruncatedPayload.
Image load_pfm(const std::filesystem::path& path);
/// Throws kNonFinite if the image holds NaN/Inf, kIo on write failure.
void save_pfm(const Image& image, const std::filesystem::path& path);

Image decode_pfm(const std::string& bytes);
std::string encode_pfm(const Image& image);

}  // namespace refmap
