#include "refmap/pfm.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "refmap/error.hpp"

namespace refmap {

namespace {

// Reads one whitespace-delimited token; PFM headers separate fields with a
// single whitespace character before the payload.
std::string next_token(const std::string& bytes, std::size_t& pos) {
  while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  const std::size_t start = pos;
  while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  if (start == pos) fail(ErrorCode::kMalformedHeader, "PFM header ended early");
  return bytes.substr(start, pos - start);
}

long parse_dimension(const std::string& token) {
  char* end = nullptr;
  const long v = std::strtol(token.c_str(), &end, 10);
  if (end == token.c_str() || *end != '\0' || v <= 0 || v > (1L << 20)) {
    fail(ErrorCode::kMalformedHeader, "bad PFM dimension '" + token + "'");
  }
  return v;
}

std::uint32_t byteswap32(std::uint32_t v) {
  return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
}

}  // namespace

Image decode_pfm(const std::string& bytes) {
  std::size_t pos = 0;
  const std::string magic = next_token(bytes, pos);
  if (magic != "PF") {
    fail(ErrorCode::kMalformedHeader, "expected 3-channel PFM magic 'PF', got '" + magic + "'");
  }
  const long width = parse_dimension(next_token(bytes, pos));
  const long height = parse_dimension(next_token(bytes, pos));
  const std::string scale_token = next_token(bytes, pos);
  char* end = nullptr;
  const double scale = std::strtod(scale_token.c_str(), &end);
  if (end == scale_token.c_str() || *end != '\0' || scale == 0.0 || !std::isfinite(scale)) {
    fail(ErrorCode::kMalformedHeader, "bad PFM scale '" + scale_token + "'");
  }
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    fail(ErrorCode::kTruncatedPayload, "PFM payload missing");
  }
  ++pos;

  const bool file_little = scale < 0.0;
  const bool swap = file_little != (std::endian::native == std::endian::little);
  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3;
  if (bytes.size() - pos < count * 4) {
    fail(ErrorCode::kTruncatedPayload, "PFM payload shorter than " + std::to_string(count * 4) + " bytes");
  }

  Image img(static_cast<int>(width), static_cast<int>(height));
  const char* src = bytes.data() + pos;
  for (long file_row = 0; file_row < height; ++file_row) {
    const int y = static_cast<int>(height - 1 - file_row);
    for (long x = 0; x < width; ++x) {
      for (int c = 0; c < 3; ++c) {
        std::uint32_t word;
        std::memcpy(&word, src, 4);
        src += 4;
        if (swap) word = byteswap32(word);
        img.at(static_cast<int>(x), y, c) = std::bit_cast<float>(word);
      }
    }
  }
  return img;
}

std::string encode_pfm(const Image& image) {
  if (!image.all_finite()) fail(ErrorCode::kNonFinite, "refusing to save non-finite PFM data");
  std::ostringstream header;
  header << "PF\n" << image.width() << ' ' << image.height() << "\n-1.0\n";
  std::string out = header.str();
  const std::size_t offset = out.size();
  out.resize(offset + image.pixel_count() * 12);
  char* dst = out.data() + offset;
  const bool swap = std::endian::native != std::endian::little;
  for (int y = image.height() - 1; y >= 0; --y) {
    for (int x = 0; x < image.width(); ++x) {
      for (int c = 0; c < 3; ++c) {
        std::uint32_t word = std::bit_cast<std::uint32_t>(image.at(x, y, c));
        if (swap) word = byteswap32(word);
        std::memcpy(dst, &word, 4);
        dst += 4;
      }
    }
  }
  return out;
}

Image load_pfm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return decode_pfm(buffer.str());
}

void save_pfm(const Image& image, const std::filesystem::path& path) {
  const std::string bytes = encode_pfm(image);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

}  // namespace refmap
