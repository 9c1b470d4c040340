#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "refmap/image.hpp"

namespace refmap {

/// Exposure bracket: radiance mapped to 0 and to full scale.
struct ExposureParams {
  double lo = 0.0;
  double hi = 0.0;

  /// Throws kInvalidInput unless 0 <= lo <= hi, both finite.
  void validate() const;

  friend bool operator==(const ExposureParams&, const ExposureParams&) = default;
};

/// Linear-interpolated percentile (p in [0,1]) of a sample; sorts a copy.
double percentile(std::vector<double> values, double p);

/// 5th/95th percentiles of per-pixel luminance over pixels with mask != 0.
/// An empty mask span means every pixel is valid. Throws kInvalidInput if
/// no pixel is valid.
ExposureParams choose_exposure(const Image& img, std::span<const unsigned char> mask = {});

/// 8-bit capture inside the bracket, mapped back to radiance. Values below
/// lo clip to lo, above hi to hi. A degenerate bracket (hi == lo) returns
/// the input unchanged.
Image simulate_ldr(const Image& img, const ExposureParams& params);

inline constexpr double kLogEpsilon = 1e-6;

/// ln(x + 1e-6) per value. Throws kInvalidInput on negative input.
Image log_encode(const Image& img);
/// exp(y) - 1e-6, clamped at 0.
Image log_decode(const Image& img);

/// 8-bit display image, row-major RGB.
struct Image8 {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  std::uint8_t at(int x, int y, int c) const {
    return data[(static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) * 3 +
                static_cast<std::size_t>(c)];
  }
};

/// round(255 * t^(1/2.2)) with t the bracket-normalized value.
Image8 tonemap_8bit(const Image& img, const ExposureParams& params);

}  // namespace refmap
