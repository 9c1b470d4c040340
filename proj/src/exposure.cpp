#include "refmap/exposure.hpp"

#include <algorithm>
#include <cmath>

#include "refmap/error.hpp"

namespace refmap {

void ExposureParams::validate() const {
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo < 0.0 || hi < lo) {
    fail(ErrorCode::kInvalidInput, "exposure bracket must satisfy 0 <= lo <= hi");
  }
}

double percentile(std::vector<double> values, double p) {
  require(!values.empty(), "percentile of an empty sample");
  require(p >= 0.0 && p <= 1.0, "percentile rank must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto i = static_cast<std::size_t>(std::floor(h));
  if (i + 1 >= values.size()) return values.back();
  return values[i] + (h - static_cast<double>(i)) * (values[i + 1] - values[i]);
}

ExposureParams choose_exposure(const Image& img, std::span<const unsigned char> mask) {
  require(mask.empty() || mask.size() == img.pixel_count(), "mask size does not match image");
  std::vector<double> lum;
  lum.reserve(img.pixel_count());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * static_cast<std::size_t>(img.width()) +
                            static_cast<std::size_t>(x);
      if (!mask.empty() && mask[i] == 0) continue;
      lum.push_back(luminance(img.get(x, y)));
    }
  }
  if (lum.empty()) fail(ErrorCode::kInvalidInput, "exposure selection needs at least one valid pixel");
  ExposureParams params{percentile(lum, 0.05), percentile(lum, 0.95)};
  params.validate();
  return params;
}

Image simulate_ldr(const Image& img, const ExposureParams& params) {
  params.validate();
  if (params.hi == params.lo) return img;
  const double range = params.hi - params.lo;
  Image out = img;
  for (float& v : out.data()) {
    const double t = std::clamp((v - params.lo) / range, 0.0, 1.0);
    const double q = std::round(255.0 * t) / 255.0;
    if (q == 0.0) {
      v = static_cast<float>(params.lo);
    } else if (q == 1.0) {
      v = static_cast<float>(params.hi);
    } else {
      v = static_cast<float>(params.lo + q * range);
    }
  }
  return out;
}

Image log_encode(const Image& img) {
  Image out = img;
  for (float& v : out.data()) {
    if (!(v >= 0.0f)) fail(ErrorCode::kInvalidInput, "log encoding needs non-negative input");
    v = static_cast<float>(std::log(static_cast<double>(v) + kLogEpsilon));
  }
  return out;
}

Image log_decode(const Image& img) {
  Image out = img;
  for (float& v : out.data()) {
    v = static_cast<float>(std::max(0.0, std::exp(static_cast<double>(v)) - kLogEpsilon));
  }
  return out;
}

Image8 tonemap_8bit(const Image& img, const ExposureParams& params) {
  params.validate();
  Image8 out{img.width(), img.height(), std::vector<std::uint8_t>(img.pixel_count() * 3)};
  const double range = params.hi - params.lo;
  const auto src = img.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double x = src[i];
    double t;
    if (range > 0.0) {
      t = std::clamp((x - params.lo) / range, 0.0, 1.0);
    } else {
      t = x > params.lo ? 1.0 : 0.0;
    }
    out.data[i] = static_cast<std::uint8_t>(std::lround(255.0 * std::pow(t, 1.0 / 2.2)));
  }
  return out;
}

}  // namespace refmap
