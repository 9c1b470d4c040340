#pragma once

#include <span>

#include "refmap/exposure.hpp"
#include "refmap/image.hpp"

namespace refmap {

struct MetricPair {
  double mse = 0.0;
  double dssim = 0.0;
};

/// Mean over valid pixels and channels of (ln(a + 1e-6) - ln(b + 1e-6))^2.
/// Empty mask = all pixels. Throws kInvalidInput on size mismatch or an
/// empty valid set.
double mse_log(const Image& a, const Image& b, std::span<const unsigned char> mask = {});

struct SsimOptions {
  static constexpr int kMaxScales = 5;
  static constexpr int kMinScaleSize = 8;
  static constexpr int kWindow = 11;
  static constexpr double kSigma = 1.5;
  static constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
  static constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);
};

/// Multi-scale SSIM, averaged over channels, in [0, 1]. Scales halve the
/// image (2x2 box) until it drops below 8 pixels, at most 5 scales with the
/// standard per-scale exponents renormalized to the scales used. Window
/// statistics use an 11x11 Gaussian (sigma 1.5) renormalized at borders.
/// With a mask, per-scale means run over masked pixels only (a coarse pixel
/// is valid if all its children are).
double ms_ssim(const Image8& a, const Image8& b, std::span<const unsigned char> mask = {});

/// (1 - ms_ssim) / 2.
double dssim(const Image8& a, const Image8& b, std::span<const unsigned char> mask = {});

/// Single-scale SSIM of one channel (mean of the SSIM map).
double ssim_single_scale(const Image8& a, const Image8& b, int channel);

/// MSE of log radiance plus DSSIM of both images tone-mapped with the
/// exposure chosen on the reference b.
MetricPair compare_images(const Image& a, const Image& b, std::span<const unsigned char> mask = {});

}  // namespace refmap
