#include "refmap/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "refmap/error.hpp"

namespace refmap {

double mse_log(const Image& a, const Image& b, std::span<const unsigned char> mask) {
  if (a.width() != b.width() || a.height() != b.height()) {
    fail(ErrorCode::kInvalidInput, "metric inputs differ in size");
  }
  require(mask.empty() || mask.size() == a.pixel_count(), "mask size does not match image");
  const auto da = a.data();
  const auto db = b.data();
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t p = 0; p < a.pixel_count(); ++p) {
    if (!mask.empty() && mask[p] == 0) continue;
    for (std::size_t c = 0; c < 3; ++c) {
      const double d = std::log(static_cast<double>(da[p * 3 + c]) + kLogEpsilon) -
                       std::log(static_cast<double>(db[p * 3 + c]) + kLogEpsilon);
      sum += d * d;
    }
    count += 3;
  }
  if (count == 0) fail(ErrorCode::kInvalidInput, "metric mask selects no pixel");
  return sum / static_cast<double>(count);
}

namespace {

constexpr std::array<double, 5> kScaleWeights = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

struct Plane {
  int width = 0;
  int height = 0;
  std::vector<double> v;

  double at(int x, int y) const {
    return v[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
  }
};

Plane channel_plane(const Image8& img, int channel) {
  Plane p{img.width, img.height, std::vector<double>(static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height))};
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      p.v[static_cast<std::size_t>(y) * static_cast<std::size_t>(img.width) + static_cast<std::size_t>(x)] =
          img.at(x, y, channel);
    }
  }
  return p;
}

Plane downsample(const Plane& p) {
  Plane out{p.width / 2, p.height / 2, {}};
  out.v.resize(static_cast<std::size_t>(out.width) * static_cast<std::size_t>(out.height));
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      out.v[static_cast<std::size_t>(y) * static_cast<std::size_t>(out.width) + static_cast<std::size_t>(x)] =
          0.25 * (p.at(2 * x, 2 * y) + p.at(2 * x + 1, 2 * y) + p.at(2 * x, 2 * y + 1) + p.at(2 * x + 1, 2 * y + 1));
    }
  }
  return out;
}

std::vector<unsigned char> downsample_mask(const std::vector<unsigned char>& m, int width, int height) {
  const int w = width / 2;
  const int h = height / 2;
  std::vector<unsigned char> out(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  auto at = [&](int x, int y) {
    return m[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      out[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)] =
          at(2 * x, 2 * y) && at(2 * x + 1, 2 * y) && at(2 * x, 2 * y + 1) && at(2 * x + 1, 2 * y + 1);
    }
  }
  return out;
}

// Separable Gaussian blur, weights renormalized where the window leaves
// the image.
Plane gaussian_blur(const Plane& p) {
  constexpr int half = SsimOptions::kWindow / 2;
  std::array<double, SsimOptions::kWindow> kernel;
  for (int i = 0; i < SsimOptions::kWindow; ++i) {
    const double d = i - half;
    kernel[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * SsimOptions::kSigma * SsimOptions::kSigma));
  }
  auto pass = [&](const Plane& src, bool horizontal) {
    Plane dst{src.width, src.height, std::vector<double>(src.v.size())};
    for (int y = 0; y < src.height; ++y) {
      for (int x = 0; x < src.width; ++x) {
        double sum = 0.0, wsum = 0.0;
        for (int k = -half; k <= half; ++k) {
          const int sx = horizontal ? x + k : x;
          const int sy = horizontal ? y : y + k;
          if (sx < 0 || sy < 0 || sx >= src.width || sy >= src.height) continue;
          const double w = kernel[static_cast<std::size_t>(k + half)];
          sum += w * src.at(sx, sy);
          wsum += w;
        }
        dst.v[static_cast<std::size_t>(y) * static_cast<std::size_t>(src.width) + static_cast<std::size_t>(x)] = sum / wsum;
      }
    }
    return dst;
  };
  return pass(pass(p, true), false);
}

Plane product(const Plane& a, const Plane& b) {
  Plane out{a.width, a.height, std::vector<double>(a.v.size())};
  for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] = a.v[i] * b.v[i];
  return out;
}

struct ScaleStats {
  double luminance;           // mean l term
  double contrast_structure;  // mean cs term
  bool valid;
};

ScaleStats scale_stats(const Plane& a, const Plane& b, const std::vector<unsigned char>& mask) {
  const Plane mu_a = gaussian_blur(a);
  const Plane mu_b = gaussian_blur(b);
  const Plane aa = gaussian_blur(product(a, a));
  const Plane bb = gaussian_blur(product(b, b));
  const Plane ab = gaussian_blur(product(a, b));
  double l_sum = 0.0, cs_sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.v.size(); ++i) {
    if (!mask.empty() && mask[i] == 0) continue;
    const double ma = mu_a.v[i];
    const double mb = mu_b.v[i];
    const double va = aa.v[i] - ma * ma;
    const double vb = bb.v[i] - mb * mb;
    const double cov = ab.v[i] - ma * mb;
    l_sum += (2.0 * ma * mb + SsimOptions::kC1) / (ma * ma + mb * mb + SsimOptions::kC1);
    cs_sum += (2.0 * cov + SsimOptions::kC2) / (va + vb + SsimOptions::kC2);
    ++n;
  }
  if (n == 0) return {0.0, 0.0, false};
  return {l_sum / static_cast<double>(n), cs_sum / static_cast<double>(n), true};
}

double ms_ssim_channel(const Image8& a, const Image8& b, int channel, std::span<const unsigned char> mask) {
  Plane pa = channel_plane(a, channel);
  Plane pb = channel_plane(b, channel);
  std::vector<unsigned char> m(mask.begin(), mask.end());

  std::vector<ScaleStats> stats;
  for (int s = 0; s < SsimOptions::kMaxScales; ++s) {
    if (std::min(pa.width, pa.height) < SsimOptions::kMinScaleSize && s > 0) break;
    const ScaleStats st = scale_stats(pa, pb, m);
    if (!st.valid) break;
    stats.push_back(st);
    if (s + 1 < SsimOptions::kMaxScales) {
      if (!m.empty()) m = downsample_mask(m, pa.width, pa.height);
      pa = downsample(pa);
      pb = downsample(pb);
    }
  }
  if (stats.empty()) fail(ErrorCode::kInvalidInput, "SSIM mask selects no pixel");

  double weight_sum = 0.0;
  for (std::size_t s = 0; s < stats.size(); ++s) weight_sum += kScaleWeights[s];
  double result = 1.0;
  for (std::size_t s = 0; s < stats.size(); ++s) {
    const double w = kScaleWeights[s] / weight_sum;
    result *= std::pow(std::max(0.0, stats[s].contrast_structure), w);
  }
  const double w_last = kScaleWeights[stats.size() - 1] / weight_sum;
  result *= std::pow(std::max(0.0, stats.back().luminance), w_last);
  return std::clamp(result, 0.0, 1.0);
}

void check_pair(const Image8& a, const Image8& b, std::span<const unsigned char> mask) {
  if (a.width != b.width || a.height != b.height) fail(ErrorCode::kInvalidInput, "SSIM inputs differ in size");
  if (a.width <= 0 || a.height <= 0) fail(ErrorCode::kInvalidInput, "SSIM inputs are empty");
  require(mask.empty() || mask.size() == static_cast<std::size_t>(a.width) * static_cast<std::size_t>(a.height),
          "mask size does not match image");
}

}  // namespace

double ms_ssim(const Image8& a, const Image8& b, std::span<const unsigned char> mask) {
  check_pair(a, b, mask);
  double sum = 0.0;
  for (int c = 0; c < 3; ++c) sum += ms_ssim_channel(a, b, c, mask);
  return sum / 3.0;
}

double dssim(const Image8& a, const Image8& b, std::span<const unsigned char> mask) {
  return (1.0 - ms_ssim(a, b, mask)) / 2.0;
}

double ssim_single_scale(const Image8& a, const Image8& b, int channel) {
  check_pair(a, b, {});
  // mean of the product map, not the product of the l and cs means
  const Plane pa = channel_plane(a, channel);
  const Plane pb = channel_plane(b, channel);
  const Plane mu_a = gaussian_blur(pa);
  const Plane mu_b = gaussian_blur(pb);
  const Plane aa = gaussian_blur(product(pa, pa));
  const Plane bb = gaussian_blur(product(pb, pb));
  const Plane ab = gaussian_blur(product(pa, pb));
  double sum = 0.0;
  for (std::size_t i = 0; i < pa.v.size(); ++i) {
    const double ma = mu_a.v[i], mb = mu_b.v[i];
    const double va = aa.v[i] - ma * ma, vb = bb.v[i] - mb * mb, cov = ab.v[i] - ma * mb;
    sum += ((2.0 * ma * mb + SsimOptions::kC1) * (2.0 * cov + SsimOptions::kC2)) /
           ((ma * ma + mb * mb + SsimOptions::kC1) * (va + vb + SsimOptions::kC2));
  }
  return sum / static_cast<double>(pa.v.size());
}

MetricPair compare_images(const Image& a, const Image& b, std::span<const unsigned char> mask) {
  MetricPair out;
  out.mse = mse_log(a, b, mask);
  const ExposureParams exposure = choose_exposure(b, mask);
  out.dssim = dssim(tonemap_8bit(a, exposure), tonemap_8bit(b, exposure), mask);
  return out;
}

}  // namespace refmap
