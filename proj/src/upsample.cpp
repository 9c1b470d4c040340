#include "refmap/upsample.hpp"

#include <algorithm>
#include <cmath>

#include "refmap/error.hpp"
#include "refmap/exposure.hpp"
#include "refmap/parallel.hpp"

namespace refmap {

namespace {

// Bilinear sample of the valid reflectance-map pixels around fractional
// pixel (px, py); weights renormalize over valid taps. Returns false if
// none of the four taps is valid.
bool sample_rm(const ReflectanceMap& rm, double px, double py, Rgb& out) {
  const int res = rm.resolution();
  const int x0 = static_cast<int>(std::floor(px));
  const int y0 = static_cast<int>(std::floor(py));
  const double fx = px - x0;
  const double fy = py - y0;
  double total = 0.0;
  Rgb acc{};
  for (int dy = 0; dy <= 1; ++dy) {
    for (int dx = 0; dx <= 1; ++dx) {
      const int x = x0 + dx;
      const int y = y0 + dy;
      if (x < 0 || y < 0 || x >= res || y >= res || !rm.valid(x, y)) continue;
      const double w = (dx ? fx : 1.0 - fx) * (dy ? fy : 1.0 - fy);
      if (w <= 0.0) continue;
      const Rgb v = rm.get(x, y);
      for (std::size_t c = 0; c < 3; ++c) acc[c] += w * v[c];
      total += w;
    }
  }
  if (total <= 0.0) return false;
  for (double& v : acc) v /= total;
  out = acc;
  return true;
}

}  // namespace

GuideImage build_guide(const ReflectanceMap& rm, const ViewPose& view, int width, int height) {
  require(width > 0 && height > 0, "guide size must be positive");
  GuideImage guide{Image(width, height),
                   std::vector<unsigned char>(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0)};
  const Vec3 w_o = view.view_direction();
  const int res = rm.resolution();
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const Vec3 h = latlong_to_direction(r, c, height, width).vec() + w_o;
      const double len = norm(h);
      if (len < 1e-9) continue;
      const Vec3 n = view.to_camera((1.0 / len) * h);
      if (n.z <= 0.0) continue;
      // inverse of sphere_normal's pixel-to-(u, v) mapping
      const double px = (n.x + 1.0) * res / 2.0 - 0.5;
      const double py = (1.0 - n.y) * res / 2.0 - 0.5;
      Rgb v;
      if (!sample_rm(rm, px, py, v)) continue;
      guide.image.set(c, r, v);
      guide.confidence[static_cast<std::size_t>(r) * static_cast<std::size_t>(width) + static_cast<std::size_t>(c)] = 1;
    }
  }
  return guide;
}

double default_sigma_range(const GuideImage& guide) {
  std::vector<double> lum;
  for (int y = 0; y < guide.height(); ++y) {
    for (int x = 0; x < guide.width(); ++x) {
      if (guide.confident(x, y)) lum.push_back(luminance(guide.image.get(x, y)));
    }
  }
  if (lum.empty()) return 1.0;  // no confident texel: range weights are all 1 anyway
  const double p95 = percentile(std::move(lum), 0.95);
  return p95 > 0.0 ? UpsampleParams::kDefaultRangeFraction * p95 : 1.0;
}

EnvironmentMap joint_bilateral_upsample(const EnvironmentMap& low, const GuideImage& guide,
                                        const UpsampleParams& params) {
  const int lw = low.width();
  const int lh = low.height();
  if (lw <= 0 || lh <= 0 || guide.width() != 2 * lw || guide.height() != 2 * lh) {
    fail(ErrorCode::kInvalidInput, "guide must be exactly twice the low-res illumination size");
  }
  require(params.sigma_spatial > 0.0, "spatial sigma must be positive");
  const double sigma_r = params.sigma_range > 0.0 ? params.sigma_range : default_sigma_range(guide);
  const double inv_2ss = 1.0 / (2.0 * params.sigma_spatial * params.sigma_spatial);
  const double inv_2sr = 1.0 / (2.0 * sigma_r * sigma_r);

  // Guide luminance on the low-res grid: mean over confident children.
  std::vector<double> low_lum(static_cast<std::size_t>(lw) * static_cast<std::size_t>(lh), 0.0);
  std::vector<unsigned char> low_conf(low_lum.size(), 0);
  for (int y = 0; y < lh; ++y) {
    for (int x = 0; x < lw; ++x) {
      double sum = 0.0;
      int count = 0;
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
          if (!guide.confident(2 * x + dx, 2 * y + dy)) continue;
          sum += luminance(guide.image.get(2 * x + dx, 2 * y + dy));
          ++count;
        }
      }
      const std::size_t i = static_cast<std::size_t>(y) * static_cast<std::size_t>(lw) + static_cast<std::size_t>(x);
      if (count > 0) {
        low_lum[i] = sum / count;
        low_conf[i] = 1;
      }
    }
  }

  const int hw = guide.width();
  const int hh = guide.height();
  Image out(hw, hh);
  parallel_for(hh, [&](int, int y) {
    // high-res texel center in low-res texel-index coordinates
    const double ly = (y + 0.5) / 2.0 - 0.5;
    const int cy = static_cast<int>(std::floor(ly + 0.5));
    for (int x = 0; x < hw; ++x) {
      const double lx = (x + 0.5) / 2.0 - 0.5;
      const int cx = static_cast<int>(std::floor(lx + 0.5));
      const bool p_conf = guide.confident(x, y);
      const double g = p_conf ? luminance(guide.image.get(x, y)) : 0.0;
      // Accumulate offsets from the nearest low-res value so constant
      // neighborhoods reproduce exactly.
      const Rgb base = low.get(((cx % lw) + lw) % lw, std::clamp(cy, 0, lh - 1));
      Rgb acc{}, acc_spatial{};
      double total = 0.0, total_spatial = 0.0;
      for (int qy = cy - 2; qy <= cy + 2; ++qy) {
        if (qy < 0 || qy >= lh) continue;
        for (int k = cx - 2; k <= cx + 2; ++k) {
          const int qx = ((k % lw) + lw) % lw;
          const double dx = k - lx;
          const double dy = qy - ly;
          const double ws = std::exp(-(dx * dx + dy * dy) * inv_2ss);
          double w = ws;
          const std::size_t qi = static_cast<std::size_t>(qy) * static_cast<std::size_t>(lw) + static_cast<std::size_t>(qx);
          if (p_conf && low_conf[qi]) {
            const double d = g - low_lum[qi];
            w *= std::exp(-d * d * inv_2sr);
          }
          const Rgb v = low.get(qx, qy);
          for (std::size_t c = 0; c < 3; ++c) {
            acc[c] += w * (v[c] - base[c]);
            acc_spatial[c] += ws * (v[c] - base[c]);
          }
          total += w;
          total_spatial += ws;
        }
      }
      // Range weights can all underflow for extreme guide contrast; the
      // spatial weights cannot (center tap is within one texel).
      if (!(total > 1e-290)) {
        acc = acc_spatial;
        total = total_spatial;
      }
      for (std::size_t c = 0; c < 3; ++c) acc[c] = base[c] + acc[c] / total;
      out.set(x, y, acc);
    }
  });
  return EnvironmentMap(std::move(out));
}

}  // namespace refmap
