#pragma once

#include <vector>

#include "refmap/image.hpp"
#include "refmap/render.hpp"
#include "refmap/spherical.hpp"

namespace refmap {

/// Reflectance map pulled back into the lat-long domain of the
/// illumination. confidence is 0 where the guide is undefined.
struct GuideImage {
  Image image;
  std::vector<unsigned char> confidence;

  int width() const noexcept { return image.width(); }
  int height() const noexcept { return image.height(); }
  bool confident(int x, int y) const noexcept {
    return confidence[static_cast<std::size_t>(y) * static_cast<std::size_t>(width()) +
                      static_cast<std::size_t>(x)] != 0;
  }
};

/// For each lat-long direction w, samples the reflectance map at the pixel
/// whose normal is the half vector normalize(w + w_o), if that normal faces
/// the camera.
GuideImage build_guide(const ReflectanceMap& rm, const ViewPose& view, int width = 128,
                       int height = 128);

struct UpsampleParams {
  static constexpr double kDefaultSigmaSpatial = 0.75;
  static constexpr double kDefaultRangeFraction = 0.1;

  double sigma_spatial = kDefaultSigmaSpatial;  // low-res texels
  /// Guide-luminance units; <= 0 selects 0.1 x the 95th percentile of the
  /// confident guide luminance.
  double sigma_range = 0.0;
};

/// Resolves the automatic range sigma for a guide.
double default_sigma_range(const GuideImage& guide);

/// Joint bilateral 2x upsampling over a 5x5 low-res window. Azimuth wraps;
/// rows beyond the poles are skipped. Where either guide sample lacks
/// confidence the range weight is 1. Throws kInvalidInput unless the guide
/// is exactly twice the low-res size.
EnvironmentMap joint_bilateral_upsample(const EnvironmentMap& low, const GuideImage& guide,
                                        const UpsampleParams& params = {});

}  // namespace refmap
