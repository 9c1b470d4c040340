#include <gtest/gtest.h>

#include <cmath>

#include "refmap/error.hpp"
#include "refmap/exposure.hpp"
#include "refmap/upsample.hpp"
#include "support/oracles.hpp"

using namespace refmap;

namespace {

GuideImage flat_guide(int w, int h, float v) {
  return {Image(w, h, v), std::vector<unsigned char>(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 1)};
}

}  // namespace

TEST(Guide, MirrorMapPullsBackToEnvironment) {
  // The guide of an ideal mirror reflectance map is the environment itself
  // wherever the half vector faces the camera.
  Image img(64, 32);
  for (int r = 0; r < 32; ++r) {
    for (int c = 0; c < 64; ++c) {
      const Direction d = latlong_to_direction(r, c, 32, 64);
      img.set(c, r, {1.0 + 0.5 * d.x(), 1.0 + 0.5 * d.y(), 1.0 + 0.5 * d.z()});
    }
  }
  const EnvironmentMap env(img);
  const ViewPose view(0.6, 0.1);
  const GuideImage guide = build_guide(render_mirror_rm(env, view, 128), view, 64, 32);
  int confident = 0;
  for (int r = 2; r < 30; ++r) {
    for (int c = 0; c < 64; ++c) {
      if (!guide.confident(c, r)) continue;
      const Direction d = latlong_to_direction(r, c, 32, 64);
      // Skip directions grazing the silhouette, where the map is sparse.
      if (dot(d.vec(), view.view_direction()) < -0.8) continue;
      ++confident;
      const Rgb g = guide.image.get(c, r);
      EXPECT_NEAR(g[0], 1.0 + 0.5 * d.x(), 0.05);
      EXPECT_NEAR(g[1], 1.0 + 0.5 * d.y(), 0.05);
    }
  }
  EXPECT_GT(confident, 64 * 28 / 2);
}

TEST(Upsample, ConstantIsExact) {
  const EnvironmentMap scene = oracle::synthetic_env(32, 32, 1);
  const ViewPose view(0.3, 0.0);
  const GuideImage guide = build_guide(render_reflectance_map(scene, {{0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}, 80.0}, view, 64), view, 64, 64);
  for (float c : {0.0f, 0.1f, 3.3f}) {
    for (float v : joint_bilateral_upsample(EnvironmentMap(32, 32, c), guide).image().data()) EXPECT_EQ(v, c);
  }
}

TEST(Upsample, UniformGuideMatchesSpatialFilter) {
  // With a flat guide every range weight is 1: plain Gaussian weights over
  // the 5x5 window, computed here directly.
  const EnvironmentMap low = oracle::synthetic_env(16, 8, 5);
  const EnvironmentMap out = joint_bilateral_upsample(low, flat_guide(32, 16, 1.0f), {0.75, 0.0});
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 32; ++x) {
      const double lx = (x + 0.5) / 2 - 0.5, ly = (y + 0.5) / 2 - 0.5;
      const int cx = static_cast<int>(std::floor(lx + 0.5)), cy = static_cast<int>(std::floor(ly + 0.5));
      double sum = 0, wsum = 0;
      for (int qy = cy - 2; qy <= cy + 2; ++qy) {
        if (qy < 0 || qy >= 8) continue;
        for (int qx = cx - 2; qx <= cx + 2; ++qx) {
          const double w = std::exp(-((qx - lx) * (qx - lx) + (qy - ly) * (qy - ly)) / (2 * 0.75 * 0.75));
          sum += w * low.get((qx + 16) % 16, qy)[1];
          wsum += w;
        }
      }
      EXPECT_NEAR(out.get(x, y)[1], sum / wsum, 1e-5 * sum / wsum);
    }
  }
}

TEST(Upsample, SharpGuideKeepsEdge) {
  EnvironmentMap low(32, 16);
  GuideImage guide = flat_guide(64, 32, 0.0f);
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 32; ++x) low.set(x, y, x < 10 ? Rgb{1, 1, 1} : Rgb{8, 8, 8});
  }
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 64; ++x) guide.image.set(x, y, x < 20 ? Rgb{1, 1, 1} : Rgb{8, 8, 8});
  }
  const EnvironmentMap out = joint_bilateral_upsample(low, guide);
  EXPECT_NEAR(out.get(19, 10)[0], 1.0, 1e-3);
  EXPECT_NEAR(out.get(20, 10)[0], 8.0, 1e-3);
  // Without range weighting the same edge is smeared.
  const EnvironmentMap blurred = joint_bilateral_upsample(low, flat_guide(64, 32, 1.0f));
  EXPECT_GT(blurred.get(19, 10)[0], 2.0);
}

TEST(Upsample, AzimuthWraps) {
  EnvironmentMap low(16, 8, 1.0f);
  for (int y = 0; y < 8; ++y) low.set(15, y, {5, 5, 5});
  const EnvironmentMap out = joint_bilateral_upsample(low, flat_guide(32, 16, 1.0f));
  EXPECT_GT(out.get(0, 8)[0], 1.5);  // column 0 sees the last low-res column
  EXPECT_NEAR(out.get(0, 8)[0], out.get(29, 8)[0], 1e-5);
}

TEST(Upsample, RejectsWrongGuideSize) {
  try {
    joint_bilateral_upsample(EnvironmentMap(16, 8), flat_guide(30, 16, 1.0f));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidInput);
  }
}

TEST(Upsample, DefaultRangeSigma) {
  GuideImage g = flat_guide(4, 2, 0.0f);
  for (int x = 0; x < 4; ++x) g.image.set(x, 0, {double(x), double(x), double(x)});
  g.confidence[7] = 0;
  std::vector<double> lum = {0, 1, 2, 3, 0, 0, 0};
  EXPECT_DOUBLE_EQ(default_sigma_range(g), 0.1 * percentile(lum, 0.95));
}
