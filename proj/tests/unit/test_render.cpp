#include <gtest/gtest.h>

#include <cmath>

#include "refmap/error.hpp"
#include "refmap/render.hpp"
#include "refmap/rng.hpp"
#include "support/oracles.hpp"

using namespace refmap;

namespace {

double max_rel_diff(const Image& a, const Image& b) {
  double peak = 0.0, worst = 0.0;
  for (float v : b.data()) peak = std::max(peak, double(v));
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    const double r = b.data()[i];
    worst = std::max(worst, std::abs(a.data()[i] - r) / std::max(std::abs(r), 1e-6 * peak));
  }
  return worst;
}

}  // namespace

TEST(SphereNormal, DiskAndOrientation) {
  EXPECT_FALSE(sphere_normal(0, 0, 16).has_value());
  const auto center = sphere_normal(8, 8, 17);
  ASSERT_TRUE(center.has_value());
  EXPECT_NEAR(center->z(), 1.0, 1e-12);
  const auto top = sphere_normal(8, 0, 17);
  ASSERT_TRUE(top.has_value());
  EXPECT_GT(top->y(), 0.9);  // image row 0 is up
  const auto right = sphere_normal(16, 8, 17);
  EXPECT_GT(right->x(), 0.9);
  EXPECT_EQ(center->frame(), Frame::kCamera);
}

TEST(ViewPose, OrthonormalAndRoundTrip) {
  const ViewPose v(2.3, -0.4);
  const auto r = v.rotation();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(dot(r[i], r[j]), i == j ? 1.0 : 0.0, 1e-12);
  }
  const oracle::Camera cam = oracle::camera(2.3, -0.4);
  EXPECT_NEAR(v.view_direction().x, cam.toward.x, 1e-12);
  EXPECT_NEAR(v.view_direction().y, cam.toward.y, 1e-12);
  const Vec3 p{0.3, -0.5, 0.8};
  const Vec3 q = v.to_camera(v.to_world(p));
  EXPECT_NEAR(q.x, p.x, 1e-12);
  EXPECT_NEAR(q.z, p.z, 1e-12);
  EXPECT_THROW(ViewPose(0.0, kPi / 2), Error);
}

TEST(Reflect, MirrorsAboutNormal) {
  const Direction n({0.0, 1.0, 0.0});
  const Direction d = Direction::normalized({1.0, 1.0, 0.0});
  const Direction r = reflect(d, n);
  EXPECT_NEAR(r.x(), -d.x(), 1e-15);
  EXPECT_NEAR(r.y(), d.y(), 1e-15);
}

TEST(Render, MatchesNaiveLoop) {
  refmap::Rng rng(8);
  for (int trial = 0; trial < 6; ++trial) {
    const EnvironmentMap env = oracle::synthetic_env(24, 12, 20 + static_cast<std::uint64_t>(trial));
    PhongMaterial m{{rng.uniform(), rng.uniform(), rng.uniform()}, {rng.uniform(), rng.uniform(), rng.uniform()},
                    std::exp(rng.uniform(0.0, std::log(1024.0)))};
    const double az = rng.uniform(0.0, 6.28), decl = rng.uniform(-1.0, 1.0);
    EXPECT_LE(max_rel_diff(render_reflectance_map(env, m, ViewPose(az, decl), 20).image(),
                           oracle::render(env, m, az, decl, 20)),
              1e-5)
        << trial;
  }
}

TEST(Render, MultiLevelMatchesSingleLevel) {
  const EnvironmentMap env = oracle::synthetic_env(48, 24, 5);
  const ViewPose view(0.4, 0.1);
  const double levels[] = {1.0, 3.7, 50.0, 1024.0};
  const auto maps = render_specular_rms(env, view, levels, 24);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_LE(max_rel_diff(maps[i].image(), render_specular_rm(env, view, levels[i], 24).image()), 1e-9);
  }
}

TEST(Render, ConstantEnvAnalytic) {
  const EnvironmentMap env(64, 64, 1.0f);
  const ViewPose view(1.0, 0.0);
  const ReflectanceMap d = render_diffuse_rm(env, view, 32);
  const ReflectanceMap s = render_specular_rm(env, view, 10.0, 32);
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 32; ++x) {
      if (!d.valid(x, y)) continue;
      EXPECT_NEAR(d.get(x, y)[0], kPi, 0.01 * kPi);
      EXPECT_NEAR(s.get(x, y)[1], 2.0 * kPi / 11.0, 0.02 * 2.0 * kPi / 11.0);
    }
  }
}

TEST(Render, Linearity) {
  const EnvironmentMap env = oracle::synthetic_env(32, 32, 6);
  const ViewPose view(3.0, -0.1);
  const PhongMaterial m{{0.2, 0.5, 0.9}, {0.0, 0.0, 0.0}, 7.0};
  const ReflectanceMap diffuse = render_diffuse_rm(env, view, 16);
  const ReflectanceMap only_kd = render_reflectance_map(env, m, view, 16);
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 16; ++x) {
      for (int c = 0; c < 3; ++c) {
        EXPECT_EQ(only_kd.image().at(x, y, c), static_cast<float>(m.kd[c] * diffuse.image().at(x, y, c)));
      }
    }
  }
  const PhongMaterial spec{{0, 0, 0}, {1, 1, 1}, 7.0};
  EXPECT_EQ(render_reflectance_map(env, spec, view, 16), render_specular_rm(env, view, 7.0, 16));

  const PhongMaterial m1{{0.1, 0.2, 0.3}, {0.4, 0.1, 0.0}, 20.0}, m2{{0.3, 0.0, 0.2}, {0.1, 0.5, 0.6}, 20.0};
  const PhongMaterial sum{{0.4, 0.2, 0.5}, {0.5, 0.6, 0.6}, 20.0};
  const Image a = render_reflectance_map(env, m1, view, 16).image();
  const Image b = render_reflectance_map(env, m2, view, 16).image();
  const Image ab = render_reflectance_map(env, sum, view, 16).image();
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    EXPECT_NEAR(a.data()[i] + b.data()[i], ab.data()[i], 1e-6 * ab.data()[i] + 1e-30);
  }
}

TEST(Render, BlackEnvGivesBlack) {
  const EnvironmentMap env(16, 16);
  const ReflectanceMap rm = render_reflectance_map(env, {{1, 1, 1}, {1, 1, 1}, 5.0}, ViewPose(), 16);
  for (float v : rm.image().data()) EXPECT_EQ(v, 0.0f);
}

TEST(Render, AzimuthRotationEquivariance) {
  // Shifting the lat-long columns by s rotates the world by 2 pi s / W
  // about +y; rotating the camera by the same angle gives the same image.
  const int w = 32, h = 16, s = 5;
  const EnvironmentMap env = oracle::synthetic_env(w, h, 77);
  EnvironmentMap shifted(w, h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) shifted.set((c + s) % w, r, env.get(c, r));
  }
  const double delta = 2.0 * kPi * s / w;
  const PhongMaterial m{{0.3, 0.3, 0.3}, {0.7, 0.7, 0.7}, 40.0};
  const Image a = render_reflectance_map(env, m, ViewPose(0.5, 0.2), 24).image();
  const Image b = render_reflectance_map(shifted, m, ViewPose(0.5 + delta, 0.2), 24).image();
  EXPECT_LE(max_rel_diff(b, a), 1e-6);
}

TEST(Render, HighGlossApproachesMirror) {
  // A smooth env and a very sharp lobe: the specular map is the mirror
  // image scaled by the lobe integral 2 pi / (k + 1). The lobe is about
  // 0.01 rad wide, so the env texels must be finer than that.
  Image img(1024, 512);
  for (int r = 0; r < 512; ++r) {
    for (int c = 0; c < 1024; ++c) {
      const Direction d = latlong_to_direction(r, c, 512, 1024);
      img.set(c, r, {1.0 + 0.5 * d.y(), 1.0 + 0.3 * d.x(), 1.2 - 0.2 * d.z()});
    }
  }
  const EnvironmentMap env(img);
  const ViewPose view(0.2, 0.05);
  const double k = 1e4;
  const ReflectanceMap spec = render_specular_rm(env, view, k, 32);
  const ReflectanceMap mirror = render_mirror_rm(env, view, 32);
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 32; ++x) {
      if (!spec.valid(x, y)) continue;
      for (int c = 0; c < 3; ++c) {
        const double expect = mirror.get(x, y)[c] * 2.0 * kPi / (k + 1.0);
        EXPECT_NEAR(spec.get(x, y)[c], expect, 0.05 * expect);
      }
    }
  }
}

TEST(PointLight, FluxAndPeak) {
  const Direction d = Direction::normalized({0.3, 0.5, -0.4});
  const EnvironmentMap env = point_light_env(d, 2.5, 5.0 * kPi / 180.0, 128, 128);
  for (double v : env.integrate()) EXPECT_NEAR(v, 2.5, 2.5e-3);
  EXPECT_THROW(point_light_env(d, 1.0, 0.01, 128, 128), Error);

  // White diffuse sphere seen from the light's side: brightest pixel has
  // its normal within a texel of the light.
  const ViewPose view(std::atan2(d.z(), d.x()), 0.3);
  const ReflectanceMap rm = render_reflectance_map(env, {{1, 1, 1}, {0, 0, 0}, 1.0}, view, 64);
  int bx = 0, by = 0;
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) {
      if (rm.get(x, y)[0] > rm.get(bx, by)[0]) bx = x, by = y;
    }
  }
  const Vec3 n = view.to_world(sphere_normal(bx, by, 64)->vec());
  const double angle = std::acos(std::min(1.0, dot(n, d.vec())));
  EXPECT_LE(angle, 2.0 * 2.0 / 64.0 + kPi / 128.0);

  // Two separated lights add up.
  const Direction d2 = Direction::normalized({-0.6, 0.2, 0.5});
  const EnvironmentMap env2 = point_light_env(d2, 1.0, 0.1, 64, 64);
  const EnvironmentMap env1 = point_light_env(d, 1.0, 0.1, 64, 64);
  Image both = env1.image();
  for (std::size_t i = 0; i < both.data().size(); ++i) both.data()[i] += env2.image().data()[i];
  const PhongMaterial m{{0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}, 30.0};
  const Image r1 = render_reflectance_map(env1, m, view, 32).image();
  const Image r2 = render_reflectance_map(env2, m, view, 32).image();
  const Image r12 = render_reflectance_map(EnvironmentMap(both), m, view, 32).image();
  for (std::size_t i = 0; i < r1.data().size(); ++i) {
    EXPECT_NEAR(r1.data()[i] + r2.data()[i], r12.data()[i], 1e-5 * r12.data()[i] + 1e-12);
  }
}

TEST(ReflectanceMap, MaskAndValidation) {
  const ReflectanceMap rm(8);
  EXPECT_FALSE(rm.valid(0, 0));
  EXPECT_TRUE(rm.valid(4, 4));
  Image img(8, 8, 1.0f);
  const ReflectanceMap adopted(img);
  EXPECT_EQ(adopted.get(0, 0)[0], 0.0);
  EXPECT_EQ(adopted.get(4, 4)[0], 1.0);
  EXPECT_THROW(ReflectanceMap(Image(8, 4)), Error);
  img.at(4, 4, 0) = -1.0f;
  EXPECT_THROW(ReflectanceMap{img}, Error);
  EXPECT_THROW((PhongMaterial{{0, 0, 0}, {0, 0, 0}, 0.5}.validate()), Error);
}
