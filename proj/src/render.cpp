#include "refmap/render.hpp"

#include <cmath>
#include <memory>
#include <string>

#include "refmap/error.hpp"
#include "refmap/lobe.hpp"
#include "refmap/parallel.hpp"

namespace refmap {

namespace {

std::vector<unsigned char> disk_mask(int resolution) {
  std::vector<unsigned char> mask(static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution));
  for (int y = 0; y < resolution; ++y) {
    for (int x = 0; x < resolution; ++x) {
      mask[static_cast<std::size_t>(y) * static_cast<std::size_t>(resolution) + static_cast<std::size_t>(x)] =
          sphere_normal(x, y, resolution).has_value() ? 1 : 0;
    }
  }
  return mask;
}

// Runs shade(integrator, world normal, pixel) over the valid pixels of a
// fresh map, one integrator per worker.
template <typename Shade>
void shade_pixels(const EnvTexels& texels, const ViewPose& view, int resolution, Shade&& shade) {
  std::vector<std::unique_ptr<LobeIntegrator>> integrators(static_cast<std::size_t>(thread_count()));
  parallel_for(resolution, [&](int worker, int y) {
    auto& slot = integrators[static_cast<std::size_t>(worker)];
    if (!slot) slot = std::make_unique<LobeIntegrator>(texels);
    for (int x = 0; x < resolution; ++x) {
      const auto n_cam = sphere_normal(x, y, resolution);
      if (!n_cam) continue;
      shade(*slot, view.to_world(n_cam->vec()), x, y);
    }
  });
}

}  // namespace

ReflectanceMap::ReflectanceMap(int resolution)
    : image_(resolution, resolution), mask_(disk_mask(resolution)) {
  require(resolution > 0, "reflectance map resolution must be positive");
}

ReflectanceMap::ReflectanceMap(Image image) : image_(std::move(image)) {
  if (image_.width() != image_.height() || image_.empty()) {
    fail(ErrorCode::kInvalidInput, "reflectance map must be a non-empty square image");
  }
  mask_ = disk_mask(image_.width());
  const int res = image_.width();
  for (int y = 0; y < res; ++y) {
    for (int x = 0; x < res; ++x) {
      if (!valid(x, y)) {
        image_.set(x, y, {0.0, 0.0, 0.0});
        continue;
      }
      for (int c = 0; c < 3; ++c) {
        const float v = image_.at(x, y, c);
        if (!std::isfinite(v)) fail(ErrorCode::kNonFinite, "reflectance map holds a non-finite value");
        if (v < 0.0f) fail(ErrorCode::kInvalidInput, "reflectance map holds a negative value");
      }
    }
  }
}

std::size_t ReflectanceMap::valid_count() const noexcept {
  std::size_t n = 0;
  for (unsigned char m : mask_) n += m;
  return n;
}

void PhongMaterial::validate() const {
  for (int c = 0; c < 3; ++c) {
    const double d = kd[static_cast<std::size_t>(c)];
    const double s = ks[static_cast<std::size_t>(c)];
    if (!std::isfinite(d) || !std::isfinite(s) || d < 0.0 || s < 0.0) {
      fail(ErrorCode::kInvalidInput, "material colors must be finite and non-negative");
    }
  }
  if (!std::isfinite(kg) || kg < 1.0) fail(ErrorCode::kInvalidInput, "glossiness must be finite and >= 1");
}

ViewPose::ViewPose(double azimuth, double declination)
    : azimuth_(azimuth), declination_(declination) {
  if (!std::isfinite(azimuth) || !std::isfinite(declination) ||
      std::abs(declination) >= kPi / 2.0 - 1e-6) {
    fail(ErrorCode::kContractViolation, "view declination must lie strictly inside (-pi/2, pi/2)");
  }
  const double cd = std::cos(declination);
  forward_ = {cd * std::cos(azimuth), std::sin(declination), cd * std::sin(azimuth)};
  const Vec3 world_up{0.0, 1.0, 0.0};
  const Vec3 r = cross(world_up, forward_);
  right_ = (1.0 / norm(r)) * r;
  up_ = cross(forward_, right_);
}

std::optional<Direction> sphere_normal(int x, int y, int resolution) {
  const double u = 2.0 * (x + 0.5) / resolution - 1.0;
  const double v = 1.0 - 2.0 * (y + 0.5) / resolution;
  const double r2 = u * u + v * v;
  if (r2 > 1.0) return std::nullopt;
  return Direction::normalized({u, v, std::sqrt(1.0 - r2)}, Frame::kCamera);
}

Direction reflect(const Direction& d, const Direction& n) {
  require(d.frame() == n.frame(), "reflect needs both directions in the same frame");
  const Vec3 r = 2.0 * dot(n.vec(), d.vec()) * n.vec() - d.vec();
  return Direction::normalized(r, d.frame());
}

ReflectanceMap render_diffuse_rm(const EnvironmentMap& env, const ViewPose& view, int resolution) {
  const EnvTexels texels(env);
  ReflectanceMap rm(resolution);
  const double cosine[1] = {1.0};
  shade_pixels(texels, view, resolution, [&](LobeIntegrator& lobes, const Vec3& n, int x, int y) {
    Rgb v;
    lobes.evaluate(n, cosine, std::span<Rgb>(&v, 1));
    rm.set(x, y, v);
  });
  return rm;
}

std::vector<ReflectanceMap> render_specular_rms(const EnvironmentMap& env, const ViewPose& view,
                                                std::span<const double> glosses, int resolution) {
  for (double k : glosses) {
    if (!(k >= 1.0) || !std::isfinite(k)) fail(ErrorCode::kContractViolation, "glossiness must be >= 1");
  }
  const EnvTexels texels(env);
  std::vector<ReflectanceMap> maps(glosses.size(), ReflectanceMap(resolution));
  if (glosses.empty()) return maps;
  const Vec3 w_o = view.view_direction();
  std::vector<std::vector<Rgb>> sums(static_cast<std::size_t>(thread_count()),
                                     std::vector<Rgb>(glosses.size()));
  std::vector<std::unique_ptr<LobeIntegrator>> integrators(static_cast<std::size_t>(thread_count()));
  parallel_for(resolution, [&](int worker, int y) {
    auto& slot = integrators[static_cast<std::size_t>(worker)];
    if (!slot) slot = std::make_unique<LobeIntegrator>(texels);
    auto& out = sums[static_cast<std::size_t>(worker)];
    for (int x = 0; x < resolution; ++x) {
      const auto n_cam = sphere_normal(x, y, resolution);
      if (!n_cam) continue;
      const Vec3 n = view.to_world(n_cam->vec());
      // max(r(w, n).w_o, 0) = max(w.r(w_o, n), 0): integrate around the
      // mirrored view direction.
      const Vec3 axis = 2.0 * dot(n, w_o) * n - w_o;
      slot->evaluate(axis, glosses, out);
      for (std::size_t i = 0; i < glosses.size(); ++i) maps[i].set(x, y, out[i]);
    }
  });
  return maps;
}

ReflectanceMap render_specular_rm(const EnvironmentMap& env, const ViewPose& view, double kg,
                                  int resolution) {
  const double gloss[1] = {kg};
  return std::move(render_specular_rms(env, view, gloss, resolution).front());
}

ReflectanceMap combine_reflectance(const ReflectanceMap& diffuse, const ReflectanceMap& specular,
                                   const PhongMaterial& material) {
  require(diffuse.resolution() == specular.resolution(), "basis maps differ in resolution");
  const int res = diffuse.resolution();
  ReflectanceMap out(res);
  for (int y = 0; y < res; ++y) {
    for (int x = 0; x < res; ++x) {
      if (!out.valid(x, y)) continue;
      const Rgb d = diffuse.get(x, y);
      const Rgb s = specular.get(x, y);
      Rgb v;
      for (std::size_t c = 0; c < 3; ++c) v[c] = material.kd[c] * d[c] + material.ks[c] * s[c];
      out.set(x, y, v);
    }
  }
  return out;
}

ReflectanceMap render_reflectance_map(const EnvironmentMap& env, const PhongMaterial& material,
                                      const ViewPose& view, int resolution) {
  material.validate();
  const bool has_diffuse = material.kd != Rgb{0.0, 0.0, 0.0};
  const bool has_specular = material.ks != Rgb{0.0, 0.0, 0.0};
  const ReflectanceMap diffuse = has_diffuse ? render_diffuse_rm(env, view, resolution) : ReflectanceMap(resolution);
  const ReflectanceMap specular =
      has_specular ? render_specular_rm(env, view, material.kg, resolution) : ReflectanceMap(resolution);
  return combine_reflectance(diffuse, specular, material);
}

ReflectanceMap render_mirror_rm(const EnvironmentMap& env, const ViewPose& view, int resolution) {
  ReflectanceMap rm(resolution);
  const Vec3 w_o = view.view_direction();
  parallel_for(resolution, [&](int, int y) {
    for (int x = 0; x < resolution; ++x) {
      const auto n_cam = sphere_normal(x, y, resolution);
      if (!n_cam) continue;
      const Vec3 n = view.to_world(n_cam->vec());
      const Vec3 r = 2.0 * dot(n, w_o) * n - w_o;
      rm.set(x, y, env.lookup(Direction::normalized(r)));
    }
  });
  return rm;
}

EnvironmentMap point_light_env(const Direction& d, double total_flux, double radius, int width,
                               int height) {
  require(d.frame() == Frame::kWorld, "point light direction must be in the world frame");
  require(std::isfinite(total_flux) && total_flux >= 0.0, "point light flux must be finite and >= 0");
  require(radius >= kPi / height,
          "point light radius " + std::to_string(radius) + " is below one texel (" +
              std::to_string(kPi / height) + " rad)");
  const double min_cos = std::cos(radius);
  const SolidAngleTable solid(height, width);
  double cap_solid_angle = 0.0;
  std::vector<unsigned char> inside(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      if (dot(latlong_to_direction(r, c, height, width).vec(), d.vec()) >= min_cos) {
        inside[static_cast<std::size_t>(r) * static_cast<std::size_t>(width) + static_cast<std::size_t>(c)] = 1;
        cap_solid_angle += solid[r];
      }
    }
  }
  require(cap_solid_angle > 0.0, "point light cap contains no texel center");
  const double radiance = total_flux / cap_solid_angle;
  EnvironmentMap env(width, height);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      if (inside[static_cast<std::size_t>(r) * static_cast<std::size_t>(width) + static_cast<std::size_t>(c)]) {
        env.set(c, r, {radiance, radiance, radiance});
      }
    }
  }
  return env;
}

}  // namespace refmap
