#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "refmap/image.hpp"
#include "refmap/spherical.hpp"

namespace refmap {

inline constexpr int kDefaultResolution = 128;

/// Orthographic image of a sphere, one pixel per surface normal. Pixels
/// outside the unit disk are masked out and hold zero.
class ReflectanceMap {
 public:
  ReflectanceMap() = default;
  explicit ReflectanceMap(int resolution);
  /// Adopts a square image; pixels outside the disk are cleared. Throws
  /// kInvalidInput for non-square input or negative values inside the disk,
  /// kNonFinite for NaN/Inf inside the disk.
  explicit ReflectanceMap(Image image);

  int resolution() const noexcept { return image_.width(); }
  bool valid(int x, int y) const noexcept {
    return mask_[static_cast<std::size_t>(y) * static_cast<std::size_t>(resolution()) +
                 static_cast<std::size_t>(x)] != 0;
  }
  const std::vector<unsigned char>& mask() const noexcept { return mask_; }
  std::size_t valid_count() const noexcept;

  const Image& image() const noexcept { return image_; }
  Rgb get(int x, int y) const noexcept { return image_.get(x, y); }
  /// Writes to a valid pixel; writes to masked pixels are ignored.
  void set(int x, int y, const Rgb& v) noexcept {
    if (valid(x, y)) image_.set(x, y, v);
  }

  friend bool operator==(const ReflectanceMap&, const ReflectanceMap&) = default;

 private:
  Image image_;
  std::vector<unsigned char> mask_;
};

/// Phong parameters: per-channel diffuse and specular colors and a shared
/// glossiness exponent.
struct PhongMaterial {
  Rgb kd{};
  Rgb ks{};
  double kg = 1.0;

  /// Throws kInvalidInput unless all values are finite, colors >= 0, kg >= 1.
  void validate() const;

  friend bool operator==(const PhongMaterial&, const PhongMaterial&) = default;
};

/// Orthographic camera orbiting the sphere. Azimuth is measured in the
/// world xz-plane from +x toward +z, declination is the elevation above it.
/// Camera frame: +z points toward the viewer, +y is up in the image.
class ViewPose {
 public:
  ViewPose() : ViewPose(0.0, 0.0) {}
  ViewPose(double azimuth, double declination);

  double azimuth() const noexcept { return azimuth_; }
  double declination() const noexcept { return declination_; }

  /// World-frame direction from the sphere toward the viewer.
  Vec3 view_direction() const noexcept { return forward_; }
  Vec3 to_world(const Vec3& cam) const noexcept {
    return cam.x * right_ + cam.y * up_ + cam.z * forward_;
  }
  Vec3 to_camera(const Vec3& world) const noexcept {
    return {dot(world, right_), dot(world, up_), dot(world, forward_)};
  }
  /// Columns of the camera-to-world rotation.
  std::array<Vec3, 3> rotation() const noexcept { return {right_, up_, forward_}; }

 private:
  double azimuth_;
  double declination_;
  Vec3 right_, up_, forward_;
};

/// Camera-frame normal seen at pixel (x, y), or nothing outside the disk.
std::optional<Direction> sphere_normal(int x, int y, int resolution);

/// Mirror of d about n: 2 (n.d) n - d.
Direction reflect(const Direction& d, const Direction& n);

/// Diffuse reflectance map: per pixel sum of L(w) max(n.w, 0) dw.
ReflectanceMap render_diffuse_rm(const EnvironmentMap& env, const ViewPose& view,
                                 int resolution = kDefaultResolution);

/// Specular reflectance map for one glossiness:
/// per pixel sum of L(w) max(r(w, n).w_o, 0)^kg dw.
ReflectanceMap render_specular_rm(const EnvironmentMap& env, const ViewPose& view, double kg,
                                  int resolution = kDefaultResolution);

/// Specular maps for several glossiness values in one pass (ascending).
std::vector<ReflectanceMap> render_specular_rms(const EnvironmentMap& env, const ViewPose& view,
                                                std::span<const double> glosses,
                                                int resolution = kDefaultResolution);

/// kd * L_d + ks * L_s,kg per channel.
ReflectanceMap combine_reflectance(const ReflectanceMap& diffuse, const ReflectanceMap& specular,
                                   const PhongMaterial& material);

ReflectanceMap render_reflectance_map(const EnvironmentMap& env, const PhongMaterial& material,
                                      const ViewPose& view, int resolution = kDefaultResolution);

/// Ideal mirror: each pixel shows the environment in the mirrored view
/// direction (bilinear lookup, no lobe).
ReflectanceMap render_mirror_rm(const EnvironmentMap& env, const ViewPose& view,
                                int resolution = kDefaultResolution);

/// Environment that is dark except for a cap of angular `radius` around d
/// with constant radiance and total flux (sum of L dw) equal to
/// total_flux in every channel. Throws kContractViolation if the cap
/// would be smaller than one texel or contains no texel center.
EnvironmentMap point_light_env(const Direction& d, double total_flux, double radius,
                               int width = kDefaultResolution, int height = kDefaultResolution);

}  // namespace refmap
