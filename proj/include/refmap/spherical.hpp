#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "refmap/image.hpp"

namespace refmap {

inline constexpr double kPi = std::numbers::pi;

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }
  friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend Vec3 operator*(Vec3 a, double s) { return s * a; }
  friend bool operator==(Vec3, Vec3) = default;
};

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

enum class Frame { kWorld, kCamera };

/// Unit 3-vector tagged with the frame it is expressed in.
/// World frame: +y up, azimuth measured from +x toward +z.
class Direction {
 public:
  static constexpr double kUnitTolerance = 1e-9;

  /// Throws kContractViolation unless |v| = 1 within kUnitTolerance.
  Direction(Vec3 v, Frame frame = Frame::kWorld);
  /// Normalizes v; throws kContractViolation for (near) zero vectors.
  static Direction normalized(Vec3 v, Frame frame = Frame::kWorld);

  const Vec3& vec() const noexcept { return v_; }
  double x() const noexcept { return v_.x; }
  double y() const noexcept { return v_.y; }
  double z() const noexcept { return v_.z; }
  Frame frame() const noexcept { return frame_; }

 private:
  struct Unchecked {};
  Direction(Vec3 v, Frame frame, Unchecked) : v_(v), frame_(frame) {}

  Vec3 v_;
  Frame frame_;
};

/// Continuous lat-long image coordinates; integer + 0.5 values are texel
/// centers in the usual pixel convention (pixel i spans [i, i+1)).
struct LatLongCoord {
  double row;
  double col;
};

/// Direction at the center of texel (row, col):
/// theta = pi (row + 0.5) / height, phi = 2 pi (col + 0.5) / width.
Direction latlong_to_direction(int row, int col, int height, int width);

/// Inverse of latlong_to_direction. Returns the fractional texel index
/// (texel centers map back to integers). col lies in [-0.5, width - 0.5).
LatLongCoord direction_to_latlong(const Direction& d, int height, int width);

/// Solid angle of a texel in `row`, using sin(theta) at the texel center.
double texel_solid_angle(int row, int height, int width);

/// Per-row solid angles of a lat-long grid.
class SolidAngleTable {
 public:
  SolidAngleTable(int height, int width);

  double operator[](int row) const { return per_row_[static_cast<std::size_t>(row)]; }
  int height() const noexcept { return static_cast<int>(per_row_.size()); }
  int width() const noexcept { return width_; }
  /// Sum over all texels.
  double total() const;

 private:
  int width_;
  std::vector<double> per_row_;
};

/// HDR spherical radiance in lat-long layout. Channel values are finite
/// and non-negative.
class EnvironmentMap {
 public:
  EnvironmentMap() = default;
  /// Validates the radiance invariants; throws kInvalidInput otherwise.
  explicit EnvironmentMap(Image image);
  EnvironmentMap(int width, int height, float fill = 0.0f);

  int width() const noexcept { return image_.width(); }
  int height() const noexcept { return image_.height(); }
  const Image& image() const noexcept { return image_; }

  Rgb get(int col, int row) const noexcept { return image_.get(col, row); }
  /// Assignment with validation of the written value.
  void set(int col, int row, const Rgb& v);

  /// Bilinear lookup along a direction, wrapping in azimuth.
  Rgb lookup(const Direction& d) const;

  /// Sum over texels of radiance times texel solid angle, per channel.
  Rgb integrate() const;

  friend bool operator==(const EnvironmentMap&, const EnvironmentMap&) = default;

 private:
  Image image_;
};

/// Bilinear resampling in lat-long coordinates; azimuth wraps, the polar
/// axis clamps at the poles.
EnvironmentMap resample_envmap(const EnvironmentMap& src, int width, int height);

/// Bilinear sample of an image at fractional texel index (row, col) with
/// wraparound in columns and clamping in rows.
Rgb sample_latlong(const Image& img, double row, double col);

}  // namespace refmap
