#include "refmap/spherical.hpp"

#include <algorithm>
#include <string>

#include "refmap/error.hpp"

namespace refmap {

Direction::Direction(Vec3 v, Frame frame) : v_(v), frame_(frame) {
  const double n = norm(v);
  if (!(std::abs(n - 1.0) <= kUnitTolerance)) {
    fail(ErrorCode::kContractViolation,
         "direction is not unit length (norm " + std::to_string(n) + ")");
  }
}

Direction Direction::normalized(Vec3 v, Frame frame) {
  const double n = norm(v);
  if (!(n > 1e-300) || !std::isfinite(n)) {
    fail(ErrorCode::kContractViolation, "cannot normalize a zero or non-finite vector");
  }
  return Direction((1.0 / n) * v, frame, Unchecked{});
}

Direction latlong_to_direction(int row, int col, int height, int width) {
  require(height > 0 && width > 0, "lat-long grid must be non-empty");
  require(row >= 0 && row < height && col >= 0 && col < width,
          "lat-long texel index out of range");
  const double theta = kPi * (row + 0.5) / height;
  const double phi = 2.0 * kPi * (col + 0.5) / width;
  const double s = std::sin(theta);
  return Direction::normalized({s * std::cos(phi), std::cos(theta), s * std::sin(phi)});
}

LatLongCoord direction_to_latlong(const Direction& d, int height, int width) {
  require(height > 0 && width > 0, "lat-long grid must be non-empty");
  require(d.frame() == Frame::kWorld, "lat-long lookup needs a world-frame direction");
  const double theta = std::acos(std::clamp(d.y(), -1.0, 1.0));
  double phi = std::atan2(d.z(), d.x());
  if (phi < 0.0) phi += 2.0 * kPi;
  // phi in [0, 2 pi) puts col in [-0.5, width - 0.5); callers wrap.
  return {theta / kPi * height - 0.5, phi / (2.0 * kPi) * width - 0.5};
}

double texel_solid_angle(int row, int height, int width) {
  require(height > 0 && width > 0, "lat-long grid must be non-empty");
  require(row >= 0 && row < height, "lat-long row out of range");
  const double theta = kPi * (row + 0.5) / height;
  return (2.0 * kPi / width) * (kPi / height) * std::sin(theta);
}

SolidAngleTable::SolidAngleTable(int height, int width) : width_(width) {
  per_row_.resize(static_cast<std::size_t>(height));
  for (int r = 0; r < height; ++r) per_row_[static_cast<std::size_t>(r)] = texel_solid_angle(r, height, width);
}

double SolidAngleTable::total() const {
  double sum = 0.0;
  for (double w : per_row_) sum += w * width_;
  return sum;
}

namespace {

void check_radiance(const Rgb& v) {
  for (double c : v) {
    if (!std::isfinite(c)) fail(ErrorCode::kNonFinite, "environment radiance must be finite");
    if (c < 0.0) fail(ErrorCode::kInvalidInput, "environment radiance must be non-negative");
  }
}

}  // namespace

EnvironmentMap::EnvironmentMap(Image image) : image_(std::move(image)) {
  for (float v : image_.data()) {
    if (!std::isfinite(v)) fail(ErrorCode::kNonFinite, "environment radiance must be finite");
    if (v < 0.0f) fail(ErrorCode::kInvalidInput, "environment radiance must be non-negative");
  }
}

EnvironmentMap::EnvironmentMap(int width, int height, float fill)
    : EnvironmentMap(Image(width, height, fill)) {}

void EnvironmentMap::set(int col, int row, const Rgb& v) {
  check_radiance(v);
  image_.set(col, row, v);
}

Rgb sample_latlong(const Image& img, double row, double col) {
  const int h = img.height();
  const int w = img.width();
  row = std::clamp(row, 0.0, static_cast<double>(h - 1));
  const int r0 = std::min(static_cast<int>(std::floor(row)), h - 1);
  const int r1 = std::min(r0 + 1, h - 1);
  const double fr = row - r0;

  const double c_floor = std::floor(col);
  const double fc = col - c_floor;
  int c0 = static_cast<int>(std::fmod(c_floor, static_cast<double>(w)));
  if (c0 < 0) c0 += w;
  const int c1 = (c0 + 1) % w;

  Rgb out{};
  for (int c = 0; c < 3; ++c) {
    const double a = img.at(c0, r0, c);
    const double b = img.at(c1, r0, c);
    const double p = img.at(c0, r1, c);
    const double q = img.at(c1, r1, c);
    // lerp form keeps constants exact
    const double top = a + fc * (b - a);
    const double bottom = p + fc * (q - p);
    out[static_cast<std::size_t>(c)] = top + fr * (bottom - top);
  }
  return out;
}

Rgb EnvironmentMap::lookup(const Direction& d) const {
  const LatLongCoord p = direction_to_latlong(d, height(), width());
  return sample_latlong(image_, p.row, p.col);
}

Rgb EnvironmentMap::integrate() const {
  const SolidAngleTable table(height(), width());
  Rgb sum{};
  for (int r = 0; r < height(); ++r) {
    for (int col = 0; col < width(); ++col) {
      for (int c = 0; c < 3; ++c) sum[static_cast<std::size_t>(c)] += image_.at(col, r, c) * table[r];
    }
  }
  return sum;
}

EnvironmentMap resample_envmap(const EnvironmentMap& src, int width, int height) {
  require(!src.image().empty(), "cannot resample an empty environment map");
  require(width > 0 && height > 0, "resample target size must be positive");
  Image out(width, height);
  const int sw = src.width();
  const int sh = src.height();
  for (int r = 0; r < height; ++r) {
    const double sr = (r + 0.5) * sh / height - 0.5;
    for (int c = 0; c < width; ++c) {
      const double sc = (c + 0.5) * sw / width - 0.5;
      out.set(c, r, sample_latlong(src.image(), sr, sc));
    }
  }
  return EnvironmentMap(std::move(out));
}

}  // namespace refmap
