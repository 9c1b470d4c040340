#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace refmap {

using Rgb = std::array<double, 3>;

/// Row-major 3-channel float image. Row 0 is the top row.
class Image {
 public:
  Image() = default;
  Image(int width, int height, float fill = 0.0f);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }

  float& at(int x, int y, int c) noexcept { return data_[index(x, y) + c]; }
  float at(int x, int y, int c) const noexcept { return data_[index(x, y) + c]; }

  void set(int x, int y, const Rgb& v) noexcept {
    const std::size_t i = index(x, y);
    for (int c = 0; c < 3; ++c) data_[i + c] = static_cast<float>(v[c]);
  }
  Rgb get(int x, int y) const noexcept {
    const std::size_t i = index(x, y);
    return {data_[i], data_[i + 1], data_[i + 2]};
  }

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }

  bool all_finite() const noexcept;

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) * 3;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

/// Mean of the three channels.
inline double luminance(const Rgb& v) { return (v[0] + v[1] + v[2]) / 3.0; }

}  // namespace refmap
