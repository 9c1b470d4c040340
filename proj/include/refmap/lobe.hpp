#pragma once

#include <span>
#include <vector>

#include "refmap/image.hpp"
#include "refmap/spherical.hpp"

namespace refmap {

/// Environment texels prepared for lobe integration: per-row and per-column
/// direction factors, and radiance times solid angle per channel.
class EnvTexels {
 public:
  explicit EnvTexels(const EnvironmentMap& env);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  struct Rows {
    std::vector<double> theta, sin_theta, cos_theta;
    std::vector<unsigned char> dark;  // row carries no radiance at all
  };

 private:
  friend class LobeIntegrator;

  int width_;
  int height_;
  std::vector<double> cos_phi_, sin_phi_;
  std::vector<double> w_[3];
  Rows rows_;
};

/// Evaluates clamped cosine-power lobes over an environment:
///   S_k(axis) = sum_texels w(texel) * max(axis . dir(texel), 0)^k
/// for an ascending list of exponents at once. Terms whose lobe factor is
/// below kTermCutoff are dropped, so the absolute error of every sum is at
/// most kTermCutoff times the environment's total flux.
///
/// Holds scratch buffers; use one instance per thread.
class LobeIntegrator {
 public:
  static constexpr double kTermCutoff = 1e-13;

  explicit LobeIntegrator(const EnvTexels& texels) : texels_(&texels) {}

  /// Single lobe; exponent 1 gives the clamped cosine (diffuse) sum.
  Rgb evaluate(const Vec3& axis, double exponent) const;

  /// exponents must be ascending and >= 1. out.size() == exponents.size().
  void evaluate(const Vec3& axis, std::span<const double> exponents, std::span<Rgb> out);

 private:
  void gather(const Vec3& axis, double min_cos);

  const EnvTexels* texels_;
  std::vector<double> cos_, log_cos_, wr_, wg_, wb_;
  std::vector<int> level_count_;
  std::vector<double> s_log_, s_cos_, s_r_, s_g_, s_b_;
  std::vector<int> bucket_, start_;
  std::size_t gathered_ = 0;
};

}  // namespace refmap
