#include "refmap/lobe.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>

#include "refmap/error.hpp"

// Compiled with -ffast-math (see src/CMakeLists.txt) so the reductions
// vectorize. No NaN/Inf checks are performed in this file.

namespace refmap {
namespace {

// Inline, branch-free log/exp so the lobe loop vectorizes without calls.
// Relative error is a few ulp for normal positive inputs (log) and for
// arguments in [-745, 0] (exp).
inline double lobe_log(double x) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  bits += 0x3ff0000000000000ULL - 0x3fe6a09e667f3bcdULL;
  const double k = static_cast<double>(static_cast<std::int64_t>(bits >> 52) - 0x3ff);
  bits = (bits & 0x000fffffffffffffULL) + 0x3fe6a09e667f3bcdULL;
  const double m = std::bit_cast<double>(bits);
  const double f = m - 1.0;
  const double s = f / (2.0 + f);
  const double z = s * s;
  double p = 1.0 / 21.0;
  p = p * z + 1.0 / 19.0;
  p = p * z + 1.0 / 17.0;
  p = p * z + 1.0 / 15.0;
  p = p * z + 1.0 / 13.0;
  p = p * z + 1.0 / 11.0;
  p = p * z + 1.0 / 9.0;
  p = p * z + 1.0 / 7.0;
  p = p * z + 1.0 / 5.0;
  p = p * z + 1.0 / 3.0;
  constexpr double kLn2Hi = 6.93147180369123816490e-01;
  constexpr double kLn2Lo = 1.90821492927058770002e-10;
  return k * kLn2Hi + (2.0 * s + 2.0 * s * z * p + k * kLn2Lo);
}


inline double lobe_exp(double x) {
  constexpr double kLog2e = 1.4426950408889634;
  constexpr double kLn2Hi = 6.93147180369123816490e-01;
  constexpr double kLn2Lo = 1.90821492927058770002e-10;
  const double n = std::floor(x * kLog2e + 0.5);
  const double r = (x - n * kLn2Hi) - n * kLn2Lo;
  double p = 1.0 / 6227020800.0;
  p = p * r + 1.0 / 479001600.0;
  p = p * r + 1.0 / 39916800.0;
  p = p * r + 1.0 / 3628800.0;
  p = p * r + 1.0 / 362880.0;
  p = p * r + 1.0 / 40320.0;
  p = p * r + 1.0 / 5040.0;
  p = p * r + 1.0 / 720.0;
  p = p * r + 1.0 / 120.0;
  p = p * r + 1.0 / 24.0;
  p = p * r + 1.0 / 6.0;
  p = p * r + 0.5;
  p = p * r + 1.0;
  p = p * r + 1.0;
  const std::uint64_t scale = static_cast<std::uint64_t>(static_cast<std::int64_t>(n) + 1023) << 52;
  return p * std::bit_cast<double>(scale);
}

}  // namespace

EnvTexels::EnvTexels(const EnvironmentMap& env) : width_(env.width()), height_(env.height()) {
  require(width_ > 0 && height_ > 0, "environment map is empty");
  const std::size_t n = static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  for (auto& w : w_) w.resize(n);
  cos_phi_.resize(static_cast<std::size_t>(width_));
  sin_phi_.resize(static_cast<std::size_t>(width_));
  for (int c = 0; c < width_; ++c) {
    const double phi = 2.0 * kPi * (c + 0.5) / width_;
    cos_phi_[static_cast<std::size_t>(c)] = std::cos(phi);
    sin_phi_[static_cast<std::size_t>(c)] = std::sin(phi);
  }
  rows_.theta.resize(static_cast<std::size_t>(height_));
  rows_.sin_theta.resize(static_cast<std::size_t>(height_));
  rows_.cos_theta.resize(static_cast<std::size_t>(height_));
  rows_.dark.assign(static_cast<std::size_t>(height_), 1);

  const SolidAngleTable solid(height_, width_);
  for (int r = 0; r < height_; ++r) {
    const auto ri = static_cast<std::size_t>(r);
    const double theta = kPi * (r + 0.5) / height_;
    rows_.theta[ri] = theta;
    rows_.sin_theta[ri] = std::sin(theta);
    rows_.cos_theta[ri] = std::cos(theta);
    for (int c = 0; c < width_; ++c) {
      const std::size_t i = ri * static_cast<std::size_t>(width_) + static_cast<std::size_t>(c);
      const Rgb radiance = env.get(c, r);
      for (int ch = 0; ch < 3; ++ch) {
        w_[ch][i] = radiance[static_cast<std::size_t>(ch)] * solid[r];
        if (w_[ch][i] != 0.0) rows_.dark[ri] = 0;
      }
    }
  }
}

namespace {

// Calls visit(row, row_base, begin, end) for runs of texels in one row that
// cover every texel with axis.dir >= min_cos. Runs are padded by a texel,
// so callers still apply the exact test per texel.
template <typename Visit>
void for_each_cap_run(const EnvTexels::Rows& rows, int width, const Vec3& axis, double min_cos,
                      Visit&& visit) {
  const int height = static_cast<int>(rows.theta.size());
  const double axis_theta = std::acos(std::clamp(axis.y, -1.0, 1.0));
  const double axis_phi = std::atan2(axis.z, axis.x);
  const double cap = std::acos(std::clamp(min_cos, -1.0, 1.0));
  const double row_margin = kPi / height;
  const double col_margin = 2.0 * kPi / width;
  const double cos_a = std::cos(axis_theta);
  const double sin_a = std::sin(axis_theta);

  for (int r = 0; r < height; ++r) {
    const auto ri = static_cast<std::size_t>(r);
    if (rows.dark[ri]) continue;
    const double theta = rows.theta[ri];
    if (std::abs(theta - axis_theta) > cap + row_margin) continue;

    int lo = 0;
    int hi = width - 1;
    const double s = rows.sin_theta[ri] * sin_a;
    if (s > 1e-9) {
      const double cos_half = (min_cos - rows.cos_theta[ri] * cos_a) / s;
      if (cos_half > 1.0 + 1e-9) continue;
      if (cos_half > -1.0) {
        const double half = std::acos(std::min(cos_half, 1.0)) + col_margin;
        const double scale = width / (2.0 * kPi);
        lo = static_cast<int>(std::ceil((axis_phi - half) * scale - 0.5));
        hi = static_cast<int>(std::floor((axis_phi + half) * scale - 0.5));
        if (hi - lo + 1 >= width) {
          lo = 0;
          hi = width - 1;
        }
      }
    }

    const std::size_t row_base = static_cast<std::size_t>(r) * static_cast<std::size_t>(width);
    // [lo, hi] may wrap around the seam; visit it as up to two runs
    const int first = ((lo % width) + width) % width;
    const int count = hi - lo + 1;
    if (first + count <= width) {
      visit(ri, row_base, first, first + count);
    } else {
      visit(ri, row_base, first, width);
      visit(ri, row_base, 0, first + count - width);
    }
  }
}

}  // namespace

void LobeIntegrator::gather(const Vec3& axis, double min_cos) {
  const EnvTexels& t = *texels_;
  const std::size_t capacity = static_cast<std::size_t>(t.width_) * static_cast<std::size_t>(t.height_);
  if (cos_.size() < capacity) {
    for (auto* v : {&cos_, &wr_, &wg_, &wb_, &log_cos_, &s_log_, &s_cos_, &s_r_, &s_g_, &s_b_}) {
      v->resize(capacity);
    }
    bucket_.resize(capacity);
  }

  std::size_t n = 0;
  for_each_cap_run(t.rows_, t.width_, axis, min_cos,
                   [&](std::size_t row, std::size_t base, int begin, int end) {
                     const double* cp = t.cos_phi_.data();
                     const double* sp = t.sin_phi_.data();
                     const double ax = t.rows_.sin_theta[row] * axis.x;
                     const double az = t.rows_.sin_theta[row] * axis.z;
                     const double ay = t.rows_.cos_theta[row] * axis.y;
                     const double* w0 = t.w_[0].data() + base;
                     const double* w1 = t.w_[1].data() + base;
                     const double* w2 = t.w_[2].data() + base;
                     for (int col = begin; col < end; ++col) {
                       const double c = cp[col] * ax + sp[col] * az + ay;
                       cos_[n] = c;
                       wr_[n] = w0[col];
                       wg_[n] = w1[col];
                       wb_[n] = w2[col];
                       n += (c >= min_cos && c > 0.0) ? 1 : 0;
                     }
                   });
  gathered_ = n;
}

Rgb LobeIntegrator::evaluate(const Vec3& axis, double exponent) const {
  require(exponent >= 1.0, "lobe exponent must be >= 1");
  const EnvTexels& t = *texels_;
  const double log_cutoff = std::log(kTermCutoff);
  const double min_cos = std::exp(log_cutoff / exponent) * (1.0 - 1e-12);
  double r = 0.0, g = 0.0, b = 0.0;
  if (exponent == 1.0) {
    for_each_cap_run(t.rows_, t.width_, axis, min_cos,
                     [&](std::size_t row, std::size_t base, int begin, int end) {
                       const double* cp = t.cos_phi_.data();
                       const double* sp = t.sin_phi_.data();
                       const double ax = t.rows_.sin_theta[row] * axis.x;
                       const double az = t.rows_.sin_theta[row] * axis.z;
                       const double ay = t.rows_.cos_theta[row] * axis.y;
                       const double* w0 = t.w_[0].data() + base;
                       const double* w1 = t.w_[1].data() + base;
                       const double* w2 = t.w_[2].data() + base;
#pragma omp simd reduction(+ : r, g, b)
                       for (int col = begin; col < end; ++col) {
                         const double c = cp[col] * ax + sp[col] * az + ay;
                         const double term = c >= kTermCutoff ? c : 0.0;
                         r += term * w0[col];
                         g += term * w1[col];
                         b += term * w2[col];
                       }
                     });
    return {r, g, b};
  }
  for_each_cap_run(t.rows_, t.width_, axis, min_cos,
                   [&](std::size_t row, std::size_t base, int begin, int end) {
                     const double* cp = t.cos_phi_.data();
                     const double* sp = t.sin_phi_.data();
                     const double ax = t.rows_.sin_theta[row] * axis.x;
                     const double az = t.rows_.sin_theta[row] * axis.z;
                     const double ay = t.rows_.cos_theta[row] * axis.y;
                     const double* w0 = t.w_[0].data() + base;
                     const double* w1 = t.w_[1].data() + base;
                     const double* w2 = t.w_[2].data() + base;
#pragma omp simd reduction(+ : r, g, b)
                     for (int col = begin; col < end; ++col) {
                       const double c = cp[col] * ax + sp[col] * az + ay;
                                        const double e = exponent * lobe_log(c > 1e-300 ? c : 1e-300);
                       const double term = e >= log_cutoff ? lobe_exp(e > log_cutoff ? e : log_cutoff) : 0.0;
                       r += term * w0[col];
                       g += term * w1[col];
                       b += term * w2[col];
                     }
                   });
  return {r, g, b};
}

void LobeIntegrator::evaluate(const Vec3& axis, std::span<const double> exponents,
                              std::span<Rgb> out) {
  require(!exponents.empty() && out.size() == exponents.size(),
          "lobe evaluation needs one output per exponent");
  if (exponents.size() == 1) {
    out[0] = evaluate(axis, exponents[0]);
    return;
  }
  require(exponents.front() >= 1.0, "lobe exponents must be >= 1");
  for (std::size_t i = 1; i < exponents.size(); ++i) {
    require(exponents[i] >= exponents[i - 1], "lobe exponents must be ascending");
  }

  const double log_cutoff = std::log(kTermCutoff);
  // Slightly generous so the per-level log test below decides inclusion.
  const double min_cos = std::exp(log_cutoff / exponents.front()) * (1.0 - 1e-12);
  gather(axis, min_cos);
  const std::size_t n = gathered_;

  {
    const double* c = cos_.data();
    double* lc = log_cos_.data();
#pragma omp simd
    for (std::size_t j = 0; j < n; ++j) lc[j] = lobe_log(c[j]);
  }

  // Bucket entries by how many levels keep them (c^k >= cutoff holds for a
  // prefix of the ascending exponents), then order by descending count so
  // level i reads a contiguous prefix.
  const std::size_t levels = exponents.size();
  level_count_.assign(levels + 1, 0);
  for (std::size_t j = 0; j < n; ++j) {
    const double lc = log_cos_[j];
    const auto it = std::partition_point(exponents.begin(), exponents.end(),
                                         [&](double k) { return k * lc >= log_cutoff; });
    const int m = static_cast<int>(it - exponents.begin());
    bucket_[j] = m;
    ++level_count_[static_cast<std::size_t>(m)];
  }
  // start offsets in descending-m order
  start_.assign(levels + 1, 0);
  int offset = 0;
  for (std::size_t m = levels + 1; m-- > 0;) {
    start_[m] = offset;
    offset += level_count_[m];
  }
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t dst = static_cast<std::size_t>(start_[static_cast<std::size_t>(bucket_[j])]++);
    s_log_[dst] = log_cos_[j];
    s_cos_[dst] = cos_[j];
    s_r_[dst] = wr_[j];
    s_g_[dst] = wg_[j];
    s_b_[dst] = wb_[j];
  }

  // kept(i) = number of entries with bucket > i
  std::size_t kept = n - static_cast<std::size_t>(level_count_[0]);
  for (std::size_t i = 0; i < levels; ++i) {
    const double k = exponents[i];
    double r = 0.0, g = 0.0, b = 0.0;
    const double* lc = s_log_.data();
    const double* c = s_cos_.data();
    const double* wr = s_r_.data();
    const double* wg = s_g_.data();
    const double* wb = s_b_.data();
    if (k == 1.0) {
#pragma omp simd reduction(+ : r, g, b)
      for (std::size_t j = 0; j < kept; ++j) {
        r += c[j] * wr[j];
        g += c[j] * wg[j];
        b += c[j] * wb[j];
      }
    } else {
#pragma omp simd reduction(+ : r, g, b)
      for (std::size_t j = 0; j < kept; ++j) {
        const double t = lobe_exp(k * lc[j]);
        r += t * wr[j];
        g += t * wg[j];
        b += t * wb[j];
      }
    }
    out[i] = {r, g, b};
    kept -= static_cast<std::size_t>(level_count_[i + 1]);
  }
}

}  // namespace refmap
