#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. Everything here is written from the formulas directly, with plain
// loops and no shared code paths with the library beyond data containers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "refmap/exposure.hpp"
#include "refmap/image.hpp"
#include "refmap/render.hpp"
#include "refmap/spherical.hpp"

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

struct V3 {
  double x, y, z;
};
inline V3 add(V3 a, V3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline V3 scale(V3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
inline double dot3(V3 a, V3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline V3 cross3(V3 a, V3 b) { return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x}; }
inline V3 unit(V3 a) { return scale(a, 1.0 / std::sqrt(dot3(a, a))); }

// Camera basis for an orbit camera at (azimuth, declination) around +y.
struct Camera {
  V3 right, up, toward;
};
inline Camera camera(double azimuth, double declination) {
  Camera c;
  c.toward = {std::cos(declination) * std::cos(azimuth), std::sin(declination),
              std::cos(declination) * std::sin(azimuth)};
  c.right = unit(cross3({0.0, 1.0, 0.0}, c.toward));
  c.up = cross3(c.toward, c.right);
  return c;
}

// World-space normal of the sphere seen at pixel (x, y), false outside.
inline bool pixel_normal(const Camera& cam, int x, int y, int res, V3& n) {
  const double u = 2.0 * (x + 0.5) / res - 1.0;
  const double v = 1.0 - 2.0 * (y + 0.5) / res;
  const double r2 = u * u + v * v;
  if (r2 > 1.0) return false;
  const double w = std::sqrt(1.0 - r2);
  n = add(add(scale(cam.right, u), scale(cam.up, v)), scale(cam.toward, w));
  return true;
}

struct Texel {
  V3 dir;
  double solid_angle;
};

inline Texel texel(int row, int col, int h, int w) {
  const double theta = kPi * (row + 0.5) / h;
  const double phi = 2.0 * kPi * (col + 0.5) / w;
  return {{std::sin(theta) * std::cos(phi), std::cos(theta), std::sin(theta) * std::sin(phi)},
          (2.0 * kPi / w) * (kPi / h) * std::sin(theta)};
}

// Plain double loop over pixels and texels. The specular lobe mirrors the
// incoming direction about the normal and raises its alignment with the
// viewer to the glossiness.
inline refmap::Image render(const refmap::EnvironmentMap& env, const refmap::PhongMaterial& m,
                            double azimuth, double declination, int res) {
  const Camera cam = camera(azimuth, declination);
  refmap::Image out(res, res);
  for (int y = 0; y < res; ++y) {
    for (int x = 0; x < res; ++x) {
      V3 n;
      if (!pixel_normal(cam, x, y, res, n)) continue;
      double diffuse[3] = {0, 0, 0}, specular[3] = {0, 0, 0};
      for (int row = 0; row < env.height(); ++row) {
        for (int col = 0; col < env.width(); ++col) {
          const Texel t = texel(row, col, env.height(), env.width());
          const refmap::Rgb l = env.get(col, row);
          const double cosine = std::max(0.0, dot3(n, t.dir));
          const V3 r = add(scale(n, 2.0 * dot3(n, t.dir)), scale(t.dir, -1.0));
          const double base = std::max(0.0, dot3(r, cam.toward));
          const double lobe = base > 0.0 ? std::pow(base, m.kg) : 0.0;
          for (int c = 0; c < 3; ++c) {
            diffuse[c] += l[c] * cosine * t.solid_angle;
            specular[c] += l[c] * lobe * t.solid_angle;
          }
        }
      }
      out.set(x, y, {m.kd[0] * diffuse[0] + m.ks[0] * specular[0], m.kd[1] * diffuse[1] + m.ks[1] * specular[1],
                     m.kd[2] * diffuse[2] + m.ks[2] * specular[2]});
    }
  }
  return out;
}

// Smooth HDR environment: sky gradient plus a few bright blobs.
inline refmap::EnvironmentMap synthetic_env(int w, int h, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  struct Blob {
    V3 center;
    double sharpness;
    double color[3];
  };
  std::vector<Blob> blobs(3);
  for (auto& b : blobs) {
    const double z = 2.0 * u(gen) - 1.0;
    const double a = 2.0 * kPi * u(gen);
    const double s = std::sqrt(1.0 - z * z);
    b.center = {s * std::cos(a), z, s * std::sin(a)};
    b.sharpness = 5.0 + 60.0 * u(gen);
    for (double& c : b.color) c = 2.0 + 30.0 * u(gen);
  }
  double sky[3], ground[3];
  for (int c = 0; c < 3; ++c) {
    sky[c] = 0.2 + 0.8 * u(gen);
    ground[c] = 0.02 + 0.2 * u(gen);
  }
  refmap::Image img(w, h);
  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      const V3 d = texel(row, col, h, w).dir;
      const double t = 0.5 * (d.y + 1.0);
      refmap::Rgb v{};
      for (int c = 0; c < 3; ++c) {
        v[static_cast<std::size_t>(c)] = ground[c] + (sky[c] - ground[c]) * t;
        for (const auto& b : blobs) v[static_cast<std::size_t>(c)] += b.color[c] * std::exp(b.sharpness * (dot3(d, b.center) - 1.0));
      }
      img.set(col, row, v);
    }
  }
  return refmap::EnvironmentMap(std::move(img));
}

// Exact non-negative least squares in two unknowns by enumerating the
// candidate active sets and keeping the feasible one with the smallest
// directly evaluated residual.
struct Nnls {
  double kd, ks, residual;
};
inline Nnls nnls2(const std::vector<double>& o, const std::vector<double>& d, const std::vector<double>& s) {
  auto resid = [&](double a, double b) {
    double r = 0.0;
    for (std::size_t i = 0; i < o.size(); ++i) {
      const double e = a * d[i] + b * s[i] - o[i];
      r += e * e;
    }
    return r;
  };
  double dd = 0, ds = 0, ss = 0, dO = 0, sO = 0;
  for (std::size_t i = 0; i < o.size(); ++i) {
    dd += d[i] * d[i];
    ds += d[i] * s[i];
    ss += s[i] * s[i];
    dO += d[i] * o[i];
    sO += s[i] * o[i];
  }
  std::vector<std::pair<double, double>> cands = {{0.0, 0.0}};
  if (dd > 0) cands.push_back({std::max(0.0, dO / dd), 0.0});
  if (ss > 0) cands.push_back({0.0, std::max(0.0, sO / ss)});
  const double det = dd * ss - ds * ds;
  if (det > 0) {
    const double a = (ss * dO - ds * sO) / det;
    const double b = (dd * sO - ds * dO) / det;
    if (a >= 0 && b >= 0) cands.push_back({a, b});
  }
  Nnls best{0, 0, resid(0, 0)};
  for (auto [a, b] : cands) {
    const double r = resid(a, b);
    if (r < best.residual) best = {a, b, r};
  }
  return best;
}

// Log-radiance MSE straight from its definition.
inline double mse_log(const refmap::Image& a, const refmap::Image& b, const std::vector<unsigned char>& mask) {
  double sum = 0.0;
  long n = 0;
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      if (!mask.empty() && !mask[static_cast<std::size_t>(y * a.width() + x)]) continue;
      for (int c = 0; c < 3; ++c) {
        const double d = std::log(double(a.at(x, y, c)) + 1e-6) - std::log(double(b.at(x, y, c)) + 1e-6);
        sum += d * d;
        ++n;
      }
    }
  }
  return sum / n;
}

// Multi-scale SSIM with a direct 2-D Gaussian window (weights renormalized
// over the part inside the image) and 2x2 box downsampling.
inline double ms_ssim(const refmap::Image8& a8, const refmap::Image8& b8, std::vector<unsigned char> mask) {
  const double weights[5] = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
  const double c1 = (0.01 * 255) * (0.01 * 255), c2 = (0.03 * 255) * (0.03 * 255);
  double total = 0.0;
  for (int ch = 0; ch < 3; ++ch) {
    int w = a8.width, h = a8.height;
    std::vector<double> a(static_cast<std::size_t>(w * h)), b(a.size());
    for (int i = 0; i < w * h; ++i) {
      a[static_cast<std::size_t>(i)] = a8.data[static_cast<std::size_t>(i * 3 + ch)];
      b[static_cast<std::size_t>(i)] = b8.data[static_cast<std::size_t>(i * 3 + ch)];
    }
    std::vector<unsigned char> m = mask;
    std::vector<double> ls, css;
    for (int s = 0; s < 5; ++s) {
      if (s > 0 && std::min(w, h) < 8) break;
      double lsum = 0, cssum = 0;
      long n = 0;
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          if (!m.empty() && !m[static_cast<std::size_t>(y * w + x)]) continue;
          double ws = 0, ma = 0, mb = 0, aa = 0, bb = 0, ab = 0;
          for (int dy = -5; dy <= 5; ++dy) {
            for (int dx = -5; dx <= 5; ++dx) {
              const int sx = x + dx, sy = y + dy;
              if (sx < 0 || sy < 0 || sx >= w || sy >= h) continue;
              const double g = std::exp(-(dx * dx) / 4.5) * std::exp(-(dy * dy) / 4.5);
              const double va = a[static_cast<std::size_t>(sy * w + sx)];
              const double vb = b[static_cast<std::size_t>(sy * w + sx)];
              ws += g;
              ma += g * va;
              mb += g * vb;
              aa += g * va * va;
              bb += g * vb * vb;
              ab += g * va * vb;
            }
          }
          ma /= ws, mb /= ws, aa /= ws, bb /= ws, ab /= ws;
          lsum += (2 * ma * mb + c1) / (ma * ma + mb * mb + c1);
          cssum += (2 * (ab - ma * mb) + c2) / ((aa - ma * ma) + (bb - mb * mb) + c2);
          ++n;
        }
      }
      if (n == 0) break;
      ls.push_back(lsum / n);
      css.push_back(cssum / n);
      const int w2 = w / 2, h2 = h / 2;
      std::vector<double> a2(static_cast<std::size_t>(w2 * h2)), b2(a2.size());
      std::vector<unsigned char> m2(m.empty() ? 0 : a2.size());
      for (int y = 0; y < h2; ++y) {
        for (int x = 0; x < w2; ++x) {
          auto idx = [&](int xx, int yy) { return static_cast<std::size_t>(yy * w + xx); };
          const std::size_t o = static_cast<std::size_t>(y * w2 + x);
          a2[o] = 0.25 * (a[idx(2 * x, 2 * y)] + a[idx(2 * x + 1, 2 * y)] + a[idx(2 * x, 2 * y + 1)] + a[idx(2 * x + 1, 2 * y + 1)]);
          b2[o] = 0.25 * (b[idx(2 * x, 2 * y)] + b[idx(2 * x + 1, 2 * y)] + b[idx(2 * x, 2 * y + 1)] + b[idx(2 * x + 1, 2 * y + 1)]);
          if (!m.empty()) {
            m2[o] = m[idx(2 * x, 2 * y)] && m[idx(2 * x + 1, 2 * y)] && m[idx(2 * x, 2 * y + 1)] && m[idx(2 * x + 1, 2 * y + 1)];
          }
        }
      }
      a.swap(a2), b.swap(b2), m.swap(m2), w = w2, h = h2;
    }
    double wsum = 0;
    for (std::size_t s = 0; s < ls.size(); ++s) wsum += weights[s];
    double r = 1.0;
    for (std::size_t s = 0; s < ls.size(); ++s) r *= std::pow(std::max(0.0, css[s]), weights[s] / wsum);
    r *= std::pow(std::max(0.0, ls.back()), weights[ls.size() - 1] / wsum);
    total += std::clamp(r, 0.0, 1.0);
  }
  return total / 3.0;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("refmap_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace oracle
