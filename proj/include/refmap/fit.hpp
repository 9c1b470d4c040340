#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "refmap/render.hpp"

namespace refmap {

/// Glossiness levels spaced evenly in log space over [k_min, k_max].
class GlossGrid {
 public:
  static constexpr int kDefaultLevels = 100;
  static constexpr double kDefaultMin = 1.0;
  static constexpr double kDefaultMax = 1024.0;

  GlossGrid() : GlossGrid(kDefaultLevels, kDefaultMin, kDefaultMax) {}
  /// Throws kContractViolation unless count >= 1 and 1 <= k_min <= k_max
  /// (k_min == k_max only for a single level).
  GlossGrid(int count, double k_min, double k_max);

  std::span<const double> levels() const noexcept { return levels_; }
  int size() const noexcept { return static_cast<int>(levels_.size()); }
  double operator[](int i) const { return levels_[static_cast<std::size_t>(i)]; }
  double min() const noexcept { return levels_.front(); }
  double max() const noexcept { return levels_.back(); }

 private:
  std::vector<double> levels_;
};

/// Diffuse and per-gloss specular reflectance maps of one environment seen
/// from one view. All maps share resolution and mask.
struct BasisRMs {
  ReflectanceMap diffuse;
  std::vector<ReflectanceMap> specular;  // one per grid level
  std::vector<double> levels;
  ViewPose view;
  std::string env_id;
};

BasisRMs precompute_basis(const EnvironmentMap& env, const ViewPose& view, const GlossGrid& grid,
                          int resolution = kDefaultResolution, std::string env_id = {});

struct KdKsSolution {
  double kd = 0.0;
  double ks = 0.0;
  double residual = 0.0;  // sum of squared errors at (kd, ks)
};

/// Non-negative least squares for l_o ~ kd * l_d + ks * l_s. Unconstrained
/// 2x2 normal equations (damped by 1e-9 * trace); if a coefficient comes out
/// negative the best (undamped) single-variable or zero solution is taken instead.
KdKsSolution solve_kd_ks(std::span<const double> l_o, std::span<const double> l_d,
                         std::span<const double> l_s);

struct PhongFit {
  PhongMaterial material;
  int gloss_index = 0;
  std::vector<double> residuals;  // total over channels, per level
};

/// Line search over the basis' gloss levels; per level, three per-channel
/// solves share the level. Ties go to the lower level. Throws
/// kInvalidInput if the map's mask differs from the basis mask.
PhongFit fit_phong(const ReflectanceMap& rm, const BasisRMs& basis);

/// Basis cache: directory with index.json, diffuse.pfm, specular_NNN.pfm.
void save_basis(const BasisRMs& basis, const std::filesystem::path& dir);
BasisRMs load_basis(const std::filesystem::path& dir);

}  // namespace refmap
