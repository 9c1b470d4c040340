#include "refmap/fit.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "refmap/error.hpp"
#include "refmap/pfm.hpp"

namespace refmap {

GlossGrid::GlossGrid(int count, double k_min, double k_max) {
  require(count >= 1, "gloss grid needs at least one level");
  require(std::isfinite(k_min) && std::isfinite(k_max) && k_min >= 1.0 && k_max >= k_min,
          "gloss grid bounds must satisfy 1 <= k_min <= k_max");
  require(count == 1 || k_max > k_min, "a multi-level gloss grid needs k_max > k_min");
  levels_.resize(static_cast<std::size_t>(count));
  if (count == 1) {
    levels_[0] = k_min;
    return;
  }
  const double log_ratio = std::log(k_max / k_min);
  for (int i = 0; i < count; ++i) {
    levels_[static_cast<std::size_t>(i)] = k_min * std::exp(log_ratio * i / (count - 1));
  }
  levels_.front() = k_min;
  levels_.back() = k_max;
}

BasisRMs precompute_basis(const EnvironmentMap& env, const ViewPose& view, const GlossGrid& grid,
                          int resolution, std::string env_id) {
  BasisRMs basis;
  basis.diffuse = render_diffuse_rm(env, view, resolution);
  basis.specular = render_specular_rms(env, view, grid.levels(), resolution);
  basis.levels.assign(grid.levels().begin(), grid.levels().end());
  basis.view = view;
  basis.env_id = std::move(env_id);
  return basis;
}

namespace {

double sum_sq_error(std::span<const double> l_o, std::span<const double> l_d,
                    std::span<const double> l_s, double kd, double ks) {
  double r = 0.0;
  for (std::size_t i = 0; i < l_o.size(); ++i) {
    const double e = kd * l_d[i] + ks * l_s[i] - l_o[i];
    r += e * e;
  }
  return r;
}

}  // namespace

KdKsSolution solve_kd_ks(std::span<const double> l_o, std::span<const double> l_d,
                         std::span<const double> l_s) {
  if (l_o.empty()) fail(ErrorCode::kContractViolation, "least squares on empty pixel vectors");
  require(l_d.size() == l_o.size() && l_s.size() == l_o.size(), "pixel vectors differ in length");

  double dd = 0.0, ds = 0.0, ss = 0.0, d_o = 0.0, s_o = 0.0;
  for (std::size_t i = 0; i < l_o.size(); ++i) {
    dd += l_d[i] * l_d[i];
    ds += l_d[i] * l_s[i];
    ss += l_s[i] * l_s[i];
    d_o += l_d[i] * l_o[i];
    s_o += l_s[i] * l_o[i];
  }
  const double damping = 1e-9 * (dd + ss);
  const double a = dd + damping;
  const double c = ss + damping;
  const double det = a * c - ds * ds;

  if (det > 0.0) {
    const double kd = (c * d_o - ds * s_o) / det;
    const double ks = (a * s_o - ds * d_o) / det;
    if (kd >= 0.0 && ks >= 0.0) return {kd, ks, sum_sq_error(l_o, l_d, l_s, kd, ks)};
  }

  // Active set for two variables: one coefficient pinned at zero. These
  // solves are undamped so that the (kd, 0) candidate does not depend on
  // l_s; otherwise diffuse-only fits would differ across gloss levels by
  // rounding noise and break the lowest-level tie rule.
  KdKsSolution best{0.0, 0.0, sum_sq_error(l_o, l_d, l_s, 0.0, 0.0)};
  if (dd > 0.0) {
    const double kd = std::max(0.0, d_o / dd);
    const double r = sum_sq_error(l_o, l_d, l_s, kd, 0.0);
    if (r < best.residual) best = {kd, 0.0, r};
  }
  if (ss > 0.0) {
    const double ks = std::max(0.0, s_o / ss);
    const double r = sum_sq_error(l_o, l_d, l_s, 0.0, ks);
    if (r < best.residual) best = {0.0, ks, r};
  }
  return best;
}

namespace {

// Valid-pixel values of one channel, in raster order.
std::vector<double> channel_vector(const ReflectanceMap& rm, int channel) {
  std::vector<double> v;
  v.reserve(rm.valid_count());
  const int res = rm.resolution();
  for (int y = 0; y < res; ++y) {
    for (int x = 0; x < res; ++x) {
      if (rm.valid(x, y)) v.push_back(rm.image().at(x, y, channel));
    }
  }
  return v;
}

}  // namespace

PhongFit fit_phong(const ReflectanceMap& rm, const BasisRMs& basis) {
  if (basis.specular.empty() || basis.specular.size() != basis.levels.size()) {
    fail(ErrorCode::kInvalidInput, "basis has no specular levels");
  }
  if (rm.mask() != basis.diffuse.mask()) {
    fail(ErrorCode::kInvalidInput, "reflectance map mask differs from the basis mask");
  }

  std::array<std::vector<double>, 3> observed, diffuse;
  for (int c = 0; c < 3; ++c) {
    observed[static_cast<std::size_t>(c)] = channel_vector(rm, c);
    diffuse[static_cast<std::size_t>(c)] = channel_vector(basis.diffuse, c);
  }
  if (observed[0].empty()) fail(ErrorCode::kInvalidInput, "reflectance map has no valid pixels");

  PhongFit fit;
  fit.residuals.resize(basis.levels.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t level = 0; level < basis.levels.size(); ++level) {
    const ReflectanceMap& spec = basis.specular[level];
    if (spec.mask() != rm.mask()) fail(ErrorCode::kInvalidInput, "basis maps differ in mask");
    PhongMaterial m;
    m.kg = basis.levels[level];
    double total = 0.0;
    for (int c = 0; c < 3; ++c) {
      const auto ci = static_cast<std::size_t>(c);
      const std::vector<double> l_s = channel_vector(spec, c);
      const KdKsSolution sol = solve_kd_ks(observed[ci], diffuse[ci], l_s);
      m.kd[ci] = sol.kd;
      m.ks[ci] = sol.ks;
      total += sol.residual;
    }
    fit.residuals[level] = total;
    if (total < best) {  // strict: ties keep the lower level
      best = total;
      fit.material = m;
      fit.gloss_index = static_cast<int>(level);
    }
  }
  return fit;
}

void save_basis(const BasisRMs& basis, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create basis directory '" + dir.string() + "'");
  nlohmann::json index;
  index["v"] = 1;
  index["env_id"] = basis.env_id;
  index["view"] = {{"azimuth", basis.view.azimuth()}, {"declination", basis.view.declination()}};
  index["levels"] = basis.levels;
  index["diffuse"] = "diffuse.pfm";
  save_pfm(basis.diffuse.image(), dir / "diffuse.pfm");
  nlohmann::json files = nlohmann::json::array();
  for (std::size_t i = 0; i < basis.specular.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "specular_%03zu.pfm", i);
    save_pfm(basis.specular[i].image(), dir / name);
    files.push_back(name);
  }
  index["specular"] = files;
  std::ofstream out(dir / "index.json");
  out << index.dump(2) << '\n';
  if (!out) fail(ErrorCode::kIo, "cannot write basis index in '" + dir.string() + "'");
}

BasisRMs load_basis(const std::filesystem::path& dir) {
  std::ifstream in(dir / "index.json");
  if (!in) fail(ErrorCode::kIo, "cannot open basis index in '" + dir.string() + "'");
  BasisRMs basis;
  try {
    const nlohmann::json index = nlohmann::json::parse(in);
    basis.env_id = index.at("env_id").get<std::string>();
    basis.view = ViewPose(index.at("view").at("azimuth").get<double>(),
                          index.at("view").at("declination").get<double>());
    basis.levels = index.at("levels").get<std::vector<double>>();
    basis.diffuse = ReflectanceMap(load_pfm(dir / index.at("diffuse").get<std::string>()));
    for (const auto& name : index.at("specular")) {
      basis.specular.emplace_back(load_pfm(dir / name.get<std::string>()));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidInput, std::string("bad basis index: ") + e.what());
  }
  if (basis.specular.size() != basis.levels.size()) {
    fail(ErrorCode::kInvalidInput, "basis index lists a different number of maps and levels");
  }
  return basis;
}

}  // namespace refmap
