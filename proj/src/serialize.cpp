#include "refmap/serialize.hpp"

#include <fstream>

#include "refmap/error.hpp"

namespace refmap {

namespace {

template <typename Fn>
auto guarded(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidInput, std::string("bad ") + what + " JSON: " + e.what());
  }
}

Rgb rgb_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) fail(ErrorCode::kInvalidInput, "expected an [r, g, b] array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

nlohmann::json material_to_json(const PhongMaterial& m) {
  return {{"kd", {m.kd[0], m.kd[1], m.kd[2]}}, {"ks", {m.ks[0], m.ks[1], m.ks[2]}}, {"kg", m.kg}};
}

PhongMaterial material_from_json(const nlohmann::json& j) {
  PhongMaterial m = guarded("material", [&] {
    return PhongMaterial{rgb_from_json(j.at("kd")), rgb_from_json(j.at("ks")), j.at("kg").get<double>()};
  });
  m.validate();
  return m;
}

nlohmann::json exposure_to_json(const ExposureParams& e) { return {{"lo", e.lo}, {"hi", e.hi}}; }

ExposureParams exposure_from_json(const nlohmann::json& j) {
  ExposureParams e = guarded("exposure", [&] {
    return ExposureParams{j.at("lo").get<double>(), j.at("hi").get<double>()};
  });
  e.validate();
  return e;
}

nlohmann::json view_to_json(const ViewPose& v) {
  return {{"azimuth", v.azimuth()}, {"declination", v.declination()}};
}

ViewPose view_from_json(const nlohmann::json& j) {
  return guarded("view", [&] {
    return ViewPose(j.at("azimuth").get<double>(), j.at("declination").get<double>());
  });
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidInput, "'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot open '" + path.string() + "' for writing");
  out << j.dump() << '\n';
  if (!out) fail(ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

PhongMaterial load_material(const std::filesystem::path& path) { return material_from_json(read_json(path)); }

void save_material(const PhongMaterial& m, const std::filesystem::path& path) {
  write_json(material_to_json(m), path);
}

}  // namespace refmap
