#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "refmap/exposure.hpp"
#include "refmap/render.hpp"

namespace refmap {

// {"kd": [r, g, b], "ks": [r, g, b], "kg": float}
nlohmann::json material_to_json(const PhongMaterial& m);
PhongMaterial material_from_json(const nlohmann::json& j);

// {"lo": float, "hi": float}
nlohmann::json exposure_to_json(const ExposureParams& e);
ExposureParams exposure_from_json(const nlohmann::json& j);

// {"azimuth": radians, "declination": radians}
nlohmann::json view_to_json(const ViewPose& v);
ViewPose view_from_json(const nlohmann::json& j);

/// Throws kIo if unreadable, kInvalidInput if not JSON.
nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const nlohmann::json& j, const std::filesystem::path& path);

PhongMaterial load_material(const std::filesystem::path& path);
void save_material(const PhongMaterial& m, const std::filesystem::path& path);

}  // namespace refmap
