#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "refmap/exposure.hpp"
#include "refmap/render.hpp"
#include "refmap/rng.hpp"

namespace refmap {

inline constexpr int kManifestVersion = 1;

enum class Split { kTrain, kTest };
const char* to_string(Split s);
Split split_from_string(const std::string& s);

struct MaterialEntry {
  std::string id;
  PhongMaterial material;
};

struct EnvEntry {
  std::string id;
  std::filesystem::path path;
};

struct SampleRecord {
  std::string id;
  PhongMaterial material;
  std::string material_id;
  std::string env_id;
  ViewPose view;
  // relative to the dataset root
  std::string rm_hdr;
  std::string rm_ldr;
  std::string env;
  ExposureParams exposure;
  Split split = Split::kTrain;
};

nlohmann::json record_to_json(const SampleRecord& r);
SampleRecord record_from_json(const nlohmann::json& j);
std::vector<SampleRecord> read_manifest(const std::filesystem::path& path);

struct GenConfig {
  int count = 1000;
  int resolution = kDefaultResolution;
  std::uint64_t seed = 0;
  /// Directory of material JSON files; empty selects random materials.
  std::filesystem::path material_dir;
  /// Number of random materials drawn when no corpus is given.
  int random_materials = 100;
  std::filesystem::path env_dir;
  std::filesystem::path out_dir;
  double material_train_fraction = 0.67;
  double env_train_fraction = 6.0 / 7.0;

  /// Throws kContractViolation on non-positive counts or fractions
  /// outside (0, 1).
  void validate() const;
};

/// Azimuth uniform in [0, 2 pi), declination uniform in [-10, +10] degrees.
ViewPose sample_view(Rng& rng);

/// kd, ks uniform in [0, 1]^3, kg log-uniform in [1, 1024].
PhongMaterial sample_random_material(Rng& rng);

/// Uniform pick from a corpus, or a random material if the corpus is empty.
PhongMaterial sample_material(Rng& rng, const std::vector<MaterialEntry>& corpus);

/// Every *.json file in dir (sorted by name; id = file stem). Throws
/// kInvalidInput if none.
std::vector<MaterialEntry> load_material_corpus(const std::filesystem::path& dir);

/// Every *.pfm file in dir (sorted by name; id = file stem).
std::vector<EnvEntry> list_environment_maps(const std::filesystem::path& dir);

struct SplitTable {
  std::vector<std::string> train;
  std::vector<std::string> test;
};

/// Shuffles ids with the seed and puts round(fraction * n) of them, at
/// least one and at most n - 1, into train. Needs n >= 2.
SplitTable split_ids(std::vector<std::string> ids, double train_fraction, Rng& rng);

struct DatasetSplits {
  SplitTable materials;
  SplitTable envs;
};
nlohmann::json splits_to_json(const DatasetSplits& s);
DatasetSplits splits_from_json(const nlohmann::json& j);

/// Renders config.count samples and writes them under config.out_dir:
///   env/<env_id>.pfm, rm_hdr/<id>.pfm (log radiance), rm_ldr/<id>.pfm,
///   rm_ldr/<id>.exposure.json, materials/<material_id>.json,
///   splits.json and manifest.jsonl (records in id order).
std::vector<SampleRecord> generate(const GenConfig& config);

/// Formats a sample index as a fixed-width id.
std::string sample_id(int index);

}  // namespace refmap
