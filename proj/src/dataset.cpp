#include "refmap/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "refmap/error.hpp"
#include "refmap/parallel.hpp"
#include "refmap/pfm.hpp"
#include "refmap/serialize.hpp"

namespace refmap {

namespace {

constexpr std::uint64_t kMaterialSplitStream = 1;
constexpr std::uint64_t kEnvSplitStream = 2;
constexpr std::uint64_t kRandomMaterialStream = 3;
constexpr std::uint64_t kSampleStreamBase = std::uint64_t{1} << 32;

constexpr double kMaxDeclination = 10.0 * kPi / 180.0;

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create directory '" + dir.string() + "': " + ec.message());
}

std::vector<std::filesystem::path> files_with_extension(const std::filesystem::path& dir, const std::string& ext) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) fail(ErrorCode::kIo, "'" + dir.string() + "' is not a directory");
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ext) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

const char* to_string(Split s) { return s == Split::kTrain ? "train" : "test"; }

Split split_from_string(const std::string& s) {
  if (s == "train") return Split::kTrain;
  if (s == "test") return Split::kTest;
  fail(ErrorCode::kInvalidInput, "unknown split '" + s + "'");
}

std::string sample_id(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06d", index);
  return buf;
}

nlohmann::json record_to_json(const SampleRecord& r) {
  return {{"v", kManifestVersion},
          {"id", r.id},
          {"material", material_to_json(r.material)},
          {"material_id", r.material_id},
          {"env_id", r.env_id},
          {"view", view_to_json(r.view)},
          {"rm_hdr", r.rm_hdr},
          {"rm_ldr", r.rm_ldr},
          {"env", r.env},
          {"exposure", exposure_to_json(r.exposure)},
          {"split", to_string(r.split)}};
}

SampleRecord record_from_json(const nlohmann::json& j) {
  try {
    if (j.at("v").get<int>() != kManifestVersion) {
      fail(ErrorCode::kInvalidInput, "unsupported manifest version " + j.at("v").dump());
    }
    SampleRecord r;
    r.id = j.at("id").get<std::string>();
    r.material = material_from_json(j.at("material"));
    r.material_id = j.at("material_id").get<std::string>();
    r.env_id = j.at("env_id").get<std::string>();
    r.view = view_from_json(j.at("view"));
    r.rm_hdr = j.at("rm_hdr").get<std::string>();
    r.rm_ldr = j.at("rm_ldr").get<std::string>();
    r.env = j.at("env").get<std::string>();
    r.exposure = exposure_from_json(j.at("exposure"));
    r.split = split_from_string(j.at("split").get<std::string>());
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidInput, std::string("bad manifest record: ") + e.what());
  }
}

std::vector<SampleRecord> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open manifest '" + path.string() + "'");
  std::vector<SampleRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorCode::kInvalidInput, "manifest line " + std::to_string(out.size() + 1) + ": " + e.what());
    }
  }
  return out;
}

void GenConfig::validate() const {
  require(count > 0, "sample count must be positive");
  require(resolution > 0, "resolution must be positive");
  require(random_materials > 0, "random material pool must be positive");
  require(material_train_fraction > 0.0 && material_train_fraction < 1.0,
          "material train fraction must lie in (0, 1)");
  require(env_train_fraction > 0.0 && env_train_fraction < 1.0, "env train fraction must lie in (0, 1)");
}

ViewPose sample_view(Rng& rng) {
  const double azimuth = rng.uniform(0.0, 2.0 * kPi);
  const double declination = rng.uniform(-kMaxDeclination, kMaxDeclination);
  return ViewPose(azimuth, declination);
}

PhongMaterial sample_random_material(Rng& rng) {
  PhongMaterial m;
  for (double& v : m.kd) v = rng.uniform();
  for (double& v : m.ks) v = rng.uniform();
  m.kg = std::clamp(std::exp(rng.uniform(0.0, std::log(1024.0))), 1.0, 1024.0);
  return m;
}

PhongMaterial sample_material(Rng& rng, const std::vector<MaterialEntry>& corpus) {
  if (corpus.empty()) return sample_random_material(rng);
  return corpus[rng.index(corpus.size())].material;
}

std::vector<MaterialEntry> load_material_corpus(const std::filesystem::path& dir) {
  std::vector<MaterialEntry> out;
  for (const auto& path : files_with_extension(dir, ".json")) {
    out.push_back({path.stem().string(), load_material(path)});
  }
  if (out.empty()) fail(ErrorCode::kInvalidInput, "material corpus '" + dir.string() + "' is empty");
  return out;
}

std::vector<EnvEntry> list_environment_maps(const std::filesystem::path& dir) {
  std::vector<EnvEntry> out;
  for (const auto& path : files_with_extension(dir, ".pfm")) out.push_back({path.stem().string(), path});
  return out;
}

SplitTable split_ids(std::vector<std::string> ids, double train_fraction, Rng& rng) {
  if (ids.size() < 2) fail(ErrorCode::kInvalidInput, "a train/test split needs at least two items");
  // Fisher-Yates with our own rng keeps the shuffle identical across
  // standard library implementations.
  for (std::size_t i = ids.size() - 1; i > 0; --i) {
    std::swap(ids[i], ids[rng.index(i + 1)]);
  }
  const auto n = static_cast<long>(ids.size());
  const long train = std::clamp(std::lround(train_fraction * static_cast<double>(n)), 1L, n - 1);
  SplitTable t;
  t.train.assign(ids.begin(), ids.begin() + train);
  t.test.assign(ids.begin() + train, ids.end());
  std::sort(t.train.begin(), t.train.end());
  std::sort(t.test.begin(), t.test.end());
  return t;
}

nlohmann::json splits_to_json(const DatasetSplits& s) {
  return {{"materials", {{"train", s.materials.train}, {"test", s.materials.test}}},
          {"envs", {{"train", s.envs.train}, {"test", s.envs.test}}}};
}

DatasetSplits splits_from_json(const nlohmann::json& j) {
  try {
    DatasetSplits s;
    s.materials.train = j.at("materials").at("train").get<std::vector<std::string>>();
    s.materials.test = j.at("materials").at("test").get<std::vector<std::string>>();
    s.envs.train = j.at("envs").at("train").get<std::vector<std::string>>();
    s.envs.test = j.at("envs").at("test").get<std::vector<std::string>>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidInput, std::string("bad splits JSON: ") + e.what());
  }
}

std::vector<SampleRecord> generate(const GenConfig& config) {
  config.validate();

  std::vector<MaterialEntry> materials;
  if (config.material_dir.empty()) {
    Rng rng(config.seed, kRandomMaterialStream);
    for (int i = 0; i < config.random_materials; ++i) {
      char id[32];
      std::snprintf(id, sizeof id, "random_%03d", i);
      materials.push_back({id, sample_random_material(rng)});
    }
  } else {
    materials = load_material_corpus(config.material_dir);
  }

  const std::vector<EnvEntry> env_files = list_environment_maps(config.env_dir);
  if (env_files.size() < 2) {
    fail(ErrorCode::kInvalidInput, "environment directory '" + config.env_dir.string() +
                                       "' needs at least two .pfm maps for a train/test split");
  }
  std::map<std::string, EnvironmentMap> envs;
  for (const auto& e : env_files) {
    EnvironmentMap env(load_pfm(e.path));
    if (env.width() != config.resolution || env.height() != config.resolution) {
      env = resample_envmap(env, config.resolution, config.resolution);
    }
    envs.emplace(e.id, std::move(env));
  }

  DatasetSplits splits;
  {
    std::vector<std::string> ids;
    for (const auto& m : materials) ids.push_back(m.id);
    Rng rng(config.seed, kMaterialSplitStream);
    splits.materials = split_ids(ids, config.material_train_fraction, rng);
  }
  {
    std::vector<std::string> ids;
    for (const auto& e : env_files) ids.push_back(e.id);
    Rng rng(config.seed, kEnvSplitStream);
    splits.envs = split_ids(ids, config.env_train_fraction, rng);
  }
  std::map<std::string, const PhongMaterial*> material_by_id;
  for (const auto& m : materials) material_by_id.emplace(m.id, &m.material);

  const auto& out = config.out_dir;
  for (const char* sub : {"env", "rm_hdr", "rm_ldr", "materials"}) ensure_dir(out / sub);
  for (const auto& [id, env] : envs) save_pfm(env.image(), out / "env" / (id + ".pfm"));
  for (const auto& m : materials) save_material(m.material, out / "materials" / (m.id + ".json"));
  {
    std::ofstream s(out / "splits.json");
    s << splits_to_json(splits).dump(2) << '\n';
    if (!s) fail(ErrorCode::kIo, "cannot write splits.json");
  }

  const double test_fraction = 1.0 - config.material_train_fraction;
  std::vector<SampleRecord> records(static_cast<std::size_t>(config.count));
  parallel_for(config.count, [&](int, int index) {
    Rng rng(config.seed, kSampleStreamBase + static_cast<std::uint64_t>(index));
    SampleRecord r;
    r.id = sample_id(index);
    r.split = rng.uniform() < test_fraction ? Split::kTest : Split::kTrain;
    const SplitTable& mat_table = splits.materials;
    const SplitTable& env_table = splits.envs;
    const auto& mat_ids = r.split == Split::kTrain ? mat_table.train : mat_table.test;
    const auto& env_ids = r.split == Split::kTrain ? env_table.train : env_table.test;
    r.material_id = mat_ids[rng.index(mat_ids.size())];
    r.env_id = env_ids[rng.index(env_ids.size())];
    r.material = *material_by_id.at(r.material_id);
    r.view = sample_view(rng);

    const ReflectanceMap rm =
        render_reflectance_map(envs.at(r.env_id), r.material, r.view, config.resolution);
    r.exposure = choose_exposure(rm.image(), rm.mask());
    const ReflectanceMap ldr(simulate_ldr(rm.image(), r.exposure));

    r.env = "env/" + r.env_id + ".pfm";
    r.rm_hdr = "rm_hdr/" + r.id + ".pfm";
    r.rm_ldr = "rm_ldr/" + r.id + ".pfm";
    save_pfm(log_encode(rm.image()), out / r.rm_hdr);
    save_pfm(ldr.image(), out / r.rm_ldr);
    write_json(exposure_to_json(r.exposure), out / "rm_ldr" / (r.id + ".exposure.json"));
    records[static_cast<std::size_t>(index)] = std::move(r);
  });

  std::ofstream manifest(out / "manifest.jsonl", std::ios::trunc);
  for (const auto& r : records) manifest << record_to_json(r).dump() << '\n';
  if (!manifest) fail(ErrorCode::kIo, "cannot write manifest");
  return records;
}

}  // namespace refmap
