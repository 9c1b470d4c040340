#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "refmap/dataset.hpp"
#include "refmap/fit.hpp"
#include "refmap/metrics.hpp"
#include "refmap/render.hpp"
#include "refmap/rng.hpp"
#include "refmap/upsample.hpp"

namespace refmap {

enum class Task { kPointLight, kMirrorMat, kResynth, kMerlMat, kNatIllum };
inline constexpr std::array<Task, 5> kAllTasks = {Task::kPointLight, Task::kMirrorMat, Task::kResynth,
                                                  Task::kMerlMat, Task::kNatIllum};
const char* to_string(Task t);
/// Column heading used in the Markdown report.
const char* task_title(Task t);

enum class Provenance { kGroundTruth, kGreedy, kExternalFiles };
const char* to_string(Provenance p);

/// A reflectance map separated into material and illumination.
struct Decomposition {
  PhongMaterial material;
  EnvironmentMap env;
  Provenance provenance = Provenance::kGroundTruth;
};

/// Test-split materials and environments used by the swap tasks.
struct AuxCorpora {
  std::vector<PhongMaterial> materials;
  std::vector<EnvironmentMap> envs;
};

struct BenchConfig {
  int resolution = kDefaultResolution;
  int variants = 50;
  std::uint64_t seed = 0;
  /// Its top level is the "mirror" gloss; greedy fitting searches it.
  GlossGrid grid;
  /// Upgrade half-resolution env estimates with the joint bilateral filter
  /// instead of plain resampling.
  bool guided_upsample = true;
  UpsampleParams upsample;
  /// Render the mirror task with a direct environment lookup instead of
  /// the top gloss level.
  bool exact_mirror = false;
  double point_light_radius = 5.0 * kPi / 180.0;
  /// A white diffuse sphere lit by a small cap reaches about this value.
  double point_light_flux = 1.0;

  void validate() const;
};

/// Renders the task's image pair (est-derived, ref-derived) under shared
/// random views and compares them with log-MSE and DSSIM over the disk.
/// Swap tasks average over config.variants draws from aux; the other tasks
/// use a single view. Throws kInvalidInput for swap tasks with an empty
/// corpus.
MetricPair run_task(Task task, const Decomposition& est, const Decomposition& ref, const AuxCorpora& aux,
                    Rng& rng, const BenchConfig& config);

/// Brings an env estimate to the benchmark resolution: guided 2x upsampling
/// against the sample's reflectance map when the estimate is exactly half
/// size and config.guided_upsample is set, plain resampling otherwise.
EnvironmentMap upgrade_env(const EnvironmentMap& env, const ReflectanceMap& rm, const ViewPose& view,
                           const BenchConfig& config);

/// What a provider sees of one test sample.
struct SampleContext {
  const SampleRecord& record;
  const std::filesystem::path& dataset_root;
  const BenchConfig& config;
  /// Linear HDR reflectance map of the sample.
  ReflectanceMap input() const;
};

class DecompositionProvider {
 public:
  virtual ~DecompositionProvider() = default;
  virtual Provenance provenance() const = 0;
  virtual Decomposition decompose(const SampleContext& sample) const = 0;
};

/// Returns the sample's own material and environment.
class GroundTruthProvider final : public DecompositionProvider {
 public:
  Provenance provenance() const override { return Provenance::kGroundTruth; }
  Decomposition decompose(const SampleContext& sample) const override;
};

/// Reads <dir>/<id>.env.pfm and fits the Phong material to the sample's
/// reflectance map under that environment.
class GreedyProvider final : public DecompositionProvider {
 public:
  explicit GreedyProvider(std::filesystem::path dir) : dir_(std::move(dir)) {}
  Provenance provenance() const override { return Provenance::kGreedy; }
  Decomposition decompose(const SampleContext& sample) const override;

 private:
  std::filesystem::path dir_;
};

/// Reads <dir>/<id>.material.json and <dir>/<id>.env.pfm.
class ExternalFilesProvider final : public DecompositionProvider {
 public:
  explicit ExternalFilesProvider(std::filesystem::path dir) : dir_(std::move(dir)) {}
  Provenance provenance() const override { return Provenance::kExternalFiles; }
  Decomposition decompose(const SampleContext& sample) const override;

 private:
  std::filesystem::path dir_;
};

std::unique_ptr<DecompositionProvider> make_provider(const std::string& name, const std::filesystem::path& dir);

struct TaskStats {
  double mse = 0.0;
  double dssim = 0.0;
  int count = 0;
};

struct SampleFailure {
  std::string id;
  std::string message;
};

struct BenchReport {
  Provenance provenance = Provenance::kGroundTruth;
  std::array<TaskStats, kAllTasks.size()> tasks{};
  int evaluated = 0;
  std::vector<SampleFailure> failures;

  const TaskStats& operator[](Task t) const { return tasks[static_cast<std::size_t>(t)]; }
};

/// Loads the aux corpora from the dataset's test split.
AuxCorpora load_aux_corpora(const std::filesystem::path& dataset_root, int resolution);

/// Runs every task on every test-split sample of the dataset. A sample
/// whose decomposition or evaluation fails is skipped and listed in
/// report.failures. Sample i draws from Rng(seed, i), so results do not
/// depend on the processing order or thread count.
BenchReport run_benchmark(const std::filesystem::path& dataset_root, const DecompositionProvider& provider,
                          const BenchConfig& config);

std::string report_csv(const BenchReport& report);
std::string report_markdown(const BenchReport& report);

}  // namespace refmap
