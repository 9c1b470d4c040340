#include "refmap/bench.hpp"

#include <cstdio>
#include <sstream>

#include "refmap/error.hpp"
#include "refmap/parallel.hpp"
#include "refmap/pfm.hpp"
#include "refmap/serialize.hpp"

namespace refmap {

namespace {

// The light sits up and to the right of the viewer, fixed in the camera
// frame so every view sees the same highlight layout.
constexpr Vec3 kPointLightCamera{0.5, 0.5, 0.70710678118654752};

ReflectanceMap render_side(const EnvironmentMap& env, const PhongMaterial& material, const ViewPose& view,
                           const BenchConfig& config) {
  return render_reflectance_map(env, material, view, config.resolution);
}

MetricPair compare(const ReflectanceMap& est, const ReflectanceMap& ref) {
  return compare_images(est.image(), ref.image(), ref.mask());
}

EnvironmentMap load_env(const std::filesystem::path& path, int resolution) {
  EnvironmentMap env(load_pfm(path));
  if (env.width() != resolution || env.height() != resolution) env = resample_envmap(env, resolution, resolution);
  return env;
}

}  // namespace

const char* to_string(Task t) {
  switch (t) {
    case Task::kPointLight: return "point_light";
    case Task::kMirrorMat: return "mirror_mat";
    case Task::kResynth: return "resynth";
    case Task::kMerlMat: return "merl_mat";
    case Task::kNatIllum: return "nat_illum";
  }
  return "?";
}

const char* task_title(Task t) {
  switch (t) {
    case Task::kPointLight: return "Point light";
    case Task::kMirrorMat: return "Mirror Mat.";
    case Task::kResynth: return "Re-synthesis";
    case Task::kMerlMat: return "MERL Mat.";
    case Task::kNatIllum: return "Nat. Illum.";
  }
  return "?";
}

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::kGroundTruth: return "ground-truth";
    case Provenance::kGreedy: return "greedy";
    case Provenance::kExternalFiles: return "external-files";
  }
  return "?";
}

void BenchConfig::validate() const {
  require(resolution > 0, "bench resolution must be positive");
  require(variants > 0, "variant count must be positive");
  require(point_light_radius > 0.0 && point_light_flux > 0.0, "point light needs positive radius and flux");
}

MetricPair run_task(Task task, const Decomposition& est, const Decomposition& ref, const AuxCorpora& aux,
                    Rng& rng, const BenchConfig& config) {
  config.validate();
  switch (task) {
    case Task::kPointLight: {
      const ViewPose view = sample_view(rng);
      const EnvironmentMap light =
          point_light_env(Direction::normalized(view.to_world(kPointLightCamera)), config.point_light_flux,
                          config.point_light_radius, config.resolution, config.resolution);
      return compare(render_side(light, est.material, view, config), render_side(light, ref.material, view, config));
    }
    case Task::kMirrorMat: {
      const ViewPose view = sample_view(rng);
      if (config.exact_mirror) {
        return compare(render_mirror_rm(est.env, view, config.resolution),
                       render_mirror_rm(ref.env, view, config.resolution));
      }
      const PhongMaterial mirror{{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, config.grid.max()};
      return compare(render_side(est.env, mirror, view, config), render_side(ref.env, mirror, view, config));
    }
    case Task::kResynth: {
      const ViewPose view = sample_view(rng);
      return compare(render_side(est.env, est.material, view, config),
                     render_side(ref.env, ref.material, view, config));
    }
    case Task::kMerlMat:
    case Task::kNatIllum: break;
  }

  const bool swap_material = task == Task::kMerlMat;
  if (swap_material ? aux.materials.empty() : aux.envs.empty()) {
    fail(ErrorCode::kInvalidInput, std::string("empty auxiliary corpus for task ") + to_string(task));
  }
  MetricPair sum;
  for (int v = 0; v < config.variants; ++v) {
    const ViewPose view = sample_view(rng);
    MetricPair m;
    if (swap_material) {
      const PhongMaterial& material = aux.materials[rng.index(aux.materials.size())];
      m = compare(render_side(est.env, material, view, config), render_side(ref.env, material, view, config));
    } else {
      const EnvironmentMap& env = aux.envs[rng.index(aux.envs.size())];
      m = compare(render_side(env, est.material, view, config), render_side(env, ref.material, view, config));
    }
    sum.mse += m.mse;
    sum.dssim += m.dssim;
  }
  return {sum.mse / config.variants, sum.dssim / config.variants};
}

EnvironmentMap upgrade_env(const EnvironmentMap& env, const ReflectanceMap& rm, const ViewPose& view,
                           const BenchConfig& config) {
  const int n = config.resolution;
  if (env.width() == n && env.height() == n) return env;
  if (config.guided_upsample && 2 * env.width() == n && 2 * env.height() == n) {
    return joint_bilateral_upsample(env, build_guide(rm, view, n, n), config.upsample);
  }
  return resample_envmap(env, n, n);
}

ReflectanceMap SampleContext::input() const {
  return ReflectanceMap(log_decode(load_pfm(dataset_root / record.rm_hdr)));
}

Decomposition GroundTruthProvider::decompose(const SampleContext& sample) const {
  return {sample.record.material, load_env(sample.dataset_root / sample.record.env, sample.config.resolution),
          Provenance::kGroundTruth};
}

Decomposition GreedyProvider::decompose(const SampleContext& sample) const {
  const ReflectanceMap rm = sample.input();
  if (rm.resolution() != sample.config.resolution) {
    fail(ErrorCode::kInvalidInput, "sample resolution " + std::to_string(rm.resolution()) +
                                       " differs from the bench resolution");
  }
  const EnvironmentMap estimate(load_pfm(dir_ / (sample.record.id + ".env.pfm")));
  EnvironmentMap env = upgrade_env(estimate, rm, sample.record.view, sample.config);
  const BasisRMs basis = precompute_basis(env, sample.record.view, sample.config.grid, rm.resolution());
  return {fit_phong(rm, basis).material, std::move(env), Provenance::kGreedy};
}

Decomposition ExternalFilesProvider::decompose(const SampleContext& sample) const {
  const std::string& id = sample.record.id;
  const PhongMaterial material = load_material(dir_ / (id + ".material.json"));
  const EnvironmentMap estimate(load_pfm(dir_ / (id + ".env.pfm")));
  if (estimate.width() == sample.config.resolution && estimate.height() == sample.config.resolution) {
    return {material, estimate, Provenance::kExternalFiles};
  }
  return {material, upgrade_env(estimate, sample.input(), sample.record.view, sample.config),
          Provenance::kExternalFiles};
}

std::unique_ptr<DecompositionProvider> make_provider(const std::string& name, const std::filesystem::path& dir) {
  if (name == "ground-truth") return std::make_unique<GroundTruthProvider>();
  if (dir.empty()) fail(ErrorCode::kInvalidInput, "provider '" + name + "' needs an estimate directory");
  if (name == "greedy") return std::make_unique<GreedyProvider>(dir);
  if (name == "external-files") return std::make_unique<ExternalFilesProvider>(dir);
  fail(ErrorCode::kInvalidInput, "unknown provider '" + name + "'");
}

AuxCorpora load_aux_corpora(const std::filesystem::path& dataset_root, int resolution) {
  const DatasetSplits splits = splits_from_json(read_json(dataset_root / "splits.json"));
  AuxCorpora aux;
  for (const auto& id : splits.materials.test) {
    aux.materials.push_back(load_material(dataset_root / "materials" / (id + ".json")));
  }
  for (const auto& id : splits.envs.test) {
    aux.envs.push_back(load_env(dataset_root / "env" / (id + ".pfm"), resolution));
  }
  return aux;
}

BenchReport run_benchmark(const std::filesystem::path& dataset_root, const DecompositionProvider& provider,
                          const BenchConfig& config) {
  config.validate();
  const std::vector<SampleRecord> manifest = read_manifest(dataset_root / "manifest.jsonl");
  const AuxCorpora aux = load_aux_corpora(dataset_root, config.resolution);

  std::vector<std::size_t> test;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    if (manifest[i].split == Split::kTest) test.push_back(i);
  }

  struct Outcome {
    bool ok = false;
    std::array<MetricPair, kAllTasks.size()> metrics{};
    std::string error;
  };
  std::vector<Outcome> outcomes(test.size());
  parallel_for(static_cast<int>(test.size()), [&](int, int k) {
    const std::size_t index = test[static_cast<std::size_t>(k)];
    const SampleRecord& record = manifest[index];
    Outcome& out = outcomes[static_cast<std::size_t>(k)];
    try {
      const SampleContext sample{record, dataset_root, config};
      const Decomposition ref = GroundTruthProvider().decompose(sample);
      const Decomposition est = provider.decompose(sample);
      for (std::size_t t = 0; t < kAllTasks.size(); ++t) {
        // One stream per (sample, task) keeps each task's views fixed no
        // matter which other tasks run.
        Rng rng(config.seed, (static_cast<std::uint64_t>(index) << 8) | t);
        out.metrics[t] = run_task(kAllTasks[t], est, ref, aux, rng, config);
      }
      out.ok = true;
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  });

  BenchReport report;
  report.provenance = provider.provenance();
  for (std::size_t k = 0; k < test.size(); ++k) {
    const Outcome& out = outcomes[k];
    if (!out.ok) {
      report.failures.push_back({manifest[test[k]].id, out.error});
      continue;
    }
    ++report.evaluated;
    for (std::size_t t = 0; t < kAllTasks.size(); ++t) {
      report.tasks[t].mse += out.metrics[t].mse;
      report.tasks[t].dssim += out.metrics[t].dssim;
      ++report.tasks[t].count;
    }
  }
  for (auto& s : report.tasks) {
    if (s.count == 0) continue;
    s.mse /= s.count;
    s.dssim /= s.count;
  }
  return report;
}

std::string report_csv(const BenchReport& report) {
  std::ostringstream os;
  os << "task,mse,dssim,count\n";
  char buf[128];
  for (Task t : kAllTasks) {
    const TaskStats& s = report[t];
    std::snprintf(buf, sizeof buf, "%s,%.9e,%.9e,%d\n", to_string(t), s.mse, s.dssim, s.count);
    os << buf;
  }
  return os.str();
}

std::string report_markdown(const BenchReport& report) {
  std::ostringstream os;
  os << "| Provider |";
  for (Task t : kAllTasks) os << ' ' << task_title(t) << " |";
  os << "\n|---|";
  for (std::size_t i = 0; i < kAllTasks.size(); ++i) os << "---|";
  os << '\n';
  char buf[64];
  for (const char* metric : {"MSE", "DSSIM"}) {
    os << "| " << to_string(report.provenance) << ' ' << metric << " |";
    for (Task t : kAllTasks) {
      const TaskStats& s = report[t];
      std::snprintf(buf, sizeof buf, " %.4g |", metric[0] == 'M' ? s.mse : s.dssim);
      os << buf;
    }
    os << '\n';
  }
  os << "\nSamples evaluated: " << report.evaluated << ", skipped: " << report.failures.size() << '\n';
  for (const auto& f : report.failures) os << "- " << f.id << ": " << f.message << '\n';
  return os.str();
}

}  // namespace refmap
