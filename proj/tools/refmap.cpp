// Command-line front end: one binary, one subcommand per pipeline stage.
//
// Exit codes: 0 success, 1 internal error, 2 usage error, 3 bad input or
// I/O failure, 4 numeric or contract failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "refmap/bench.hpp"
#include "refmap/dataset.hpp"
#include "refmap/error.hpp"
#include "refmap/exposure.hpp"
#include "refmap/fit.hpp"
#include "refmap/metrics.hpp"
#include "refmap/parallel.hpp"
#include "refmap/pfm.hpp"
#include "refmap/render.hpp"
#include "refmap/serialize.hpp"
#include "refmap/upsample.hpp"

using namespace refmap;

namespace {

enum ExitCode { kOk = 0, kInternal = 1, kUsage = 2, kInput = 3, kNumericFailure = 4 };

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedHeader:
    case ErrorCode::kTruncatedPayload:
    case ErrorCode::kIo:
    case ErrorCode::kInvalidInput: return kInput;
    case ErrorCode::kNonFinite:
    case ErrorCode::kNumeric:
    case ErrorCode::kContractViolation: return kNumericFailure;
  }
  return kInternal;
}

// View given either as a JSON file or as two angles in radians.
struct ViewOptions {
  std::string file;
  double azimuth = 0.0;
  double declination = 0.0;

  void add(CLI::App* app) {
    app->add_option("--view", file, "View JSON {\"azimuth\", \"declination\"} in radians");
    app->add_option("--azimuth", azimuth, "View azimuth in radians (ignored with --view)")->capture_default_str();
    app->add_option("--declination", declination, "View declination in radians (ignored with --view)")
        ->capture_default_str();
  }
  ViewPose pose() const { return file.empty() ? ViewPose(azimuth, declination) : view_from_json(read_json(file)); }
};

struct GridOptions {
  int levels = GlossGrid::kDefaultLevels;
  double k_min = GlossGrid::kDefaultMin;
  double k_max = GlossGrid::kDefaultMax;

  void add(CLI::App* app) {
    app->add_option("--gloss-levels", levels, "Number of glossiness levels")->capture_default_str();
    app->add_option("--gloss-min", k_min, "Smallest glossiness")->capture_default_str();
    app->add_option("--gloss-max", k_max, "Largest glossiness")->capture_default_str();
  }
  GlossGrid grid() const { return GlossGrid(levels, k_min, k_max); }
};

void write_text(const std::string& text, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reflectance map synthesis, Phong fitting and re-synthesis benchmark"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 0;
  app.add_option("--threads", threads, "Worker thread cap (0 = REFMAP_THREADS or all cores)");

  // render
  auto* render = app.add_subcommand("render", "Render a reflectance map from env + material + view");
  std::string r_env, r_material, r_out;
  int r_resolution = kDefaultResolution;
  bool r_mirror = false;
  ViewOptions r_view;
  render->add_option("--env", r_env, "Environment map (PFM, lat-long)")->required();
  render->add_option("--material", r_material, "Material JSON")->required();
  render->add_option("--out", r_out, "Output reflectance map (PFM)")->required();
  render->add_option("--resolution", r_resolution, "Output size in pixels")->capture_default_str();
  render->add_flag("--mirror", r_mirror, "Ideal mirror lookup instead of the material");
  r_view.add(render);

  // fit
  auto* fit = app.add_subcommand("fit", "Fit a Phong material to a reflectance map under a known env");
  std::string f_rm, f_env, f_out, f_basis;
  ViewOptions f_view;
  GridOptions f_grid;
  fit->add_option("--rm", f_rm, "Reflectance map (PFM, linear radiance)")->required();
  fit->add_option("--env", f_env, "Environment map (PFM)")->required();
  fit->add_option("--out", f_out, "Output material JSON")->required();
  fit->add_option("--basis-cache", f_basis, "Directory to load or store the rendered basis");
  f_view.add(fit);
  f_grid.add(fit);

  // simulate-ldr
  auto* ldr = app.add_subcommand("simulate-ldr", "Simulate an 8-bit exposure of an HDR image");
  std::string l_in, l_out, l_exposure;
  std::optional<double> l_lo, l_hi;
  bool l_disk = false;
  ldr->add_option("--in", l_in, "Input HDR image (PFM)")->required();
  ldr->add_option("--out", l_out, "Output LDR image (PFM, radiance units)")->required();
  ldr->add_option("--exposure-out", l_exposure, "Write the bracket as JSON");
  ldr->add_option("--lo", l_lo, "Bracket low end (default: 5th percentile)");
  ldr->add_option("--hi", l_hi, "Bracket high end (default: 95th percentile)");
  ldr->add_flag("--disk", l_disk, "Input is a reflectance map; percentiles over the sphere disk only");

  // upsample
  auto* up = app.add_subcommand("upsample", "Joint bilateral 2x upsampling of an environment estimate");
  std::string u_low, u_rm, u_out;
  ViewOptions u_view;
  UpsampleParams u_params;
  up->add_option("--low", u_low, "Low-resolution environment map (PFM)")->required();
  up->add_option("--rm", u_rm, "Reflectance map used as guide (PFM)")->required();
  up->add_option("--out", u_out, "Output environment map (PFM)")->required();
  up->add_option("--sigma-s", u_params.sigma_spatial, "Spatial sigma in low-res texels")->capture_default_str();
  up->add_option("--sigma-r", u_params.sigma_range, "Range sigma; <= 0 picks 0.1 x p95 guide luminance")
      ->capture_default_str();
  u_view.add(up);

  // metrics
  auto* metrics = app.add_subcommand("metrics", "Compare an estimate with a reference (log-MSE, DSSIM)");
  std::string m_a, m_b;
  bool m_disk = false;
  metrics->add_option("estimate", m_a, "Estimated image (PFM)")->required();
  metrics->add_option("reference", m_b, "Reference image (PFM)")->required();
  metrics->add_flag("--disk", m_disk, "Compare reflectance maps over the sphere disk only");

  // gen-dataset
  auto* gen = app.add_subcommand("gen-dataset", "Render a training/test dataset of reflectance maps");
  GenConfig g_config;
  std::string g_envs, g_materials, g_out;
  gen->add_option("--count", g_config.count, "Number of samples")->capture_default_str();
  gen->add_option("--seed", g_config.seed, "Random seed")->capture_default_str();
  gen->add_option("--resolution", g_config.resolution, "Reflectance map and env size")->capture_default_str();
  gen->add_option("--envs", g_envs, "Directory of environment maps (*.pfm)")->required();
  gen->add_option("--materials", g_materials, "Directory of material JSON files (default: random materials)");
  gen->add_option("--random-materials", g_config.random_materials, "Random material pool size")
      ->capture_default_str();
  gen->add_option("--material-train-fraction", g_config.material_train_fraction)->capture_default_str();
  gen->add_option("--env-train-fraction", g_config.env_train_fraction)->capture_default_str();
  gen->add_option("--out", g_out, "Output directory")->required();

  // bench
  auto* bench = app.add_subcommand("bench", "Run the re-synthesis benchmark on a dataset's test split");
  BenchConfig b_config;
  std::string b_dataset, b_provider = "ground-truth", b_estimates, b_csv, b_markdown;
  GridOptions b_grid;
  bool b_resample = false;
  bench->add_option("--dataset", b_dataset, "Dataset directory written by gen-dataset")->required();
  bench->add_option("--provider", b_provider, "ground-truth, greedy or external-files")
      ->check(CLI::IsMember({"ground-truth", "greedy", "external-files"}))
      ->capture_default_str();
  bench->add_option("--estimates", b_estimates, "Directory with <id>.env.pfm / <id>.material.json");
  bench->add_option("--variants", b_config.variants, "Random variants for the swap tasks")->capture_default_str();
  bench->add_option("--seed", b_config.seed, "Random seed")->capture_default_str();
  bench->add_option("--resolution", b_config.resolution, "Re-rendering size")->capture_default_str();
  bench->add_flag("--resample", b_resample, "Upgrade env estimates by plain resampling instead of guided upsampling");
  bench->add_flag("--exact-mirror", b_config.exact_mirror, "Mirror task via direct env lookup");
  bench->add_option("--sigma-s", b_config.upsample.sigma_spatial)->capture_default_str();
  bench->add_option("--sigma-r", b_config.upsample.sigma_range)->capture_default_str();
  bench->add_option("--csv", b_csv, "Write the report as CSV");
  bench->add_option("--markdown", b_markdown, "Write the report as a Markdown table");
  b_grid.add(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (threads > 0) set_thread_count(threads);

    if (*render) {
      const EnvironmentMap env(load_pfm(r_env));
      const ViewPose view = r_view.pose();
      const ReflectanceMap rm = r_mirror ? render_mirror_rm(env, view, r_resolution)
                                         : render_reflectance_map(env, load_material(r_material), view, r_resolution);
      save_pfm(rm.image(), r_out);
    } else if (*fit) {
      const ReflectanceMap rm(load_pfm(f_rm));
      const ViewPose view = f_view.pose();
      BasisRMs basis;
      if (!f_basis.empty() && std::filesystem::exists(std::filesystem::path(f_basis) / "index.json")) {
        basis = load_basis(f_basis);
      } else {
        basis = precompute_basis(EnvironmentMap(load_pfm(f_env)), view, f_grid.grid(), rm.resolution(),
                                 std::filesystem::path(f_env).stem().string());
        if (!f_basis.empty()) save_basis(basis, f_basis);
      }
      const PhongFit result = fit_phong(rm, basis);
      save_material(result.material, f_out);
    } else if (*ldr) {
      const Image img = load_pfm(l_in);
      std::vector<unsigned char> mask;
      if (l_disk) mask = ReflectanceMap(img).mask();
      ExposureParams params = choose_exposure(img, mask);
      if (l_lo) params.lo = *l_lo;
      if (l_hi) params.hi = *l_hi;
      params.validate();
      Image out = simulate_ldr(img, params);
      if (l_disk) out = ReflectanceMap(std::move(out)).image();
      save_pfm(out, l_out);
      if (!l_exposure.empty()) write_json(exposure_to_json(params), l_exposure);
    } else if (*up) {
      const EnvironmentMap low(load_pfm(u_low));
      const ReflectanceMap rm(load_pfm(u_rm));
      const GuideImage guide = build_guide(rm, u_view.pose(), 2 * low.width(), 2 * low.height());
      save_pfm(joint_bilateral_upsample(low, guide, u_params).image(), u_out);
    } else if (*metrics) {
      const Image a = load_pfm(m_a);
      const Image b = load_pfm(m_b);
      std::vector<unsigned char> mask;
      if (m_disk) mask = ReflectanceMap(b).mask();
      const MetricPair m = compare_images(a, b, mask);
      std::cout << nlohmann::json{{"mse", m.mse}, {"dssim", m.dssim}}.dump() << '\n';
    } else if (*gen) {
      g_config.env_dir = g_envs;
      g_config.material_dir = g_materials;
      g_config.out_dir = g_out;
      const auto records = generate(g_config);
      std::cerr << "wrote " << records.size() << " samples to " << g_out << '\n';
    } else if (*bench) {
      b_config.grid = b_grid.grid();
      b_config.guided_upsample = !b_resample;
      const auto provider = make_provider(b_provider, b_estimates);
      const BenchReport report = run_benchmark(b_dataset, *provider, b_config);
      if (!b_csv.empty()) write_text(report_csv(report), b_csv);
      if (!b_markdown.empty()) write_text(report_markdown(report), b_markdown);
      std::cout << report_markdown(report);
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kOk;
}
