#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <map>
#include <sys/wait.h>

#include <json.hpp>

#include "refmap/pfm.hpp"
#include "refmap/serialize.hpp"
#include "support/oracles.hpp"

using namespace refmap;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int status;
  std::string out;
};

CliResult cli(const std::string& args) {
  const std::string cmd = std::string("\"") + REFMAP_CLI_PATH + "\" " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  std::array<char, 4096> buf;
  while (std::fgets(buf.data(), buf.size(), pipe)) out += buf.data();
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    out[fs::relative(e.path(), root).string()] = {std::istreambuf_iterator<char>(in), {}};
  }
  return out;
}

}  // namespace

TEST(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(cli("--help").status, 0);
  for (const char* sub : {"render", "fit", "simulate-ldr", "upsample", "metrics", "gen-dataset", "bench"}) {
    EXPECT_EQ(cli(std::string(sub) + " --help").status, 0) << sub;
  }
  EXPECT_EQ(cli("metrics a.pfm b.pfm --bogus").status, 2);
  EXPECT_EQ(cli("").status, 2);
  EXPECT_EQ(cli("frobnicate").status, 2);
}

TEST(Cli, MetricsIdentity) {
  const fs::path dir = oracle::scratch_dir("cli_metrics");
  save_pfm(oracle::synthetic_env(16, 8, 1).image(), dir / "a.pfm");
  const CliResult r = cli("metrics " + (dir / "a.pfm").string() + " " + (dir / "a.pfm").string());
  ASSERT_EQ(r.status, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("mse").get<double>(), 0.0);
  EXPECT_EQ(j.at("dssim").get<double>(), 0.0);
  EXPECT_NE(r.out.find("\"mse\":0.0"), std::string::npos);
  EXPECT_EQ(cli("metrics " + (dir / "a.pfm").string() + " " + (dir / "missing.pfm").string()).status, 3);
}

TEST(Cli, RenderThenFitRecoversMaterial) {
  const fs::path dir = oracle::scratch_dir("cli_fit");
  save_pfm(oracle::synthetic_env(32, 32, 2).image(), dir / "env.pfm");
  // Level 6 of a 10-level grid over [1, 512] is 2^6 = 64.
  const PhongMaterial m{{0.3, 0.2, 0.6}, {0.5, 0.4, 0.1}, 64.0};
  save_material(m, dir / "m.json");
  const std::string view = " --azimuth 0.8 --declination 0.1";
  ASSERT_EQ(cli("render --env " + (dir / "env.pfm").string() + " --material " + (dir / "m.json").string() +
                " --out " + (dir / "rm.pfm").string() + " --resolution 32" + view)
                .status,
            0);
  ASSERT_EQ(cli("fit --rm " + (dir / "rm.pfm").string() + " --env " + (dir / "env.pfm").string() + " --out " +
                (dir / "fit.json").string() + " --gloss-levels 10 --gloss-min 1 --gloss-max 512 --basis-cache " +
                (dir / "basis").string() + view)
                .status,
            0);
  const PhongMaterial got = load_material(dir / "fit.json");
  EXPECT_NEAR(got.kg, 64.0, 1e-9);
  for (int c = 0; c < 3; ++c) {
    EXPECT_NEAR(got.kd[c], m.kd[c], 1e-3);
    EXPECT_NEAR(got.ks[c], m.ks[c], 1e-3);
  }
  EXPECT_TRUE(fs::exists(dir / "basis" / "index.json"));
  // Second run reads the cached basis.
  EXPECT_EQ(cli("fit --rm " + (dir / "rm.pfm").string() + " --env " + (dir / "env.pfm").string() + " --out " +
                (dir / "fit2.json").string() + " --basis-cache " + (dir / "basis").string() + view)
                .status,
            0);
  EXPECT_EQ(load_material(dir / "fit2.json"), got);
}

TEST(Cli, SimulateLdrAndUpsample) {
  const fs::path dir = oracle::scratch_dir("cli_ldr");
  save_pfm(oracle::synthetic_env(16, 16, 3).image(), dir / "low.pfm");
  save_pfm(oracle::synthetic_env(32, 32, 4).image(), dir / "rm.pfm");
  EXPECT_EQ(cli("simulate-ldr --in " + (dir / "rm.pfm").string() + " --out " + (dir / "ldr.pfm").string() +
                " --disk --exposure-out " + (dir / "e.json").string())
                .status,
            0);
  const ExposureParams e = exposure_from_json(read_json(dir / "e.json"));
  EXPECT_LT(e.lo, e.hi);
  EXPECT_EQ(cli("simulate-ldr --in " + (dir / "rm.pfm").string() + " --out " + (dir / "x.pfm").string() +
                " --lo 3 --hi 1")
                .status,
            3);
  EXPECT_EQ(cli("upsample --low " + (dir / "low.pfm").string() + " --rm " + (dir / "rm.pfm").string() + " --out " +
                (dir / "up.pfm").string() + " --sigma-s 1.0")
                .status,
            0);
  EXPECT_EQ(load_pfm(dir / "up.pfm").width(), 32);
  // A corrupt file is an input error.
  std::ofstream(dir / "bad.pfm") << "PF\n4 4\n-1\nxx";
  EXPECT_EQ(cli("upsample --low " + (dir / "bad.pfm").string() + " --rm " + (dir / "rm.pfm").string() + " --out " +
                (dir / "up.pfm").string())
                .status,
            3);
}

TEST(Cli, GenDatasetDeterministicAndBench) {
  const fs::path dir = oracle::scratch_dir("cli_gen");
  fs::create_directories(dir / "envs");
  for (int i = 0; i < 3; ++i) {
    save_pfm(oracle::synthetic_env(32, 32, 10 + static_cast<std::uint64_t>(i)).image(),
             dir / "envs" / ("e" + std::to_string(i) + ".pfm"));
  }
  for (const char* out : {"a", "b"}) {
    ASSERT_EQ(cli("gen-dataset --count 10 --seed 7 --resolution 32 --envs " + (dir / "envs").string() + " --out " +
                  (dir / out).string() + " --threads 2")
                  .status,
              0);
  }
  EXPECT_EQ(tree(dir / "a"), tree(dir / "b"));
  EXPECT_EQ(tree(dir / "a").count("manifest.jsonl"), 1u);

  const CliResult bench = cli("bench --dataset " + (dir / "a").string() + " --resolution 32 --variants 2 --csv " +
                        (dir / "report.csv").string());
  ASSERT_EQ(bench.status, 0);
  EXPECT_NE(bench.out.find("Re-synthesis"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "report.csv"));
  EXPECT_EQ(cli("bench --dataset " + (dir / "a").string() + " --provider wizard").status, 2);
  EXPECT_EQ(cli("bench --dataset " + (dir / "a").string() + " --provider greedy").status, 3);
}
