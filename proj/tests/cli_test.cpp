// End-to-end tests that drive the installed binary the way a user would:
// every call goes through std::system on the real executable.

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include <json.hpp>
#include <seisfacies/seisfacies.hpp>

#include "test_util.hpp"

#ifndef SEISFACIES_CLI_PATH
#error "SEISFACIES_CLI_PATH must point at the seisfacies binary"
#endif

namespace sf = seisfacies;
namespace st = seisfacies::store;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(const testutil::TempDir& tmp, const std::string& args) {
  const std::string out_path = (tmp.path() / "cli_stdout.txt").string();
  const std::string err_path = (tmp.path() / "cli_stderr.txt").string();
  const std::string cmd = std::string(SEISFACIES_CLI_PATH) + " " + args +
                          " > " + out_path + " 2> " + err_path;
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = testutil::read_file_text(out_path);
  r.err = testutil::read_file_text(err_path);
  return r;
}

std::string q(const std::filesystem::path& p) { return p.string(); }

st::ColumnStats identity_stats(int d) {
  st::ColumnStats s;
  s.mean.assign(d, 0.0);
  s.stddev.assign(d, 1.0);
  s.constant.assign(d, false);
  return s;
}

nlohmann::json load_json(const std::filesystem::path& p) {
  std::ifstream in(p);
  nlohmann::json j;
  in >> j;
  return j;
}

}  // namespace

TEST(Cli, VersionAndBadUsage) {
  testutil::TempDir tmp;
  const CliResult version = run_cli(tmp, "--version");
  EXPECT_EQ(version.exit_code, 0);
  EXPECT_NE(version.out.find("seisfacies 1.0.0"), std::string::npos);

  EXPECT_NE(run_cli(tmp, "").exit_code, 0);          // subcommand required
  EXPECT_NE(run_cli(tmp, "frobnicate").exit_code, 0);
  EXPECT_NE(run_cli(tmp, "train").exit_code, 0);     // missing required flags
}

TEST(Cli, FullPipelineRuns) {
  testutil::TempDir tmp;
  const auto segy = tmp.path() / "cube.sgy";
  const auto store = tmp.path() / "store";
  const auto model = tmp.path() / "model.json";
  const auto labels = tmp.path() / "labels.sflb";

  CliResult r = run_cli(tmp, "synth --out " + q(segy) + " --seed 4");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("16 x 16 x 64"), std::string::npos);

  r = run_cli(tmp, "ingest --input " + q(segy) + " --store " + q(store) +
                       " --chunk-rows 4096 --workers 2");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("16384 rows x 9 features"), std::string::npos);
  EXPECT_NE(r.out.find("4 chunks"), std::string::npos);

  const st::StoreManifest man = st::open_store(store);
  EXPECT_EQ(man.n_rows, 16384);
  EXPECT_EQ(man.n_cols(), 9);
  EXPECT_EQ(man.attribute_names.front(), "amplitude");

  r = run_cli(tmp, "train --store " + q(store) + " --model " + q(model) +
                       " --k 5 --seed 7 --workers 2");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("trained k=5 on 16384 rows"), std::string::npos);
  EXPECT_NE(r.out.find("objective history:"), std::string::npos);

  r = run_cli(tmp, "predict --store " + q(store) + " --model " + q(model) +
                       " --out " + q(labels) +
                       " --slice-inline 3 --slice-crossline 0 --workers 2");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("labeled 16384 cells"), std::string::npos);

  const sf::labels::LabelVolume vol = sf::labels::read_label_volume(labels);
  EXPECT_EQ(vol.k, 5);
  EXPECT_EQ(vol.geometry.n_inline, 16);
  EXPECT_EQ(vol.values.size(), 16384u);

  // Side-channel slice images from predict.
  const auto il3 = tmp.path() / "labels_il3.ppm";
  const auto xl0 = tmp.path() / "labels_xl0.ppm";
  ASSERT_TRUE(std::filesystem::exists(il3)) << r.out;
  ASSERT_TRUE(std::filesystem::exists(xl0));

  // Standalone slice command agrees byte for byte with predict's image.
  const auto slice_img = tmp.path() / "slice.ppm";
  r = run_cli(tmp, "slice --input " + q(labels) + " --out " + q(slice_img) +
                       " --axis inline --index 3");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(testutil::read_file_bytes(slice_img),
            testutil::read_file_bytes(il3));
  const std::string header = testutil::read_file_text(slice_img).substr(0, 10);
  EXPECT_EQ(header, "P6\n16 64\n2");  // width 16 (crosslines), height 64

  // Bench on the same store: tiny sweep, table plus CSV.
  const auto csv = tmp.path() / "bench.csv";
  r = run_cli(tmp, "bench --store " + q(store) +
                       " --k-min 2 --k-max 3 --workers 1 2 --reps 1"
                       " --max-iters 5 --out " +
                       q(csv));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("median wall time (s)"), std::string::npos);
  EXPECT_NE(r.out.find("geometric-mean speedup vs workers=1"),
            std::string::npos);
  const std::string csv_text = testutil::read_file_text(csv);
  EXPECT_EQ(csv_text.rfind("dataset,k,workers,wall_time_s,iterations,"
                           "distance_evals\n",
                           0),
            0u);
}

TEST(Cli, ErrorsCarryExitCodeAndName) {
  testutil::TempDir tmp;
  const auto missing = tmp.path() / "missing.sgy";
  CliResult r = run_cli(tmp, "ingest --input " + q(missing) + " --store " +
                                 q(tmp.path() / "s"));
  EXPECT_EQ(r.exit_code, 10);  // io_error
  EXPECT_NE(r.err.find("error: io_error:"), std::string::npos);
  EXPECT_NE(r.err.find("missing.sgy"), std::string::npos);

  // A model trained on 2 features cannot label a 9-feature store.
  const auto narrow = tmp.path() / "narrow";
  const st::FeatureMatrix m = testutil::make_uniform_matrix(64, 2, 3);
  st::write_store(m, identity_stats(2), narrow, 64);
  const auto narrow_model = tmp.path() / "narrow.json";
  r = run_cli(tmp, "train --store " + q(narrow) + " --model " +
                       q(narrow_model) + " --k 2");
  ASSERT_EQ(r.exit_code, 0) << r.err;

  const auto segy = tmp.path() / "cube.sgy";
  const auto store = tmp.path() / "store";
  ASSERT_EQ(run_cli(tmp, "synth --out " + q(segy) +
                             " --inlines 4 --crosslines 4 --samples 32")
                .exit_code,
            0);
  ASSERT_EQ(run_cli(tmp, "ingest --input " + q(segy) + " --store " + q(store))
                .exit_code,
            0);
  r = run_cli(tmp, "predict --store " + q(store) + " --model " +
                       q(narrow_model) + " --out " + q(tmp.path() / "l"));
  EXPECT_EQ(r.exit_code, 30);  // dimension_mismatch
  EXPECT_NE(r.err.find("error: dimension_mismatch:"), std::string::npos);

  // k larger than the store's row count.
  r = run_cli(tmp, "train --store " + q(narrow) + " --model " +
                       q(tmp.path() / "m2.json") + " --k 65");
  EXPECT_EQ(r.exit_code, 31);  // too_few_distinct_rows
}

TEST(Cli, SynthAndIngestAreByteDeterministic) {
  testutil::TempDir tmp;
  const auto a_sgy = tmp.path() / "a.sgy";
  const auto b_sgy = tmp.path() / "b.sgy";
  const std::string args =
      " --inlines 6 --crosslines 5 --samples 48 --seed 11 --noise-std 0.05";
  ASSERT_EQ(run_cli(tmp, "synth --out " + q(a_sgy) + args).exit_code, 0);
  ASSERT_EQ(run_cli(tmp, "synth --out " + q(b_sgy) + args).exit_code, 0);
  EXPECT_EQ(testutil::read_file_bytes(a_sgy), testutil::read_file_bytes(b_sgy));

  const auto a_store = tmp.path() / "a_store";
  const auto b_store = tmp.path() / "b_store";
  ASSERT_EQ(run_cli(tmp, "ingest --input " + q(a_sgy) + " --store " +
                             q(a_store) + " --chunk-rows 500 --workers 1")
                .exit_code,
            0);
  ASSERT_EQ(run_cli(tmp, "ingest --input " + q(b_sgy) + " --store " +
                             q(b_store) + " --chunk-rows 500 --workers 4")
                .exit_code,
            0);
  // Same bytes regardless of worker count, chunk by chunk.
  EXPECT_EQ(testutil::read_file_bytes(a_store / "manifest"),
            testutil::read_file_bytes(b_store / "manifest"));
  const st::StoreManifest man = st::open_store(a_store);
  ASSERT_EQ(man.n_chunks(), 3);  // 1440 rows at 500 per chunk
  for (int i = 0; i < man.n_chunks(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "chunk_%06d.bin", i);
    EXPECT_EQ(testutil::read_file_bytes(a_store / name),
              testutil::read_file_bytes(b_store / name));
  }
}

TEST(Cli, TrainIsWorkerCountInvariant) {
  testutil::TempDir tmp;
  const auto segy = tmp.path() / "cube.sgy";
  const auto store = tmp.path() / "store";
  ASSERT_EQ(run_cli(tmp, "synth --out " + q(segy) +
                             " --inlines 8 --crosslines 8 --samples 32"
                             " --seed 2 --noise-std 0.1")
                .exit_code,
            0);
  ASSERT_EQ(run_cli(tmp, "ingest --input " + q(segy) + " --store " + q(store) +
                             " --chunk-rows 300")
                .exit_code,
            0);
  const auto m1 = tmp.path() / "m1.json";
  const auto m4 = tmp.path() / "m4.json";
  const std::string common = " --k 6 --seed 5 --tol 1e-6 --model ";
  ASSERT_EQ(run_cli(tmp, "train --store " + q(store) + common + q(m1) +
                             " --workers 1")
                .exit_code,
            0);
  ASSERT_EQ(run_cli(tmp, "train --store " + q(store) + common + q(m4) +
                             " --workers 4")
                .exit_code,
            0);
  EXPECT_EQ(testutil::read_file_bytes(m1), testutil::read_file_bytes(m4));
}

TEST(Cli, IterationCapIsHonored) {
  testutil::TempDir tmp;
  const auto segy = tmp.path() / "c.sgy";
  const auto store = tmp.path() / "s";
  ASSERT_EQ(run_cli(tmp, "synth --out " + q(segy) +
                             " --inlines 4 --crosslines 4 --samples 32")
                .exit_code,
            0);
  ASSERT_EQ(run_cli(tmp, "ingest --input " + q(segy) + " --store " + q(store))
                .exit_code,
            0);
  const auto model = tmp.path() / "m.json";
  const CliResult r =
      run_cli(tmp, "train --store " + q(store) + " --model " + q(model) +
                       " --k 4 --tol 0 --max-iters 1");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const nlohmann::json j = load_json(model);
  EXPECT_EQ(j.at("iterations_run").get<int>(), 1);
  EXPECT_EQ(j.at("config").at("max_iters").get<int>(), 1);
  EXPECT_EQ(j.at("objective_history").size(), 1u);
}

TEST(Cli, ConfigFileAndFlagPrecedence) {
  testutil::TempDir tmp;
  const auto segy = tmp.path() / "c.sgy";
  const auto store = tmp.path() / "s";
  ASSERT_EQ(run_cli(tmp, "synth --out " + q(segy) +
                             " --inlines 4 --crosslines 4 --samples 32")
                .exit_code,
            0);
  ASSERT_EQ(run_cli(tmp, "ingest --input " + q(segy) + " --store " + q(store))
                .exit_code,
            0);

  const auto cfg_path = tmp.path() / "train.ini";
  {
    std::ofstream cfg(cfg_path);
    cfg << "[train]\nk=3\nseed=9\n";
  }

  // Config file supplies k when the flag is absent.
  const auto m_cfg = tmp.path() / "from_config.json";
  CliResult r = run_cli(tmp, "--config " + q(cfg_path) + " train --store " +
                                 q(store) + " --model " + q(m_cfg));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(load_json(m_cfg).at("k").get<int>(), 3);

  // An explicit flag beats the config file.
  const auto m_flag = tmp.path() / "from_flag.json";
  r = run_cli(tmp, "--config " + q(cfg_path) + " train --store " + q(store) +
                       " --model " + q(m_flag) + " --k 4");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(load_json(m_flag).at("k").get<int>(), 4);

  // The environment variable can point at the config file instead.
  const auto m_env = tmp.path() / "from_env.json";
  ASSERT_EQ(setenv("SEISFACIES_CONFIG", cfg_path.string().c_str(), 1), 0);
  r = run_cli(tmp, "train --store " + q(store) + " --model " + q(m_env));
  unsetenv("SEISFACIES_CONFIG");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(load_json(m_env).at("k").get<int>(), 3);
}
