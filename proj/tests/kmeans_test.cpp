#include <seisfacies/kmeans.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include <seisfacies/store.hpp>

#include "lloyd_oracle.hpp"
#include "test_util.hpp"

namespace sf = seisfacies;
namespace km = seisfacies::kmeans;
namespace st = seisfacies::store;
using sf::Errc;
using sf::Error;

namespace {

int error_code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.exit_code();
  }
  return 0;
}

// Explicit, reproducible starting point: the first k rows as centroids.
km::Centroids first_rows(const st::FeatureMatrix& m, int k) {
  km::Centroids c;
  c.k = k;
  c.dims = m.n_cols();
  c.values.resize(static_cast<std::size_t>(k) * c.dims);
  for (int j = 0; j < k; ++j) {
    for (int d = 0; d < c.dims; ++d) {
      c.values[static_cast<std::size_t>(j) * c.dims + d] = m.columns[d][j];
    }
  }
  return c;
}

st::ColumnStats identity_stats(int d) {
  st::ColumnStats s;
  s.mean.assign(d, 0.0);
  s.stddev.assign(d, 1.0);
  s.constant.assign(d, false);
  return s;
}

// Three tight, far-apart blobs; returns the blob id per row.
st::FeatureMatrix blobs_matrix(int per_blob, int d, std::uint64_t seed,
                               std::vector<int>* blob_of) {
  std::mt19937_64 rng(seed);
  st::FeatureMatrix m;
  m.n_rows = 3 * per_blob;
  m.columns.assign(d, std::vector<float>(m.n_rows));
  for (int c = 0; c < d; ++c) m.column_names.push_back("f" + std::to_string(c));
  blob_of->resize(m.n_rows);
  for (std::int64_t r = 0; r < m.n_rows; ++r) {
    const int blob = static_cast<int>(r % 3);
    (*blob_of)[r] = blob;
    for (int c = 0; c < d; ++c) {
      m.columns[c][r] = static_cast<float>(1000.0 * blob +
                                           testutil::uniform01(rng) - 0.5);
    }
  }
  return m;
}

}  // namespace

TEST(SquaredDistance, WorkedExamplesAndOracle) {
  const std::vector<double> a{0.0, 0.0};
  const std::vector<double> b{3.0, 4.0};
  EXPECT_EQ(km::squared_distance(a, b), 25.0);
  EXPECT_EQ(km::squared_distance(a, a), 0.0);

  std::mt19937_64 rng(5);
  std::vector<double> x(9), y(9);
  for (int i = 0; i < 9; ++i) {
    x[i] = testutil::uniform01(rng) * 10.0 - 5.0;
    y[i] = testutil::uniform01(rng) * 10.0 - 5.0;
  }
  double want = 0.0;
  for (int i = 0; i < 9; ++i) want += (x[i] - y[i]) * (x[i] - y[i]);
  EXPECT_EQ(km::squared_distance(x, y), want);

  const std::vector<double> short_vec{1.0};
  EXPECT_EQ(error_code_of([&] { km::squared_distance(a, short_vec); }),
            static_cast<int>(Errc::dimension_mismatch));
}

TEST(AssignRow, TieBreaksToLowestClusterIndex) {
  km::Centroids c;
  c.k = 3;
  c.dims = 1;
  c.values = {0.0, 2.0, 2.0};  // row 1.0 is equidistant from clusters 0 and 1
  const double row_mid = 1.0;
  double d2 = -1.0;
  EXPECT_EQ(km::assign_row(&row_mid, c, &d2), 0);
  EXPECT_EQ(d2, 1.0);

  const double row_two = 2.0;  // exact on clusters 1 and 2: lowest wins
  EXPECT_EQ(km::assign_row(&row_two, c, &d2), 1);
  EXPECT_EQ(d2, 0.0);
}

TEST(InitMethod, NamesRoundTrip) {
  EXPECT_STREQ(km::init_method_name(km::InitMethod::kmeanspp), "kmeanspp");
  EXPECT_STREQ(km::init_method_name(km::InitMethod::random), "random");
  EXPECT_EQ(km::parse_init_method("kmeanspp"), km::InitMethod::kmeanspp);
  EXPECT_EQ(km::parse_init_method("random"), km::InitMethod::random);
  EXPECT_EQ(error_code_of([&] { km::parse_init_method("fancy"); }),
            static_cast<int>(Errc::invalid_spec));
}

TEST(Fit, SameSeedGivesBitwiseIdenticalModels) {
  const st::FeatureMatrix m = testutil::make_uniform_matrix(300, 5, 61);
  for (km::InitMethod init : {km::InitMethod::kmeanspp, km::InitMethod::random}) {
    km::KMeansConfig cfg;
    cfg.k = 4;
    cfg.seed = 9;
    cfg.init = init;
    std::vector<std::uint8_t> la, lb;
    const km::KMeansModel a = km::fit(m, cfg, 1, 0, &la);
    const km::KMeansModel b = km::fit(m, cfg, 1, 0, &lb);
    ASSERT_EQ(a.centroids.values, b.centroids.values);
    ASSERT_EQ(a.objective_history, b.objective_history);
    ASSERT_EQ(la, lb);

    cfg.seed = 10;
    const km::KMeansModel c = km::fit(m, cfg, 1, 0, nullptr);
    EXPECT_NE(a.centroids.values, c.centroids.values)
        << km::init_method_name(init);
  }
}

TEST(Fit, KEqualToDistinctRowsDrivesObjectiveToZero) {
  // Five distinct rows, k = 5: every row becomes its own centroid.
  st::FeatureMatrix m = testutil::make_uniform_matrix(5, 3, 67);
  for (km::InitMethod init : {km::InitMethod::kmeanspp, km::InitMethod::random}) {
    km::KMeansConfig cfg;
    cfg.k = 5;
    cfg.tol = 0.0;
    cfg.seed = 3;
    cfg.init = init;
    std::vector<std::uint8_t> labels;
    const km::KMeansModel model = km::fit(m, cfg, 1, 0, &labels);
    EXPECT_TRUE(model.converged);
    EXPECT_EQ(model.objective(), 0.0) << km::init_method_name(init);
    std::set<int> used(labels.begin(), labels.end());
    EXPECT_EQ(used.size(), 5u);
    // Each centroid coincides with the row it owns.
    for (std::int64_t r = 0; r < 5; ++r) {
      const double* c = model.centroids.row(labels[r]);
      for (int d = 0; d < 3; ++d) {
        ASSERT_EQ(c[d], static_cast<double>(m.columns[d][r]));
      }
    }
  }
}

TEST(Fit, DuplicateRowsCannotSeedMoreClustersThanDistinctValues) {
  st::FeatureMatrix m;
  m.n_rows = 10;
  m.column_names = {"f0", "f1"};
  m.columns = {std::vector<float>(10, 1.5f), std::vector<float>(10, -2.0f)};
  for (km::InitMethod init : {km::InitMethod::kmeanspp, km::InitMethod::random}) {
    km::KMeansConfig cfg;
    cfg.k = 2;
    cfg.init = init;
    EXPECT_EQ(error_code_of([&] { km::fit(m, cfg); }),
              static_cast<int>(Errc::too_few_distinct_rows))
        << km::init_method_name(init);
  }
}

TEST(Fit, ConfigValidation) {
  const st::FeatureMatrix m = testutil::make_uniform_matrix(10, 2, 71);
  km::KMeansConfig cfg;
  cfg.k = 0;
  EXPECT_EQ(error_code_of([&] { km::fit(m, cfg); }),
            static_cast<int>(Errc::invalid_spec));
  cfg.k = 256;
  EXPECT_EQ(error_code_of([&] { km::fit(m, cfg); }),
            static_cast<int>(Errc::invalid_spec));
  cfg.k = 11;  // more clusters than rows
  EXPECT_EQ(error_code_of([&] { km::fit(m, cfg); }),
            static_cast<int>(Errc::too_few_distinct_rows));
  cfg.k = 2;
  cfg.max_iters = 0;
  EXPECT_EQ(error_code_of([&] { km::fit(m, cfg); }),
            static_cast<int>(Errc::invalid_spec));
  cfg.max_iters = 10;
  cfg.tol = -1.0;
  EXPECT_EQ(error_code_of([&] { km::fit(m, cfg); }),
            static_cast<int>(Errc::invalid_spec));

  st::FeatureMatrix empty;
  km::KMeansConfig ok;
  ok.k = 1;
  EXPECT_EQ(error_code_of([&] { km::fit(empty, ok); }),
            static_cast<int>(Errc::empty_matrix));
}

TEST(Fit, KmeansppSeparatesWellSeparatedBlobs) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::vector<int> blob_of;
    const st::FeatureMatrix m = blobs_matrix(40, 3, 1000 + seed, &blob_of);
    km::KMeansConfig cfg;
    cfg.k = 3;
    cfg.seed = seed;
    cfg.init = km::InitMethod::kmeanspp;
    std::vector<std::uint8_t> labels;
    km::fit(m, cfg, 1, 0, &labels);
    // Rows of one blob share a label and the three blobs use three labels.
    int label_of_blob[3] = {-1, -1, -1};
    for (std::int64_t r = 0; r < m.n_rows; ++r) {
      int& expect = label_of_blob[blob_of[r]];
      if (expect < 0) expect = labels[r];
      ASSERT_EQ(labels[r], expect) << "seed " << seed << " row " << r;
    }
    const std::set<int> used(label_of_blob, label_of_blob + 3);
    ASSERT_EQ(used.size(), 3u) << "seed " << seed;
  }
}

TEST(Fit, MatchesDenseLloydOracleBitwise) {
  // Same starting centroids, same tie and stop rules: the single-chunk
  // engine and the dense reference must agree exactly, not approximately.
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    for (int k : {2, 5, 8}) {
      const st::FeatureMatrix m = testutil::make_uniform_matrix(200, 2, seed);
      const km::Centroids init = first_rows(m, k);
      km::KMeansConfig cfg;
      cfg.k = k;
      cfg.tol = 1e-6;
      cfg.max_iters = 100;
      std::vector<std::uint8_t> labels;
      const km::KMeansModel model = km::fit(m, cfg, init, 1, 0, &labels);

      const lloyd_oracle::Result want = lloyd_oracle::run(
          testutil::row_major(m), m.n_rows, m.n_cols(), init.values, k,
          cfg.tol, cfg.max_iters);

      ASSERT_EQ(model.iterations_run, want.iterations) << seed << " " << k;
      ASSERT_EQ(model.converged, want.converged);
      ASSERT_EQ(model.distance_evals, want.distance_evals);
      ASSERT_EQ(labels, want.labels);
      ASSERT_EQ(model.objective_history, want.e_history);
      ASSERT_EQ(model.centroid_history.size(), want.centroid_history.size());
      for (std::size_t t = 0; t < want.centroid_history.size(); ++t) {
        ASSERT_EQ(model.centroid_history[t], want.centroid_history[t]) << t;
      }
    }
  }
}

TEST(Fit, DistanceEvalsAreExactlyRowsTimesKTimesIterations) {
  const st::FeatureMatrix m = testutil::make_uniform_matrix(137, 4, 73);
  km::KMeansConfig cfg;
  cfg.k = 6;
  cfg.seed = 1;
  const km::KMeansModel model = km::fit(m, cfg);
  EXPECT_EQ(model.distance_evals,
            static_cast<std::int64_t>(137) * 6 * model.iterations_run);
}

TEST(Fit, ChunkingDoesNotChangeTheFit) {
  const st::FeatureMatrix m = testutil::make_uniform_matrix(101, 3, 79);
  const km::Centroids init = first_rows(m, 4);
  km::KMeansConfig cfg;
  cfg.k = 4;
  cfg.tol = 1e-6;

  std::vector<std::uint8_t> base_labels;
  const km::KMeansModel base = km::fit(m, cfg, init, 1, 0, &base_labels);
  for (std::int64_t chunk_rows : {1, 7, 101}) {
    std::vector<std::uint8_t> labels;
    const km::KMeansModel got = km::fit(m, cfg, init, 1, chunk_rows, &labels);
    ASSERT_EQ(got.iterations_run, base.iterations_run) << chunk_rows;
    ASSERT_EQ(labels, base_labels) << chunk_rows;
    ASSERT_EQ(got.centroid_history.size(), base.centroid_history.size());
    for (std::size_t t = 0; t < base.centroid_history.size(); ++t) {
      const auto& a = base.centroid_history[t];
      const auto& b = got.centroid_history[t];
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double tol = 1e-12 * std::max(std::fabs(a[i]), std::fabs(b[i]));
        ASSERT_NEAR(a[i], b[i], tol) << chunk_rows << " it " << t;
      }
    }
  }
}

TEST(Fit, WorkerCountDoesNotChangeBits) {
  const st::FeatureMatrix m = testutil::make_uniform_matrix(500, 4, 83);
  const km::Centroids init = first_rows(m, 5);
  km::KMeansConfig cfg;
  cfg.k = 5;
  std::vector<std::uint8_t> l1, l4;
  const km::KMeansModel a = km::fit(m, cfg, init, 1, 57, &l1);
  const km::KMeansModel b = km::fit(m, cfg, init, 4, 57, &l4);
  EXPECT_EQ(a.centroids.values, b.centroids.values);
  EXPECT_EQ(a.objective_history, b.objective_history);
  EXPECT_EQ(l1, l4);
  ASSERT_EQ(a.centroid_history.size(), b.centroid_history.size());
  for (std::size_t t = 0; t < a.centroid_history.size(); ++t) {
    ASSERT_EQ(a.centroid_history[t], b.centroid_history[t]) << t;
  }
}

TEST(Fit, ObjectiveIsMonotoneNonIncreasing) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const st::FeatureMatrix m = testutil::make_uniform_matrix(400, 3, seed);
    km::KMeansConfig cfg;
    cfg.k = 7;
    cfg.seed = seed;
    cfg.tol = 0.0;
    cfg.max_iters = 60;
    const km::KMeansModel model = km::fit(m, cfg);
    for (std::size_t t = 1; t < model.objective_history.size(); ++t) {
      const double prev = model.objective_history[t - 1];
      const double cur = model.objective_history[t];
      ASSERT_LE(cur, prev + 1e-9 * std::max(1.0, prev)) << "seed " << seed;
    }
  }
}

TEST(Fit, RowOrderDoesNotChangeObjectiveHistory) {
  const st::FeatureMatrix m = testutil::make_uniform_matrix(150, 3, 89);
  st::FeatureMatrix rev = m;
  for (int c = 0; c < 3; ++c) {
    std::reverse(rev.columns[c].begin(), rev.columns[c].end());
  }
  const km::Centroids init = first_rows(m, 4);
  km::KMeansConfig cfg;
  cfg.k = 4;
  cfg.tol = 1e-6;
  const km::KMeansModel a = km::fit(m, cfg, init, 1, 0, nullptr);
  const km::KMeansModel b = km::fit(rev, cfg, init, 1, 0, nullptr);
  ASSERT_EQ(a.objective_history.size(), b.objective_history.size());
  for (std::size_t t = 0; t < a.objective_history.size(); ++t) {
    const double tol =
        1e-9 * std::max(a.objective_history[t], b.objective_history[t]);
    ASSERT_NEAR(a.objective_history[t], b.objective_history[t], tol) << t;
  }
}

TEST(Fit, EmptyClusterIsReseededFromFarthestRow) {
  // All data sits near the origin; centroid 1 starts far away, captures
  // nothing, and must be reseeded with the row farthest from centroid 0.
  st::FeatureMatrix m = testutil::make_uniform_matrix(50, 2, 97);
  km::Centroids init;
  init.k = 2;
  init.dims = 2;
  init.values = {0.5, 0.5, 1e6, 1e6};
  km::KMeansConfig cfg;
  cfg.k = 2;
  cfg.max_iters = 1;
  cfg.tol = 0.0;
  const km::KMeansModel model = km::fit(m, cfg, init, 1, 0, nullptr);

  ASSERT_FALSE(model.repairs.empty());
  EXPECT_EQ(model.repairs[0].iteration, 1);
  EXPECT_EQ(model.repairs[0].cluster, 1);

  std::int64_t want_row = 0;
  double want_d = -1.0;
  for (std::int64_t r = 0; r < 50; ++r) {
    const double dx = m.columns[0][r] - 0.5;
    const double dy = m.columns[1][r] - 0.5;
    const double d = dx * dx + dy * dy;
    if (d > want_d) {
      want_d = d;
      want_row = r;
    }
  }
  EXPECT_EQ(model.repairs[0].row, want_row);
  EXPECT_EQ(model.centroids.row(1)[0],
            static_cast<double>(m.columns[0][want_row]));
  EXPECT_EQ(model.centroids.row(1)[1],
            static_cast<double>(m.columns[1][want_row]));
}

TEST(Fit, KEqualsOneConvergesToColumnMeansImmediately) {
  const st::FeatureMatrix m = testutil::make_uniform_matrix(321, 3, 101);
  km::KMeansConfig cfg;
  cfg.k = 1;
  cfg.tol = 0.0;
  const km::KMeansModel model = km::fit(m, cfg);
  EXPECT_TRUE(model.converged);
  EXPECT_LE(model.iterations_run, 2);
  for (int c = 0; c < 3; ++c) {
    double sum = 0.0;
    for (float v : m.columns[c]) sum += v;
    EXPECT_EQ(model.centroids.row(0)[c], sum / 321.0);
  }
}

TEST(Fit, StoreAndMatrixSourcesAgreeBitwise) {
  testutil::TempDir tmp;
  const st::FeatureMatrix m = testutil::make_uniform_matrix(160, 4, 103);
  st::write_store(m, identity_stats(4), tmp.path() / "s", 160);
  const st::StoreManifest man = st::open_store(tmp.path() / "s");

  const km::Centroids init = first_rows(m, 3);
  km::KMeansConfig cfg;
  cfg.k = 3;
  std::vector<std::uint8_t> from_store, from_matrix;
  const km::KMeansModel a = km::fit(man, cfg, init, 1, &from_store);
  const km::KMeansModel b = km::fit(m, cfg, init, 1, 0, &from_matrix);
  EXPECT_EQ(a.centroids.values, b.centroids.values);
  EXPECT_EQ(a.objective_history, b.objective_history);
  EXPECT_EQ(from_store, from_matrix);
  EXPECT_EQ(a.attribute_names, b.attribute_names);
}

TEST(Predict, FixedPointLabelsMatchTraining) {
  testutil::TempDir tmp;
  const st::FeatureMatrix m = testutil::make_uniform_matrix(250, 3, 107);
  st::write_store(m, identity_stats(3), tmp.path() / "s", 64);
  const st::StoreManifest man = st::open_store(tmp.path() / "s");

  km::KMeansConfig cfg;
  cfg.k = 4;
  cfg.tol = 0.0;
  cfg.max_iters = 500;
  cfg.seed = 2;
  std::vector<std::uint8_t> train_labels;
  const km::KMeansModel model = km::fit(man, cfg, 1, &train_labels);
  ASSERT_TRUE(model.converged);

  const std::vector<std::uint8_t> once = km::predict(man, model, 1);
  const std::vector<std::uint8_t> twice = km::predict(man, model, 3);
  EXPECT_EQ(once, train_labels);
  EXPECT_EQ(once, twice);
}

TEST(Predict, DimensionMismatchIsRejected) {
  testutil::TempDir tmp;
  const st::FeatureMatrix m = testutil::make_uniform_matrix(40, 2, 109);
  st::write_store(m, identity_stats(2), tmp.path() / "s", 40);
  const st::StoreManifest man = st::open_store(tmp.path() / "s");

  km::KMeansModel model;
  model.centroids.k = 2;
  model.centroids.dims = 3;
  model.centroids.values.assign(6, 0.0);
  EXPECT_EQ(error_code_of([&] { km::predict(man, model); }),
            static_cast<int>(Errc::dimension_mismatch));
}

TEST(Model, SaveLoadRoundTripIsExact) {
  testutil::TempDir tmp;
  const st::FeatureMatrix m = testutil::make_uniform_matrix(90, 4, 113);
  km::KMeansConfig cfg;
  cfg.k = 3;
  cfg.seed = 11;
  cfg.tol = 1e-5;
  cfg.max_iters = 77;
  cfg.init = km::InitMethod::random;
  const km::KMeansModel model = km::fit(m, cfg);

  const auto path = tmp.path() / "model.json";
  km::save_model(model, path);
  const km::KMeansModel back = km::load_model(path);

  EXPECT_EQ(back.centroids.k, model.centroids.k);
  EXPECT_EQ(back.centroids.dims, model.centroids.dims);
  EXPECT_EQ(back.centroids.values, model.centroids.values);  // bit-exact f64
  EXPECT_EQ(back.objective_history, model.objective_history);
  EXPECT_EQ(back.iterations_run, model.iterations_run);
  EXPECT_EQ(back.converged, model.converged);
  EXPECT_EQ(back.distance_evals, model.distance_evals);
  EXPECT_EQ(back.n_rows, model.n_rows);
  EXPECT_EQ(back.attribute_names, model.attribute_names);
  EXPECT_EQ(back.config.k, cfg.k);
  EXPECT_EQ(back.config.max_iters, cfg.max_iters);
  EXPECT_EQ(back.config.tol, cfg.tol);
  EXPECT_EQ(back.config.seed, cfg.seed);
  EXPECT_EQ(back.config.init, cfg.init);
}

TEST(Model, LoadRejectsMissingAndFutureVersions) {
  testutil::TempDir tmp;
  EXPECT_EQ(error_code_of([&] { km::load_model(tmp.path() / "nope.json"); }),
            static_cast<int>(Errc::io_error));

  const st::FeatureMatrix m = testutil::make_uniform_matrix(30, 2, 127);
  km::KMeansConfig cfg;
  cfg.k = 2;
  const km::KMeansModel model = km::fit(m, cfg);
  const auto path = tmp.path() / "model.json";
  km::save_model(model, path);
  std::string text = testutil::read_file_text(path);
  const std::string needle = "\"format_version\": 1";
  const auto pos = text.find(needle);
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, needle.size(), "\"format_version\": 7");
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
  }
  EXPECT_EQ(error_code_of([&] { km::load_model(path); }),
            static_cast<int>(Errc::version_mismatch));
}
