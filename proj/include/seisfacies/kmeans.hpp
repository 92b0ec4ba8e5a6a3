#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "seisfacies/errors.hpp"
#include "seisfacies/parallel.hpp"
#include "seisfacies/store.hpp"

// Out-of-core Lloyd's K-means over a chunked feature store. Each iteration
// maps chunks to partial statistics (in parallel) and reduces them in chunk
// order, so results are bitwise identical for any worker count.
namespace seisfacies::kmeans {

inline constexpr int kModelVersion = 1;
inline constexpr std::int64_t kInitSubsampleRows = 262'144;
inline constexpr int kMaxClusters = 255;  // labels are stored as uint8

enum class InitMethod { kmeanspp, random };

inline const char* init_method_name(InitMethod m) {
  return m == InitMethod::kmeanspp ? "kmeanspp" : "random";
}

inline InitMethod parse_init_method(const std::string& s) {
  if (s == "kmeanspp") return InitMethod::kmeanspp;
  if (s == "random") return InitMethod::random;
  raise(Errc::invalid_spec, "unknown init method '" + s + "'");
}

struct KMeansConfig {
  int k = 8;
  int max_iters = 300;
  double tol = 1e-4;
  std::uint64_t seed = 0;
  InitMethod init = InitMethod::kmeanspp;
};

struct Centroids {
  int k = 0;
  int dims = 0;
  std::vector<double> values;  // k * dims, row-major

  double* row(int c) { return values.data() + static_cast<std::size_t>(c) * dims; }
  const double* row(int c) const {
    return values.data() + static_cast<std::size_t>(c) * dims;
  }
};

// A row promoted to centroid when a cluster loses all members.
struct RepairEvent {
  int iteration = 0;
  int cluster = 0;
  std::int64_t row = 0;
};

struct KMeansModel {
  Centroids centroids;
  std::vector<double> objective_history;  // one entry per assignment pass
  // Post-update centroids of every iteration (k*dims each); in-memory
  // diagnostic for equivalence testing, not serialized.
  std::vector<std::vector<double>> centroid_history;
  int iterations_run = 0;
  bool converged = false;
  KMeansConfig config;
  std::int64_t distance_evals = 0;  // row-to-centroid evaluations in fit
  std::int64_t n_rows = 0;
  std::vector<RepairEvent> repairs;
  std::vector<std::string> attribute_names;

  double objective() const {
    return objective_history.empty() ? 0.0 : objective_history.back();
  }
};

namespace detail {

// Lemire's unbiased bounded integer; avoids std::uniform_int_distribution
// whose output is implementation-defined.
inline std::uint64_t bounded_uint64(std::mt19937_64& rng, std::uint64_t bound) {
  unsigned __int128 m = static_cast<unsigned __int128>(rng()) * bound;
  auto lo = static_cast<std::uint64_t>(m);
  if (lo < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (lo < threshold) {
      m = static_cast<unsigned __int128>(rng()) * bound;
      lo = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bitwise_equal(const std::vector<double>& a,
                          const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i]))
      return false;
  }
  return true;
}

struct RepairCandidate {
  double dist2 = 0.0;
  std::int64_t row = 0;
  std::vector<double> features;
};

// Farther first; ties resolved toward the lower row id.
inline bool candidate_before(const RepairCandidate& a, const RepairCandidate& b) {
  if (a.dist2 != b.dist2) return a.dist2 > b.dist2;
  return a.row < b.row;
}

struct ChunkPartial {
  std::vector<double> sums;          // k * dims
  std::vector<std::int64_t> counts;  // k
  double objective = 0.0;
  std::vector<RepairCandidate> candidates;  // at most k, sorted
};

// Abstracts "a sequence of chunks" so fit can run off a store on disk or an
// in-memory matrix with identical arithmetic.
class ChunkSource {
 public:
  virtual ~ChunkSource() = default;
  virtual std::int64_t n_rows() const = 0;
  virtual int dims() const = 0;
  virtual int n_chunks() const = 0;
  virtual store::Chunk load(int index) const = 0;
  virtual std::vector<std::string> column_names() const = 0;
};

class StoreSource final : public ChunkSource {
 public:
  explicit StoreSource(const store::StoreManifest& man) : man_(man) {}
  std::int64_t n_rows() const override { return man_.n_rows; }
  int dims() const override { return man_.n_cols(); }
  int n_chunks() const override { return man_.n_chunks(); }
  store::Chunk load(int index) const override {
    return store::read_chunk(man_, index);
  }
  std::vector<std::string> column_names() const override {
    return man_.attribute_names;
  }

 private:
  const store::StoreManifest& man_;
};

class MatrixSource final : public ChunkSource {
 public:
  MatrixSource(const store::FeatureMatrix& m, std::int64_t chunk_rows)
      : m_(m), chunk_rows_(chunk_rows > 0 ? chunk_rows : std::max<std::int64_t>(m.n_rows, 1)) {}
  std::int64_t n_rows() const override { return m_.n_rows; }
  int dims() const override { return m_.n_cols(); }
  int n_chunks() const override {
    return static_cast<int>((m_.n_rows + chunk_rows_ - 1) / chunk_rows_);
  }
  store::Chunk load(int index) const override {
    store::Chunk c;
    c.first_row = static_cast<std::int64_t>(index) * chunk_rows_;
    c.n_rows = std::min(chunk_rows_, m_.n_rows - c.first_row);
    c.columns.resize(m_.n_cols());
    for (int col = 0; col < m_.n_cols(); ++col) {
      c.columns[col].assign(m_.columns[col].begin() + c.first_row,
                            m_.columns[col].begin() + c.first_row + c.n_rows);
    }
    return c;
  }
  std::vector<std::string> column_names() const override {
    return m_.column_names;
  }

 private:
  const store::FeatureMatrix& m_;
  std::int64_t chunk_rows_;
};

// Gathers the feature rows at `rows` (sorted ascending) in one pass.
inline std::vector<std::vector<double>> gather_rows(
    const ChunkSource& src, const std::vector<std::int64_t>& rows) {
  std::vector<std::vector<double>> out(rows.size());
  std::size_t next = 0;
  for (int ci = 0; ci < src.n_chunks() && next < rows.size(); ++ci) {
    const store::Chunk chunk = src.load(ci);
    const std::int64_t end = chunk.first_row + chunk.n_rows;
    while (next < rows.size() && rows[next] < end) {
      const std::int64_t local = rows[next] - chunk.first_row;
      auto& dst = out[next];
      dst.resize(chunk.columns.size());
      for (std::size_t c = 0; c < chunk.columns.size(); ++c) {
        dst[c] = chunk.columns[c][local];
      }
      ++next;
    }
  }
  return out;
}

// Draws min(n, limit) distinct row ids (Floyd's algorithm), returned sorted.
inline std::vector<std::int64_t> sample_row_ids(std::int64_t n,
                                                std::int64_t limit,
                                                std::mt19937_64& rng) {
  std::vector<std::int64_t> ids;
  if (n <= limit) {
    ids.resize(n);
    for (std::int64_t i = 0; i < n; ++i) ids[i] = i;
    return ids;
  }
  std::unordered_set<std::int64_t> chosen;
  chosen.reserve(static_cast<std::size_t>(limit) * 2);
  for (std::int64_t j = n - limit; j < n; ++j) {
    const auto t = static_cast<std::int64_t>(
        bounded_uint64(rng, static_cast<std::uint64_t>(j) + 1));
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  ids.assign(chosen.begin(), chosen.end());
  std::sort(ids.begin(), ids.end());
  return ids;
}

inline double squared_distance_raw(const double* a, const double* b, int dims) {
  double acc = 0.0;
  for (int i = 0; i < dims; ++i) {
    const double diff = a[i] - b[i];
    acc += diff * diff;
  }
  return acc;
}

}  // namespace detail

inline double squared_distance(std::span<const double> a,
                               std::span<const double> b) {
  if (a.size() != b.size()) {
    raise(Errc::dimension_mismatch,
          "vectors of size " + std::to_string(a.size()) + " and " +
              std::to_string(b.size()));
  }
  return detail::squared_distance_raw(a.data(), b.data(),
                                      static_cast<int>(a.size()));
}

// Nearest centroid with ties resolved toward the lowest cluster index.
inline int assign_row(const double* row, const Centroids& c, double* best_d2) {
  int best = 0;
  double bd = detail::squared_distance_raw(row, c.row(0), c.dims);
  for (int j = 1; j < c.k; ++j) {
    const double d = detail::squared_distance_raw(row, c.row(j), c.dims);
    if (d < bd) {
      bd = d;
      best = j;
    }
  }
  if (best_d2) *best_d2 = bd;
  return best;
}

namespace detail {

inline void validate_config(const KMeansConfig& cfg, std::int64_t n_rows,
                            int dims) {
  if (cfg.k < 1 || cfg.k > kMaxClusters) {
    raise(Errc::invalid_spec,
          "k must be in [1, " + std::to_string(kMaxClusters) + "], got " +
              std::to_string(cfg.k));
  }
  if (cfg.max_iters < 1) raise(Errc::invalid_spec, "max_iters must be >= 1");
  if (!(cfg.tol >= 0.0)) raise(Errc::invalid_spec, "tol must be >= 0");
  if (n_rows < 1 || dims < 1) raise(Errc::empty_matrix, "store holds no data");
  if (n_rows < cfg.k) {
    raise(Errc::too_few_distinct_rows,
          std::to_string(n_rows) + " rows cannot seed " +
              std::to_string(cfg.k) + " clusters");
  }
}

inline Centroids init_centroids(const ChunkSource& src,
                                const KMeansConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  const std::vector<std::int64_t> ids =
      sample_row_ids(src.n_rows(), kInitSubsampleRows, rng);
  const std::vector<std::vector<double>> sample = gather_rows(src, ids);
  const int dims = src.dims();
  const auto m = static_cast<std::int64_t>(sample.size());

  Centroids c;
  c.k = cfg.k;
  c.dims = dims;
  c.values.resize(static_cast<std::size_t>(cfg.k) * dims);

  if (cfg.init == InitMethod::random) {
    std::vector<std::int64_t> order(m);
    for (std::int64_t i = 0; i < m; ++i) order[i] = i;
    for (std::int64_t i = m - 1; i > 0; --i) {
      const auto j = static_cast<std::int64_t>(
          bounded_uint64(rng, static_cast<std::uint64_t>(i) + 1));
      std::swap(order[i], order[j]);
    }
    int placed = 0;
    for (std::int64_t i = 0; i < m && placed < cfg.k; ++i) {
      const auto& cand = sample[order[i]];
      bool duplicate = false;
      for (int j = 0; j < placed && !duplicate; ++j) {
        duplicate = std::equal(cand.begin(), cand.end(), c.row(j));
      }
      if (duplicate) continue;
      std::copy(cand.begin(), cand.end(), c.row(placed));
      ++placed;
    }
    if (placed < cfg.k) {
      raise(Errc::too_few_distinct_rows,
            "found " + std::to_string(placed) + " distinct rows, need " +
                std::to_string(cfg.k));
    }
    return c;
  }

  // k-means++: first seed uniform, then D^2-weighted draws.
  const auto first = static_cast<std::int64_t>(
      bounded_uint64(rng, static_cast<std::uint64_t>(m)));
  std::copy(sample[first].begin(), sample[first].end(), c.row(0));

  std::vector<double> d2(m);
  for (std::int64_t i = 0; i < m; ++i) {
    d2[i] = squared_distance_raw(sample[i].data(), c.row(0), dims);
  }
  for (int placed = 1; placed < cfg.k; ++placed) {
    double total = 0.0;
    for (std::int64_t i = 0; i < m; ++i) total += d2[i];
    if (!(total > 0.0)) {
      raise(Errc::too_few_distinct_rows,
            "only " + std::to_string(placed) +
                " distinct rows available for " + std::to_string(cfg.k) +
                " clusters");
    }
    const double target = uniform01(rng) * total;
    double cumulative = 0.0;
    std::int64_t pick = -1;
    std::int64_t last_positive = -1;
    for (std::int64_t i = 0; i < m; ++i) {
      if (d2[i] > 0.0) last_positive = i;
      cumulative += d2[i];
      if (cumulative >= target && d2[i] > 0.0) {
        pick = i;
        break;
      }
    }
    // Rounding can leave the running sum just short of the target; fall
    // back to the last row that is distinct from every chosen centroid.
    if (pick < 0) pick = last_positive;
    std::copy(sample[pick].begin(), sample[pick].end(), c.row(placed));
    for (std::int64_t i = 0; i < m; ++i) {
      const double d =
          squared_distance_raw(sample[i].data(), c.row(placed), dims);
      d2[i] = std::min(d2[i], d);
    }
  }
  return c;
}

// Map step: assigns every row of one chunk, accumulating partial sums,
// counts, objective, and repair candidates in 64-bit floats.
inline ChunkPartial assign_chunk(const store::Chunk& chunk,
                                 const Centroids& cent,
                                 std::uint8_t* labels_out) {
  const int k = cent.k;
  const int dims = cent.dims;
  ChunkPartial part;
  part.sums.assign(static_cast<std::size_t>(k) * dims, 0.0);
  part.counts.assign(k, 0);

  std::vector<double> row(dims);
  for (std::int64_t r = 0; r < chunk.n_rows; ++r) {
    for (int c = 0; c < dims; ++c) row[c] = chunk.columns[c][r];
    double bd = 0.0;
    const int label = assign_row(row.data(), cent, &bd);
    labels_out[r] = static_cast<std::uint8_t>(label);
    double* s = part.sums.data() + static_cast<std::size_t>(label) * dims;
    for (int c = 0; c < dims; ++c) s[c] += row[c];
    ++part.counts[label];
    part.objective += bd;

    const bool room = static_cast<int>(part.candidates.size()) < k;
    if (room || bd > part.candidates.back().dist2) {
      RepairCandidate cand{bd, chunk.first_row + r, row};
      auto pos = std::upper_bound(part.candidates.begin(),
                                  part.candidates.end(), cand,
                                  candidate_before);
      part.candidates.insert(pos, std::move(cand));
      if (static_cast<int>(part.candidates.size()) > k) {
        part.candidates.pop_back();
      }
    }
  }
  return part;
}

// Reduce step: folds partials in chunk order, recomputes centroids, and
// reseeds empty clusters from the globally farthest rows.
inline Centroids reduce_partials(const std::vector<ChunkPartial>& parts,
                                 const Centroids& previous, int iteration,
                                 double* objective_out,
                                 std::vector<RepairEvent>* repairs) {
  const int k = previous.k;
  const int dims = previous.dims;
  std::vector<double> sums(static_cast<std::size_t>(k) * dims, 0.0);
  std::vector<std::int64_t> counts(k, 0);
  double objective = 0.0;
  std::vector<RepairCandidate> pool;
  for (const auto& p : parts) {
    for (std::size_t i = 0; i < sums.size(); ++i) sums[i] += p.sums[i];
    for (int c = 0; c < k; ++c) counts[c] += p.counts[c];
    objective += p.objective;
    pool.insert(pool.end(), p.candidates.begin(), p.candidates.end());
  }
  std::sort(pool.begin(), pool.end(), candidate_before);

  Centroids next;
  next.k = k;
  next.dims = dims;
  next.values.resize(sums.size());
  std::size_t next_candidate = 0;
  for (int c = 0; c < k; ++c) {
    if (counts[c] > 0) {
      for (int d = 0; d < dims; ++d) {
        next.values[static_cast<std::size_t>(c) * dims + d] =
            sums[static_cast<std::size_t>(c) * dims + d] /
            static_cast<double>(counts[c]);
      }
    } else if (next_candidate < pool.size()) {
      const RepairCandidate& cand = pool[next_candidate++];
      std::copy(cand.features.begin(), cand.features.end(), next.row(c));
      if (repairs) repairs->push_back({iteration, c, cand.row});
    } else {
      // No candidate left (k exceeds total rows in flight); keep in place.
      std::copy(previous.row(c), previous.row(c) + dims, next.row(c));
    }
  }
  *objective_out = objective;
  return next;
}

inline KMeansModel fit_from_source(const ChunkSource& src,
                                   const KMeansConfig& cfg,
                                   Centroids initial, int workers,
                                   std::vector<std::uint8_t>* labels_out) {
  validate_config(cfg, src.n_rows(), src.dims());
  if (initial.k != cfg.k || initial.dims != src.dims()) {
    raise(Errc::dimension_mismatch,
          "initial centroids are " + std::to_string(initial.k) + "x" +
              std::to_string(initial.dims) + ", need " +
              std::to_string(cfg.k) + "x" + std::to_string(src.dims()));
  }

  KMeansModel model;
  model.config = cfg;
  model.n_rows = src.n_rows();
  model.attribute_names = src.column_names();

  const int n_chunks = src.n_chunks();
  std::vector<std::uint8_t> labels(src.n_rows());
  Centroids centroids = std::move(initial);
  constexpr double kTiny = std::numeric_limits<double>::min();

  for (int t = 1; t <= cfg.max_iters; ++t) {
    std::vector<ChunkPartial> parts(n_chunks);
    parallel_for(n_chunks, workers, [&](int, std::int64_t ci) {
      const store::Chunk chunk = src.load(static_cast<int>(ci));
      parts[ci] =
          assign_chunk(chunk, centroids, labels.data() + chunk.first_row);
    });
    model.distance_evals +=
        model.n_rows * static_cast<std::int64_t>(cfg.k);

    double objective = 0.0;
    Centroids next = reduce_partials(parts, centroids, t, &objective,
                                     &model.repairs);
    const bool fixed = bitwise_equal(next.values, centroids.values);
    centroids = std::move(next);
    model.objective_history.push_back(objective);
    model.centroid_history.push_back(centroids.values);
    model.iterations_run = t;
    if (fixed) {
      model.converged = true;
      break;
    }
    if (t >= 2) {
      const double prev = model.objective_history[t - 2];
      const double rel = std::fabs(prev - objective) / std::max(prev, kTiny);
      if (rel <= cfg.tol) {
        model.converged = true;
        break;
      }
    }
  }
  model.centroids = std::move(centroids);
  if (labels_out) *labels_out = std::move(labels);
  return model;
}

}  // namespace detail

inline KMeansModel fit(const store::StoreManifest& man, const KMeansConfig& cfg,
                       int workers = 1,
                       std::vector<std::uint8_t>* labels_out = nullptr) {
  detail::StoreSource src(man);
  detail::validate_config(cfg, src.n_rows(), src.dims());
  Centroids initial = detail::init_centroids(src, cfg);
  return detail::fit_from_source(src, cfg, std::move(initial), workers,
                                 labels_out);
}

inline KMeansModel fit(const store::StoreManifest& man, const KMeansConfig& cfg,
                       Centroids initial, int workers = 1,
                       std::vector<std::uint8_t>* labels_out = nullptr) {
  detail::StoreSource src(man);
  return detail::fit_from_source(src, cfg, std::move(initial), workers,
                                 labels_out);
}

inline KMeansModel fit(const store::FeatureMatrix& m, const KMeansConfig& cfg,
                       int workers = 1, std::int64_t chunk_rows = 0,
                       std::vector<std::uint8_t>* labels_out = nullptr) {
  detail::MatrixSource src(m, chunk_rows);
  detail::validate_config(cfg, src.n_rows(), src.dims());
  Centroids initial = detail::init_centroids(src, cfg);
  return detail::fit_from_source(src, cfg, std::move(initial), workers,
                                 labels_out);
}

inline KMeansModel fit(const store::FeatureMatrix& m, const KMeansConfig& cfg,
                       Centroids initial, int workers = 1,
                       std::int64_t chunk_rows = 0,
                       std::vector<std::uint8_t>* labels_out = nullptr) {
  detail::MatrixSource src(m, chunk_rows);
  return detail::fit_from_source(src, cfg, std::move(initial), workers,
                                 labels_out);
}

inline std::vector<std::uint8_t> predict(const store::StoreManifest& man,
                                         const KMeansModel& model,
                                         int workers = 1) {
  if (man.n_cols() != model.centroids.dims) {
    raise(Errc::dimension_mismatch,
          "store has " + std::to_string(man.n_cols()) +
              " features, model expects " +
              std::to_string(model.centroids.dims));
  }
  std::vector<std::uint8_t> labels(man.n_rows);
  parallel_for(man.n_chunks(), workers, [&](int, std::int64_t ci) {
    const store::Chunk chunk = store::read_chunk(man, static_cast<int>(ci));
    std::vector<double> row(model.centroids.dims);
    std::uint8_t* out = labels.data() + chunk.first_row;
    for (std::int64_t r = 0; r < chunk.n_rows; ++r) {
      for (int c = 0; c < model.centroids.dims; ++c) {
        row[c] = chunk.columns[c][r];
      }
      out[r] = static_cast<std::uint8_t>(
          assign_row(row.data(), model.centroids, nullptr));
    }
  });
  return labels;
}

inline void save_model(const KMeansModel& model,
                       const std::filesystem::path& path) {
  nlohmann::json j;
  j["format_version"] = kModelVersion;
  j["k"] = model.centroids.k;
  j["dims"] = model.centroids.dims;
  j["attributes"] = model.attribute_names;
  nlohmann::json cents = nlohmann::json::array();
  for (int c = 0; c < model.centroids.k; ++c) {
    cents.push_back(std::vector<double>(
        model.centroids.row(c), model.centroids.row(c) + model.centroids.dims));
  }
  j["centroids"] = std::move(cents);
  j["objective_history"] = model.objective_history;
  j["iterations_run"] = model.iterations_run;
  j["converged"] = model.converged;
  j["distance_evals"] = model.distance_evals;
  j["n_rows"] = model.n_rows;
  j["config"] = {{"k", model.config.k},
                 {"max_iters", model.config.max_iters},
                 {"tol", model.config.tol},
                 {"seed", model.config.seed},
                 {"init", init_method_name(model.config.init)}};
  nlohmann::json repairs = nlohmann::json::array();
  for (const auto& r : model.repairs) {
    repairs.push_back({{"iteration", r.iteration},
                       {"cluster", r.cluster},
                       {"row", r.row}});
  }
  j["repairs"] = std::move(repairs);

  std::ofstream out(path, std::ios::trunc);
  if (!out) raise(Errc::io_error, "cannot create " + path.string());
  out << j.dump(2) << "\n";
  if (!out) raise(Errc::io_error, "model write failed for " + path.string());
}

inline KMeansModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::io_error, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::io_error, "model is not valid JSON: " + std::string(e.what()));
  }
  KMeansModel model;
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kModelVersion) {
      raise(Errc::version_mismatch,
            "model version " + std::to_string(version) + ", expected " +
                std::to_string(kModelVersion));
    }
    model.centroids.k = j.at("k").get<int>();
    model.centroids.dims = j.at("dims").get<int>();
    model.attribute_names =
        j.value("attributes", std::vector<std::string>{});
    model.centroids.values.reserve(
        static_cast<std::size_t>(model.centroids.k) * model.centroids.dims);
    for (const auto& row : j.at("centroids")) {
      const auto vals = row.get<std::vector<double>>();
      if (static_cast<int>(vals.size()) != model.centroids.dims) {
        raise(Errc::dimension_mismatch, "centroid row width mismatch in " +
                                            path.string());
      }
      model.centroids.values.insert(model.centroids.values.end(), vals.begin(),
                                    vals.end());
    }
    if (static_cast<int>(model.centroids.values.size()) !=
        model.centroids.k * model.centroids.dims) {
      raise(Errc::dimension_mismatch, "centroid count mismatch in " +
                                          path.string());
    }
    model.objective_history =
        j.at("objective_history").get<std::vector<double>>();
    model.iterations_run = j.at("iterations_run").get<int>();
    model.converged = j.at("converged").get<bool>();
    model.distance_evals = j.at("distance_evals").get<std::int64_t>();
    model.n_rows = j.at("n_rows").get<std::int64_t>();
    const auto& cfg = j.at("config");
    model.config.k = cfg.at("k").get<int>();
    model.config.max_iters = cfg.at("max_iters").get<int>();
    model.config.tol = cfg.at("tol").get<double>();
    model.config.seed = cfg.at("seed").get<std::uint64_t>();
    model.config.init = parse_init_method(cfg.at("init").get<std::string>());
    for (const auto& r : j.value("repairs", nlohmann::json::array())) {
      model.repairs.push_back({r.at("iteration").get<int>(),
                               r.at("cluster").get<int>(),
                               r.at("row").get<std::int64_t>()});
    }
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::io_error,
          "model field missing or malformed: " + std::string(e.what()));
  }
  return model;
}

}  // namespace seisfacies::kmeans
