#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "seisfacies/errors.hpp"
#include "seisfacies/kmeans.hpp"
#include "seisfacies/store.hpp"

// Scaling harness: times fit() across a cluster-count sweep and a list of
// worker counts, reporting per-cell medians and geometric-mean speedups
// against the smallest worker count.
namespace seisfacies::bench {

struct BenchRecord {
  std::string dataset;
  int k = 0;
  int workers = 0;
  double wall_time_s = 0.0;  // lower median across reps
  int iterations = 0;
  std::int64_t distance_evals = 0;
};

struct BenchConfig {
  int k_min = 5;
  int k_max = 12;
  std::vector<int> worker_counts = {1};
  int reps = 3;
  double tol = 1e-4;
  int max_iters = 300;
  std::uint64_t seed = 0;
  kmeans::InitMethod init = kmeans::InitMethod::kmeanspp;
  std::string dataset_name = "store";
};

struct SpeedupEntry {
  int workers = 0;
  double geomean_speedup = 0.0;
};

inline double geometric_mean(std::span<const double> values) {
  if (values.empty()) raise(Errc::empty_matrix, "geometric mean of nothing");
  double log_sum = 0.0;
  for (double v : values) {
    if (!(v > 0.0)) {
      raise(Errc::invalid_spec, "geometric mean requires positive values");
    }
    log_sum += std::log(v);
  }
  return std::exp(log_sum / static_cast<double>(values.size()));
}

namespace detail {

inline double lower_median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[(v.size() - 1) / 2];
}

}  // namespace detail

inline std::vector<BenchRecord> run_bench(const store::StoreManifest& man,
                                          const BenchConfig& cfg) {
  if (cfg.k_min < 1 || cfg.k_max < cfg.k_min) {
    raise(Errc::invalid_spec, "need 1 <= k_min <= k_max");
  }
  if (cfg.reps < 1) raise(Errc::invalid_spec, "reps must be >= 1");
  if (cfg.worker_counts.empty()) {
    raise(Errc::invalid_spec, "worker count list is empty");
  }
  std::vector<int> workers = cfg.worker_counts;
  std::sort(workers.begin(), workers.end());
  workers.erase(std::unique(workers.begin(), workers.end()), workers.end());
  if (workers.front() < 1) raise(Errc::invalid_spec, "workers must be >= 1");

  std::vector<BenchRecord> records;
  for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
    for (int w : workers) {
      kmeans::KMeansConfig kc;
      kc.k = k;
      kc.max_iters = cfg.max_iters;
      kc.tol = cfg.tol;
      kc.seed = cfg.seed;
      kc.init = cfg.init;

      std::vector<double> times;
      kmeans::KMeansModel last;
      for (int rep = 0; rep < cfg.reps; ++rep) {
        const auto start = std::chrono::steady_clock::now();
        last = kmeans::fit(man, kc, w);
        const auto stop = std::chrono::steady_clock::now();
        times.push_back(
            std::max(1e-9, std::chrono::duration<double>(stop - start).count()));
      }
      BenchRecord rec;
      rec.dataset = cfg.dataset_name;
      rec.k = k;
      rec.workers = w;
      rec.wall_time_s = detail::lower_median(std::move(times));
      rec.iterations = last.iterations_run;
      rec.distance_evals = last.distance_evals;
      records.push_back(std::move(rec));
    }
  }
  return records;
}

// Per worker count: geometric mean over k of t_baseline(k) / t_w(k), where
// the baseline is the smallest worker count present.
inline std::vector<SpeedupEntry> geomean_speedups(
    const std::vector<BenchRecord>& records) {
  if (records.empty()) raise(Errc::empty_matrix, "no benchmark records");
  int baseline = records.front().workers;
  for (const auto& r : records) baseline = std::min(baseline, r.workers);

  std::vector<int> workers;
  for (const auto& r : records) {
    if (std::find(workers.begin(), workers.end(), r.workers) == workers.end()) {
      workers.push_back(r.workers);
    }
  }
  std::sort(workers.begin(), workers.end());

  auto time_of = [&](int k, int w) -> const BenchRecord* {
    for (const auto& r : records) {
      if (r.k == k && r.workers == w) return &r;
    }
    return nullptr;
  };

  std::vector<SpeedupEntry> out;
  for (int w : workers) {
    std::vector<double> ratios;
    for (const auto& r : records) {
      if (r.workers != w) continue;
      const BenchRecord* base = time_of(r.k, baseline);
      if (base) ratios.push_back(base->wall_time_s / r.wall_time_s);
    }
    out.push_back({w, geometric_mean(ratios)});
  }
  return out;
}

inline std::string bench_records_csv(const std::vector<BenchRecord>& records) {
  std::string csv = "dataset,k,workers,wall_time_s,iterations,distance_evals\n";
  char line[256];
  for (const auto& r : records) {
    std::snprintf(line, sizeof(line), "%s,%d,%d,%.9g,%d,%lld\n",
                  r.dataset.c_str(), r.k, r.workers, r.wall_time_s,
                  r.iterations, static_cast<long long>(r.distance_evals));
    csv += line;
  }
  return csv;
}

// Human-readable summary: a k-by-workers grid of median wall times followed
// by the geometric-mean speedup of each worker count over the baseline.
inline std::string speedup_table_text(const std::vector<BenchRecord>& records) {
  if (records.empty()) raise(Errc::empty_matrix, "no benchmark records");
  std::vector<int> ks, workers;
  for (const auto& r : records) {
    if (std::find(ks.begin(), ks.end(), r.k) == ks.end()) ks.push_back(r.k);
    if (std::find(workers.begin(), workers.end(), r.workers) == workers.end()) {
      workers.push_back(r.workers);
    }
  }
  std::sort(ks.begin(), ks.end());
  std::sort(workers.begin(), workers.end());

  char buf[64];
  std::string text = "median wall time (s)\n";
  text += "   k";
  for (int w : workers) {
    std::snprintf(buf, sizeof(buf), "  workers=%-4d", w);
    text += buf;
  }
  text += "\n";
  for (int k : ks) {
    std::snprintf(buf, sizeof(buf), "%4d", k);
    text += buf;
    for (int w : workers) {
      const BenchRecord* found = nullptr;
      for (const auto& r : records) {
        if (r.k == k && r.workers == w) {
          found = &r;
          break;
        }
      }
      if (found) {
        std::snprintf(buf, sizeof(buf), "  %12.6f", found->wall_time_s);
      } else {
        std::snprintf(buf, sizeof(buf), "  %12s", "-");
      }
      text += buf;
    }
    text += "\n";
  }

  const auto speedups = geomean_speedups(records);
  std::snprintf(buf, sizeof(buf), "%d", speedups.front().workers);
  text += std::string("geometric-mean speedup vs workers=") + buf + "\n";
  for (const auto& s : speedups) {
    std::snprintf(buf, sizeof(buf), "  workers=%-4d %8.3fx\n", s.workers,
                  s.geomean_speedup);
    text += buf;
  }
  return text;
}

}  // namespace seisfacies::bench
