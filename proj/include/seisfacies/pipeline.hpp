#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "seisfacies/attributes.hpp"
#include "seisfacies/errors.hpp"
#include "seisfacies/kmeans.hpp"
#include "seisfacies/labels.hpp"
#include "seisfacies/segy.hpp"
#include "seisfacies/store.hpp"

// End-to-end stages behind the command-line tool. Each stage returns a
// summary for reporting instead of printing, so they stay testable.
namespace seisfacies::pipeline {

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

struct IngestSummary {
  Geometry geometry;
  std::int64_t n_rows = 0;
  int n_features = 0;
  int n_chunks = 0;
  std::uint64_t store_bytes = 0;
  double seconds = 0.0;
};

// SEG-Y volume -> nine attributes -> z-scored chunked store on disk.
inline IngestSummary run_ingest(const std::filesystem::path& segy_path,
                                const std::filesystem::path& store_dir,
                                int window_samples =
                                    attributes::kDefaultWindowSamples,
                                std::int64_t chunk_rows =
                                    store::kDefaultChunkRows,
                                int workers = 1) {
  detail::Stopwatch timer;
  segy::SeismicVolume volume = segy::read_volume(segy_path);
  attributes::FeatureVolumeSet features =
      attributes::compute_all(volume, window_samples, workers);
  volume.data.clear();
  volume.data.shrink_to_fit();

  store::FeatureMatrix matrix = store::flatten(std::move(features));
  const store::ColumnStats stats = store::zscore_fit(matrix);
  store::zscore_apply(matrix, stats);
  const store::StoreManifest man =
      store::write_store(matrix, stats, store_dir, chunk_rows);

  IngestSummary s;
  s.geometry = man.geometry;
  s.n_rows = man.n_rows;
  s.n_features = man.n_cols();
  s.n_chunks = man.n_chunks();
  for (const auto& c : man.chunks) s.store_bytes += c.byte_length;
  s.seconds = timer.seconds();
  return s;
}

struct TrainSummary {
  kmeans::KMeansModel model;
  double seconds = 0.0;
};

inline TrainSummary run_train(const std::filesystem::path& store_dir,
                              const std::filesystem::path& model_path,
                              const kmeans::KMeansConfig& config,
                              int workers = 1) {
  detail::Stopwatch timer;
  const store::StoreManifest man = store::open_store(store_dir);
  TrainSummary s;
  s.model = kmeans::fit(man, config, workers);
  kmeans::save_model(s.model, model_path);
  s.seconds = timer.seconds();
  return s;
}

struct PredictSummary {
  Geometry geometry;
  int k = 0;
  std::int64_t n_rows = 0;
  double seconds = 0.0;
  std::vector<std::filesystem::path> images;
};

// Labels every row of the store with the model and writes a label volume,
// plus an optional P6 image per requested section.
inline PredictSummary run_predict(const std::filesystem::path& store_dir,
                                  const std::filesystem::path& model_path,
                                  const std::filesystem::path& labels_path,
                                  int workers = 1,
                                  std::span<const int> slice_inlines = {},
                                  std::span<const int> slice_crosslines = {}) {
  detail::Stopwatch timer;
  const store::StoreManifest man = store::open_store(store_dir);
  const kmeans::KMeansModel model = kmeans::load_model(model_path);
  std::vector<std::uint8_t> flat = kmeans::predict(man, model, workers);
  labels::LabelVolume volume = labels::labels_to_volume(
      std::move(flat), man.geometry, model.centroids.k);
  labels::write_label_volume(volume, labels_path);

  PredictSummary s;
  s.geometry = volume.geometry;
  s.k = volume.k;
  s.n_rows = man.n_rows;

  std::filesystem::path stem = labels_path;
  stem.replace_extension();
  for (int index : slice_inlines) {
    std::filesystem::path img = stem;
    img += "_il" + std::to_string(index) + ".ppm";
    labels::export_slice_image(volume, labels::SliceAxis::inline_axis, index,
                               img);
    s.images.push_back(std::move(img));
  }
  for (int index : slice_crosslines) {
    std::filesystem::path img = stem;
    img += "_xl" + std::to_string(index) + ".ppm";
    labels::export_slice_image(volume, labels::SliceAxis::crossline_axis,
                               index, img);
    s.images.push_back(std::move(img));
  }
  s.seconds = timer.seconds();
  return s;
}

}  // namespace seisfacies::pipeline
