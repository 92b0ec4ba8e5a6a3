#pragma once

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "seisfacies/attributes.hpp"
#include "seisfacies/errors.hpp"
#include "seisfacies/geometry.hpp"

// Chunked columnar feature store. On disk a store is a directory holding a
// JSON `manifest` plus `chunk_%06d.bin` files. Each chunk file is
// column-major: all rows of column 0, then column 1, and so on, as
// little-endian 32-bit floats, with a CRC-32 recorded in the manifest.
namespace seisfacies::store {

inline constexpr int kManifestVersion = 1;
inline constexpr std::int64_t kDefaultChunkRows = 1'048'576;

struct FeatureMatrix {
  std::int64_t n_rows = 0;
  std::vector<std::string> column_names;
  std::vector<std::vector<float>> columns;
  Geometry geometry;  // all-zero when the matrix is not volume-derived
  double dt_s = 0.0;

  int n_cols() const { return static_cast<int>(columns.size()); }
};

struct ColumnStats {
  std::vector<double> mean;
  std::vector<double> stddev;  // population (divisor n)
  std::vector<bool> constant;

  int n_cols() const { return static_cast<int>(mean.size()); }
};

struct ChunkInfo {
  std::int64_t first_row = 0;
  std::int64_t n_rows = 0;
  std::uint64_t byte_length = 0;
  std::uint32_t crc32 = 0;
};

struct StoreManifest {
  int format_version = kManifestVersion;
  Geometry geometry;
  double dt_s = 0.0;
  std::vector<std::string> attribute_names;
  std::int64_t chunk_rows = 0;
  std::int64_t n_rows = 0;
  std::vector<ChunkInfo> chunks;
  ColumnStats stats;
  std::filesystem::path root;  // where the store lives; not serialized

  int n_cols() const { return static_cast<int>(attribute_names.size()); }
  int n_chunks() const { return static_cast<int>(chunks.size()); }
};

// One chunk of rows, columnar like the parent store.
struct Chunk {
  std::int64_t first_row = 0;
  std::int64_t n_rows = 0;
  std::vector<std::vector<float>> columns;
};

// Reorders feature volumes into the row-id layout. Planes are stored with
// the sample axis fastest, which is exactly the row-id order, so each plane
// becomes a column directly.
inline FeatureMatrix flatten(attributes::FeatureVolumeSet&& features) {
  const std::int64_t rows = features.geometry.size();
  if (!features.geometry.valid()) {
    raise(Errc::geometry_mismatch, "feature volumes have empty geometry");
  }
  FeatureMatrix m;
  m.n_rows = rows;
  m.geometry = features.geometry;
  m.dt_s = features.dt_s;
  m.columns.reserve(attributes::kAttributeCount);
  for (int a = 0; a < attributes::kAttributeCount; ++a) {
    if (static_cast<std::int64_t>(features.planes[a].size()) != rows) {
      raise(Errc::geometry_mismatch,
            std::string("plane ") + attributes::kAttributeNames[a] + " holds " +
                std::to_string(features.planes[a].size()) + " values, expected " +
                std::to_string(rows));
    }
    m.column_names.emplace_back(attributes::kAttributeNames[a]);
    m.columns.push_back(std::move(features.planes[a]));
  }
  return m;
}

inline FeatureMatrix flatten(const attributes::FeatureVolumeSet& features) {
  attributes::FeatureVolumeSet copy = features;
  return flatten(std::move(copy));
}

// Streaming per-column mean/variance (Welford). Rows are always folded in
// row-id order, so the result does not depend on how the data was chunked.
class ZScoreAccumulator {
 public:
  explicit ZScoreAccumulator(int n_cols)
      : count_(0), mean_(n_cols, 0.0), m2_(n_cols, 0.0) {}

  void add_row(std::span<const float> row) {
    if (static_cast<int>(row.size()) != static_cast<int>(mean_.size())) {
      raise(Errc::stats_mismatch, "row width does not match accumulator");
    }
    ++count_;
    for (std::size_t c = 0; c < mean_.size(); ++c) {
      const double x = row[c];
      const double delta = x - mean_[c];
      mean_[c] += delta / static_cast<double>(count_);
      m2_[c] += delta * (x - mean_[c]);
    }
  }

  void add_chunk(const Chunk& chunk) {
    std::vector<float> row(chunk.columns.size());
    for (std::int64_t r = 0; r < chunk.n_rows; ++r) {
      for (std::size_t c = 0; c < chunk.columns.size(); ++c) {
        row[c] = chunk.columns[c][r];
      }
      add_row(row);
    }
  }

  std::int64_t count() const { return count_; }

  ColumnStats finish() const {
    if (count_ == 0) raise(Errc::empty_matrix, "no rows accumulated");
    ColumnStats s;
    s.mean = mean_;
    s.stddev.resize(mean_.size());
    s.constant.resize(mean_.size());
    for (std::size_t c = 0; c < mean_.size(); ++c) {
      s.stddev[c] = std::sqrt(std::max(0.0, m2_[c] / count_));
      const double eps = 1e-12 * std::max(1.0, std::fabs(mean_[c]));
      s.constant[c] = s.stddev[c] < eps;
    }
    return s;
  }

 private:
  std::int64_t count_;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

inline ColumnStats zscore_fit(const FeatureMatrix& m) {
  if (m.n_rows < 2 || m.n_cols() == 0) {
    raise(Errc::empty_matrix,
          "need at least 2 rows to fit column statistics, have " +
              std::to_string(m.n_rows));
  }
  ZScoreAccumulator acc(m.n_cols());
  std::vector<float> row(m.n_cols());
  for (std::int64_t r = 0; r < m.n_rows; ++r) {
    for (int c = 0; c < m.n_cols(); ++c) row[c] = m.columns[c][r];
    acc.add_row(row);
  }
  return acc.finish();
}

// x' = (x - mean) / std per column; constant columns collapse to zero.
inline void zscore_apply(FeatureMatrix& m, const ColumnStats& stats) {
  if (stats.n_cols() != m.n_cols()) {
    raise(Errc::stats_mismatch,
          "stats describe " + std::to_string(stats.n_cols()) +
              " columns, matrix has " + std::to_string(m.n_cols()));
  }
  for (int c = 0; c < m.n_cols(); ++c) {
    auto& col = m.columns[c];
    if (stats.constant[c]) {
      std::fill(col.begin(), col.end(), 0.0f);
      continue;
    }
    const double mean = stats.mean[c];
    const double inv = 1.0 / stats.stddev[c];
    for (auto& v : col) {
      v = static_cast<float>((static_cast<double>(v) - mean) * inv);
    }
  }
}

namespace detail {

inline std::string chunk_file_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "chunk_%06d.bin", index);
  return buf;
}

inline void put_le32(unsigned char* p, std::uint32_t v) {
  p[0] = static_cast<unsigned char>(v & 0xFF);
  p[1] = static_cast<unsigned char>((v >> 8) & 0xFF);
  p[2] = static_cast<unsigned char>((v >> 16) & 0xFF);
  p[3] = static_cast<unsigned char>((v >> 24) & 0xFF);
}

inline std::uint32_t get_le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint32_t crc32_of(std::span<const unsigned char> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  crc = ::crc32(crc, bytes.data(), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

inline std::string crc_hex(std::uint32_t crc) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "0x%08x", crc);
  return buf;
}

inline std::uint32_t parse_crc_hex(const std::string& s) {
  return static_cast<std::uint32_t>(std::stoul(s, nullptr, 16));
}

}  // namespace detail

inline std::filesystem::path manifest_path(const std::filesystem::path& dir) {
  return dir / "manifest";
}

inline StoreManifest write_store(const FeatureMatrix& m,
                                 const ColumnStats& stats,
                                 const std::filesystem::path& dir,
                                 std::int64_t chunk_rows = kDefaultChunkRows) {
  if (m.n_rows == 0 || m.n_cols() == 0) {
    raise(Errc::empty_matrix, "refusing to write an empty store");
  }
  if (stats.n_cols() != m.n_cols()) {
    raise(Errc::stats_mismatch, "stats do not match matrix columns");
  }
  if (chunk_rows < 1) {
    raise(Errc::invalid_spec, "chunk_rows must be at least 1");
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) raise(Errc::io_error, "cannot create " + dir.string());

  StoreManifest man;
  man.geometry = m.geometry;
  man.dt_s = m.dt_s;
  man.attribute_names = m.column_names;
  man.chunk_rows = chunk_rows;
  man.n_rows = m.n_rows;
  man.stats = stats;
  man.root = dir;

  const int cols = m.n_cols();
  std::vector<unsigned char> bytes;
  for (std::int64_t first = 0; first < m.n_rows; first += chunk_rows) {
    const std::int64_t rows = std::min(chunk_rows, m.n_rows - first);
    bytes.resize(static_cast<std::size_t>(rows) * cols * 4);
    std::size_t off = 0;
    for (int c = 0; c < cols; ++c) {
      for (std::int64_t r = 0; r < rows; ++r) {
        detail::put_le32(bytes.data() + off,
                         std::bit_cast<std::uint32_t>(m.columns[c][first + r]));
        off += 4;
      }
    }
    ChunkInfo info;
    info.first_row = first;
    info.n_rows = rows;
    info.byte_length = bytes.size();
    info.crc32 = detail::crc32_of(bytes);

    const std::filesystem::path file =
        dir / detail::chunk_file_name(man.n_chunks());
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) raise(Errc::io_error, "cannot create " + file.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    if (!out) raise(Errc::io_error, "write failed for " + file.string());
    man.chunks.push_back(info);
  }

  nlohmann::json j;
  j["format_version"] = man.format_version;
  j["geometry"] = {{"n_inline", man.geometry.n_inline},
                   {"n_crossline", man.geometry.n_crossline},
                   {"n_sample", man.geometry.n_sample}};
  j["dt_s"] = man.dt_s;
  j["attributes"] = man.attribute_names;
  j["chunk_rows"] = man.chunk_rows;
  j["n_rows"] = man.n_rows;
  nlohmann::json chunks = nlohmann::json::array();
  for (const auto& c : man.chunks) {
    chunks.push_back({{"first_row", c.first_row},
                      {"n_rows", c.n_rows},
                      {"bytes", c.byte_length},
                      {"crc32", detail::crc_hex(c.crc32)}});
  }
  j["chunks"] = std::move(chunks);
  j["column_stats"] = {{"mean", man.stats.mean},
                       {"std", man.stats.stddev},
                       {"constant", man.stats.constant}};

  std::ofstream out(manifest_path(dir), std::ios::trunc);
  if (!out) raise(Errc::io_error, "cannot create manifest in " + dir.string());
  out << j.dump(2) << "\n";
  if (!out) raise(Errc::io_error, "manifest write failed");
  return man;
}

inline StoreManifest open_store(const std::filesystem::path& dir) {
  std::ifstream in(manifest_path(dir));
  if (!in) raise(Errc::io_error, "cannot open manifest in " + dir.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::io_error, "manifest is not valid JSON: " + std::string(e.what()));
  }

  StoreManifest man;
  try {
    man.format_version = j.at("format_version").get<int>();
    if (man.format_version != kManifestVersion) {
      raise(Errc::version_mismatch,
            "manifest version " + std::to_string(man.format_version) +
                ", expected " + std::to_string(kManifestVersion));
    }
    const auto& g = j.at("geometry");
    man.geometry.n_inline = g.at("n_inline").get<int>();
    man.geometry.n_crossline = g.at("n_crossline").get<int>();
    man.geometry.n_sample = g.at("n_sample").get<int>();
    man.dt_s = j.value("dt_s", 0.0);
    man.attribute_names = j.at("attributes").get<std::vector<std::string>>();
    man.chunk_rows = j.at("chunk_rows").get<std::int64_t>();
    man.n_rows = j.at("n_rows").get<std::int64_t>();
    for (const auto& c : j.at("chunks")) {
      ChunkInfo info;
      info.first_row = c.at("first_row").get<std::int64_t>();
      info.n_rows = c.at("n_rows").get<std::int64_t>();
      info.byte_length = c.at("bytes").get<std::uint64_t>();
      info.crc32 = detail::parse_crc_hex(c.at("crc32").get<std::string>());
      man.chunks.push_back(info);
    }
    man.stats.mean = j.at("column_stats").at("mean").get<std::vector<double>>();
    man.stats.stddev = j.at("column_stats").at("std").get<std::vector<double>>();
    man.stats.constant =
        j.at("column_stats").at("constant").get<std::vector<bool>>();
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::io_error, "manifest field missing or malformed: " +
                              std::string(e.what()));
  }
  man.root = dir;

  std::int64_t total = 0;
  for (const auto& c : man.chunks) {
    if (c.first_row != total) {
      raise(Errc::io_error, "manifest chunk rows are not contiguous");
    }
    total += c.n_rows;
  }
  if (total != man.n_rows) {
    raise(Errc::io_error, "manifest chunk rows do not sum to n_rows");
  }
  return man;
}

// Loads and checksum-verifies one chunk. Memory use is bounded by the chunk
// size regardless of how large the store is.
inline Chunk read_chunk(const StoreManifest& man, int chunk_index) {
  if (chunk_index < 0 || chunk_index >= man.n_chunks()) {
    raise(Errc::chunk_out_of_range,
          "chunk " + std::to_string(chunk_index) + " of " +
              std::to_string(man.n_chunks()));
  }
  const ChunkInfo& info = man.chunks[chunk_index];
  const std::filesystem::path file =
      man.root / detail::chunk_file_name(chunk_index);
  std::ifstream in(file, std::ios::binary);
  if (!in) raise(Errc::io_error, "cannot open " + file.string());

  std::vector<unsigned char> bytes(info.byte_length);
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
    raise(Errc::checksum_mismatch,
          "chunk " + std::to_string(chunk_index) + " is shorter than recorded");
  }
  const std::uint32_t crc = detail::crc32_of(bytes);
  if (crc != info.crc32) {
    raise(Errc::checksum_mismatch,
          "chunk " + std::to_string(chunk_index) + " checksum " +
              detail::crc_hex(crc) + " != manifest " +
              detail::crc_hex(info.crc32));
  }

  const int cols = man.n_cols();
  Chunk chunk;
  chunk.first_row = info.first_row;
  chunk.n_rows = info.n_rows;
  chunk.columns.resize(cols);
  std::size_t off = 0;
  for (int c = 0; c < cols; ++c) {
    chunk.columns[c].resize(info.n_rows);
    for (std::int64_t r = 0; r < info.n_rows; ++r) {
      chunk.columns[c][r] =
          std::bit_cast<float>(detail::get_le32(bytes.data() + off));
      off += 4;
    }
  }
  return chunk;
}

}  // namespace seisfacies::store
