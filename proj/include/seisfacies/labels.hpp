#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "seisfacies/errors.hpp"
#include "seisfacies/geometry.hpp"

// Classified output: a cube of cluster labels plus exporters for a compact
// binary volume format and P6 (binary PPM) section images.
namespace seisfacies::labels {

inline constexpr int kLabelVolumeVersion = 1;
inline constexpr char kLabelVolumeMagic[4] = {'S', 'F', 'L', 'B'};

struct LabelVolume {
  Geometry geometry;
  int k = 0;  // number of clusters the labels refer to
  std::vector<std::uint8_t> values;  // row-id order (sample fastest)

  std::uint8_t at(int il, int xl, int s) const {
    return values[static_cast<std::size_t>(row_id(geometry, il, xl, s))];
  }
};

// Wraps a flat label vector (row-id order) into a volume, verifying that
// every label is a valid cluster index.
inline LabelVolume labels_to_volume(std::vector<std::uint8_t> flat,
                                    const Geometry& geometry, int k) {
  if (!geometry.valid()) {
    raise(Errc::geometry_mismatch, "label volume geometry is empty");
  }
  if (static_cast<std::int64_t>(flat.size()) != geometry.size()) {
    raise(Errc::count_mismatch,
          std::to_string(flat.size()) + " labels for a geometry of " +
              std::to_string(geometry.size()) + " cells");
  }
  if (k < 1 || k > 255) {
    raise(Errc::invalid_spec, "cluster count must be in [1, 255]");
  }
  for (std::size_t i = 0; i < flat.size(); ++i) {
    if (flat[i] >= k) {
      raise(Errc::label_out_of_range,
            "label " + std::to_string(int(flat[i])) + " at row " +
                std::to_string(i) + " exceeds k=" + std::to_string(k));
    }
  }
  LabelVolume v;
  v.geometry = geometry;
  v.k = k;
  v.values = std::move(flat);
  return v;
}

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
};

// Twelve visually distinct colors, one per cluster for k up to 12.
inline constexpr std::array<Rgb, 12> kDefaultPalette = {{
    {230, 25, 75},    // red
    {60, 180, 75},    // green
    {255, 225, 25},   // yellow
    {0, 130, 200},    // blue
    {245, 130, 48},   // orange
    {145, 30, 180},   // purple
    {70, 240, 240},   // cyan
    {240, 50, 230},   // magenta
    {210, 245, 60},   // lime
    {250, 190, 212},  // pink
    {0, 128, 128},    // teal
    {154, 99, 36},    // brown
}};

enum class SliceAxis { inline_axis, crossline_axis };

namespace detail {

inline void put_u32_le(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xFF),
                         static_cast<char>((v >> 8) & 0xFF),
                         static_cast<char>((v >> 16) & 0xFF),
                         static_cast<char>((v >> 24) & 0xFF)};
  out.write(bytes, 4);
}

inline std::uint32_t get_u32_le(std::istream& in) {
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  if (in.gcount() != 4) raise(Errc::io_error, "label volume truncated");
  return static_cast<std::uint32_t>(bytes[0]) |
         (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) |
         (static_cast<std::uint32_t>(bytes[3]) << 24);
}

}  // namespace detail

// Renders one section as a binary PPM. An inline section spans crosslines
// horizontally; a crossline section spans inlines. Samples run downward.
inline void export_slice_image(const LabelVolume& volume, SliceAxis axis,
                               int index, const std::filesystem::path& path,
                               std::span<const Rgb> palette = kDefaultPalette) {
  const Geometry& g = volume.geometry;
  const int limit =
      axis == SliceAxis::inline_axis ? g.n_inline : g.n_crossline;
  if (index < 0 || index >= limit) {
    raise(Errc::index_out_of_range,
          "slice " + std::to_string(index) + " outside [0, " +
              std::to_string(limit) + ")");
  }
  if (static_cast<int>(palette.size()) < volume.k) {
    raise(Errc::palette_too_small,
          "palette holds " + std::to_string(palette.size()) +
              " colors, volume has " + std::to_string(volume.k) +
              " clusters");
  }
  const int width =
      axis == SliceAxis::inline_axis ? g.n_crossline : g.n_inline;
  const int height = g.n_sample;

  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(width) * height * 3);
  std::size_t off = 0;
  for (int s = 0; s < height; ++s) {
    for (int x = 0; x < width; ++x) {
      const std::uint8_t label = axis == SliceAxis::inline_axis
                                     ? volume.at(index, x, s)
                                     : volume.at(x, index, s);
      const Rgb& color = palette[label];
      pixels[off++] = color.r;
      pixels[off++] = color.g;
      pixels[off++] = color.b;
    }
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(Errc::io_error, "cannot create " + path.string());
  out << "P6\n" << width << " " << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()), pixels.size());
  if (!out) raise(Errc::io_error, "image write failed for " + path.string());
}

// Binary layout: magic "SFLB", then five little-endian uint32 fields
// (version, n_inline, n_crossline, n_sample, k), then one byte per cell in
// row-id order.
inline void write_label_volume(const LabelVolume& volume,
                               const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(Errc::io_error, "cannot create " + path.string());
  out.write(kLabelVolumeMagic, 4);
  detail::put_u32_le(out, kLabelVolumeVersion);
  detail::put_u32_le(out, static_cast<std::uint32_t>(volume.geometry.n_inline));
  detail::put_u32_le(out,
                     static_cast<std::uint32_t>(volume.geometry.n_crossline));
  detail::put_u32_le(out, static_cast<std::uint32_t>(volume.geometry.n_sample));
  detail::put_u32_le(out, static_cast<std::uint32_t>(volume.k));
  out.write(reinterpret_cast<const char*>(volume.values.data()),
            volume.values.size());
  if (!out) raise(Errc::io_error, "label volume write failed for " +
                                      path.string());
}

inline LabelVolume read_label_volume(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::io_error, "cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, kLabelVolumeMagic, 4) != 0) {
    raise(Errc::io_error, path.string() + " is not a label volume");
  }
  const std::uint32_t version = detail::get_u32_le(in);
  if (version != kLabelVolumeVersion) {
    raise(Errc::version_mismatch,
          "label volume version " + std::to_string(version) + ", expected " +
              std::to_string(kLabelVolumeVersion));
  }
  LabelVolume v;
  v.geometry.n_inline = static_cast<int>(detail::get_u32_le(in));
  v.geometry.n_crossline = static_cast<int>(detail::get_u32_le(in));
  v.geometry.n_sample = static_cast<int>(detail::get_u32_le(in));
  v.k = static_cast<int>(detail::get_u32_le(in));
  if (!v.geometry.valid() || v.k < 1 || v.k > 255) {
    raise(Errc::io_error, "label volume header is inconsistent");
  }
  v.values.resize(static_cast<std::size_t>(v.geometry.size()));
  in.read(reinterpret_cast<char*>(v.values.data()), v.values.size());
  if (in.gcount() != static_cast<std::streamsize>(v.values.size())) {
    raise(Errc::io_error, "label volume payload truncated");
  }
  for (std::size_t i = 0; i < v.values.size(); ++i) {
    if (v.values[i] >= v.k) {
      raise(Errc::label_out_of_range,
            "stored label " + std::to_string(int(v.values[i])) +
                " exceeds k=" + std::to_string(v.k));
    }
  }
  return v;
}

}  // namespace seisfacies::labels
