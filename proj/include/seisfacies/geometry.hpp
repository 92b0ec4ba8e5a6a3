#pragma once

#include <cstdint>

#include "seisfacies/errors.hpp"

namespace seisfacies {

// Axis order is (inline, crossline, sample) with the sample axis fastest.
struct Geometry {
  int n_inline = 0;
  int n_crossline = 0;
  int n_sample = 0;

  std::int64_t size() const {
    return static_cast<std::int64_t>(n_inline) * n_crossline * n_sample;
  }
  bool valid() const { return n_inline > 0 && n_crossline > 0 && n_sample > 0; }
  bool operator==(const Geometry&) const = default;
};

struct CubeIndex {
  int il = 0;
  int xl = 0;
  int s = 0;
};

// Row ids enumerate cube samples as ((il * n_crossline) + xl) * n_sample + s.
// The same mapping orders feature-store rows and label streams.
inline std::int64_t row_id(const Geometry& g, int il, int xl, int s) {
  return (static_cast<std::int64_t>(il) * g.n_crossline + xl) * g.n_sample + s;
}

inline CubeIndex cube_index(const Geometry& g, std::int64_t row) {
  if (row < 0 || row >= g.size()) {
    raise(Errc::index_out_of_range,
          "row id " + std::to_string(row) + " outside volume of " +
              std::to_string(g.size()) + " samples");
  }
  CubeIndex c;
  c.s = static_cast<int>(row % g.n_sample);
  const std::int64_t trace = row / g.n_sample;
  c.xl = static_cast<int>(trace % g.n_crossline);
  c.il = static_cast<int>(trace / g.n_crossline);
  return c;
}

}  // namespace seisfacies
