#pragma once

#include <stdexcept>
#include <string>

namespace seisfacies {

// One value per documented failure kind. The numeric value doubles as the
// process exit code of the CLI, so codes must stay distinct and nonzero.
enum class Errc : int {
  // file and parse failures
  io_error = 10,
  unsupported_format_code = 11,
  truncated_header = 12,
  truncated_trace = 13,
  non_rectilinear_geometry = 14,
  invalid_spec = 15,
  corrupt_sample = 16,
  // attribute computation
  trace_too_short = 20,
  window_too_large = 21,
  invalid_window = 22,
  // feature store
  geometry_mismatch = 23,
  empty_matrix = 24,
  stats_mismatch = 25,
  checksum_mismatch = 26,
  chunk_out_of_range = 27,
  // clustering
  dimension_mismatch = 30,
  too_few_distinct_rows = 31,
  // label volumes and images
  count_mismatch = 40,
  label_out_of_range = 41,
  index_out_of_range = 42,
  palette_too_small = 43,
  version_mismatch = 44,
};

inline const char* errc_name(Errc code) {
  switch (code) {
    case Errc::io_error: return "io_error";
    case Errc::unsupported_format_code: return "unsupported_format_code";
    case Errc::truncated_header: return "truncated_header";
    case Errc::truncated_trace: return "truncated_trace";
    case Errc::non_rectilinear_geometry: return "non_rectilinear_geometry";
    case Errc::invalid_spec: return "invalid_spec";
    case Errc::corrupt_sample: return "corrupt_sample";
    case Errc::trace_too_short: return "trace_too_short";
    case Errc::window_too_large: return "window_too_large";
    case Errc::invalid_window: return "invalid_window";
    case Errc::geometry_mismatch: return "geometry_mismatch";
    case Errc::empty_matrix: return "empty_matrix";
    case Errc::stats_mismatch: return "stats_mismatch";
    case Errc::checksum_mismatch: return "checksum_mismatch";
    case Errc::chunk_out_of_range: return "chunk_out_of_range";
    case Errc::dimension_mismatch: return "dimension_mismatch";
    case Errc::too_few_distinct_rows: return "too_few_distinct_rows";
    case Errc::count_mismatch: return "count_mismatch";
    case Errc::label_out_of_range: return "label_out_of_range";
    case Errc::index_out_of_range: return "index_out_of_range";
    case Errc::palette_too_small: return "palette_too_small";
    case Errc::version_mismatch: return "version_mismatch";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }
  int exit_code() const noexcept { return static_cast<int>(code_); }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace seisfacies
