#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "seisfacies/errors.hpp"
#include "seisfacies/geometry.hpp"

// SEG-Y rev1 reader/writer for fixed-length big-endian traces, plus a layered
// synthetic volume generator used for desk-scale runs. Only sample format
// codes 1 (4-byte IBM float) and 5 (4-byte IEEE float) are handled.
namespace seisfacies::segy {

inline constexpr int kTextHeaderBytes = 3200;
inline constexpr int kBinaryHeaderBytes = 400;
inline constexpr int kTraceHeaderBytes = 240;

// Rev1 byte positions, 1-based as printed in the standard.
inline constexpr int kBinSampleIntervalPos = 17;   // uint16
inline constexpr int kBinSamplesPerTracePos = 21;  // uint16
inline constexpr int kBinFormatCodePos = 25;       // uint16
inline constexpr int kBinTracesPerEnsemblePos = 13;  // uint16, used as a hint
inline constexpr int kBinExtTextHeadersPos = 305;  // int16
inline constexpr int kTrcSamplesPos = 115;         // uint16
inline constexpr int kTrcScalarCoordPos = 71;      // int16
inline constexpr int kTrcInlinePos = 189;          // int32
inline constexpr int kTrcCrosslinePos = 193;       // int32

struct BinaryHeader {
  int sample_interval_us = 0;
  int samples_per_trace = 0;
  int data_format_code = 0;  // 1 = IBM float, 5 = IEEE float
  std::optional<std::int64_t> trace_count_hint;
  int extended_text_headers = 0;
};

struct TraceHeader {
  int inline_no = 0;
  int crossline_no = 0;
  int samples_in_trace = 0;
  int scalar_coord = 0;
};

struct SeismicVolume {
  Geometry geometry;
  double dt_s = 0.0;
  std::vector<float> data;  // (inline, crossline, sample), sample fastest

  float& at(int il, int xl, int s) { return data[row_id(geometry, il, xl, s)]; }
  float at(int il, int xl, int s) const {
    return data[row_id(geometry, il, xl, s)];
  }
  // One trace is a contiguous run of n_sample values.
  std::span<const float> trace(int il, int xl) const {
    return {data.data() + row_id(geometry, il, xl, 0),
            static_cast<std::size_t>(geometry.n_sample)};
  }
};

struct SynthSpec {
  Geometry geometry;
  int n_layers = 5;
  double wavelet_peak_hz = 30.0;
  double noise_std = 0.0;
  double dt_s = 0.004;
  std::uint64_t seed = 0;
};

namespace detail {

inline std::uint16_t be16(const unsigned char* p) {
  return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
}

inline std::int16_t be16s(const unsigned char* p) {
  return static_cast<std::int16_t>(be16(p));
}

inline std::uint32_t be32(const unsigned char* p) {
  return (static_cast<std::uint32_t>(p[0]) << 24) |
         (static_cast<std::uint32_t>(p[1]) << 16) |
         (static_cast<std::uint32_t>(p[2]) << 8) | p[3];
}

inline std::int32_t be32s(const unsigned char* p) {
  return static_cast<std::int32_t>(be32(p));
}

inline void put_be16(unsigned char* p, std::uint16_t v) {
  p[0] = static_cast<unsigned char>(v >> 8);
  p[1] = static_cast<unsigned char>(v & 0xFF);
}

inline void put_be32(unsigned char* p, std::uint32_t v) {
  p[0] = static_cast<unsigned char>(v >> 24);
  p[1] = static_cast<unsigned char>((v >> 16) & 0xFF);
  p[2] = static_cast<unsigned char>((v >> 8) & 0xFF);
  p[3] = static_cast<unsigned char>(v & 0xFF);
}

}  // namespace detail

// IBM System/360 single precision: sign bit 31, base-16 exponent in bits
// 30-24 (biased by 64), 24-bit fraction in bits 23-0. The raw formula
// sign * (fraction / 2^24) * 16^(exponent - 64) is applied to every bit
// pattern; denormal fractions are not renormalized.
inline double decode_ibm_float(std::uint32_t word) {
  const bool negative = (word >> 31) != 0;
  const int exponent = static_cast<int>((word >> 24) & 0x7F);
  const std::uint32_t fraction = word & 0x00FFFFFFu;
  const double magnitude =
      std::ldexp(static_cast<double>(fraction), 4 * (exponent - 64) - 24);
  return negative ? -magnitude : magnitude;
}

// Round-to-nearest IEEE-to-IBM conversion. Values that fall outside the IBM
// exponent range saturate; the relative round-trip error is below 2^-21.
inline std::uint32_t encode_ibm_float(float value) {
  if (!std::isfinite(value)) {
    raise(Errc::corrupt_sample, "cannot encode non-finite sample as IBM float");
  }
  if (value == 0.0f) return 0;
  const std::uint32_t sign = std::signbit(value) ? 0x80000000u : 0u;
  const double magnitude = std::fabs(static_cast<double>(value));

  int binary_exp = 0;
  std::frexp(magnitude, &binary_exp);
  // Smallest E with magnitude / 16^E in [1/16, 1).
  int hex_exp = static_cast<int>(std::floor((binary_exp + 3) / 4.0));
  double frac = std::ldexp(magnitude, -4 * hex_exp);
  std::uint32_t fraction =
      static_cast<std::uint32_t>(std::lround(frac * 16777216.0));
  if (fraction >= 0x01000000u) {  // rounding carried into 1.0
    fraction >>= 4;
    hex_exp += 1;
  }
  const int biased = hex_exp + 64;
  if (biased < 0) return sign;  // underflows to signed zero
  if (biased > 127) return sign | (127u << 24) | 0x00FFFFFFu;
  return sign | (static_cast<std::uint32_t>(biased) << 24) | fraction;
}

inline BinaryHeader parse_binary_header(std::span<const unsigned char> block) {
  if (block.size() < kBinaryHeaderBytes) {
    raise(Errc::truncated_header,
          "binary header needs 400 bytes, got " + std::to_string(block.size()));
  }
  BinaryHeader h;
  h.sample_interval_us = detail::be16(block.data() + kBinSampleIntervalPos - 1);
  h.samples_per_trace = detail::be16(block.data() + kBinSamplesPerTracePos - 1);
  h.data_format_code = detail::be16(block.data() + kBinFormatCodePos - 1);
  h.extended_text_headers =
      detail::be16s(block.data() + kBinExtTextHeadersPos - 1);
  const int ensemble_traces =
      detail::be16(block.data() + kBinTracesPerEnsemblePos - 1);
  if (ensemble_traces > 0) h.trace_count_hint = ensemble_traces;

  if (h.data_format_code != 1 && h.data_format_code != 5) {
    raise(Errc::unsupported_format_code,
          "sample format code " + std::to_string(h.data_format_code) +
              " (only 1 = IBM float and 5 = IEEE float are readable)");
  }
  if (h.samples_per_trace <= 0) {
    raise(Errc::invalid_spec, "binary header declares no samples per trace");
  }
  if (h.sample_interval_us <= 0) {
    raise(Errc::invalid_spec, "binary header declares no sample interval");
  }
  return h;
}

inline TraceHeader parse_trace_header(std::span<const unsigned char> block) {
  if (block.size() < kTraceHeaderBytes) {
    raise(Errc::truncated_header,
          "trace header needs 240 bytes, got " + std::to_string(block.size()));
  }
  TraceHeader h;
  h.samples_in_trace = detail::be16(block.data() + kTrcSamplesPos - 1);
  h.scalar_coord = detail::be16s(block.data() + kTrcScalarCoordPos - 1);
  h.inline_no = detail::be32s(block.data() + kTrcInlinePos - 1);
  h.crossline_no = detail::be32s(block.data() + kTrcCrosslinePos - 1);
  return h;
}

namespace detail {

struct TraceIndexEntry {
  int inline_no;
  int crossline_no;
  std::int64_t body_offset;  // file position of the first sample word
};

struct FileScan {
  BinaryHeader binary;
  std::vector<TraceIndexEntry> traces;
  int il_min = 0, il_max = 0, xl_min = 0, xl_max = 0;
};

inline FileScan prescan(std::istream& in) {
  FileScan scan;
  std::vector<unsigned char> buf(kTextHeaderBytes);
  in.read(reinterpret_cast<char*>(buf.data()), kTextHeaderBytes);
  if (in.gcount() != kTextHeaderBytes) {
    raise(Errc::truncated_header, "stream shorter than the textual header");
  }
  buf.resize(kBinaryHeaderBytes);
  in.read(reinterpret_cast<char*>(buf.data()), kBinaryHeaderBytes);
  if (in.gcount() != kBinaryHeaderBytes) {
    raise(Errc::truncated_header, "stream shorter than the binary header");
  }
  scan.binary = parse_binary_header(buf);
  if (scan.binary.extended_text_headers < 0) {
    raise(Errc::invalid_spec,
          "variable-count extended textual headers are not supported");
  }
  for (int i = 0; i < scan.binary.extended_text_headers; ++i) {
    in.seekg(kTextHeaderBytes, std::ios::cur);
    if (!in) raise(Errc::truncated_header, "extended textual header missing");
  }

  const std::int64_t body_bytes =
      static_cast<std::int64_t>(scan.binary.samples_per_trace) * 4;
  std::vector<unsigned char> trc(kTraceHeaderBytes);
  while (true) {
    const std::int64_t header_pos = in.tellg();
    in.read(reinterpret_cast<char*>(trc.data()), kTraceHeaderBytes);
    const std::streamsize got = in.gcount();
    if (got == 0) break;  // clean end of file at a record boundary
    if (got < kTraceHeaderBytes) {
      raise(Errc::truncated_trace,
            "trace header truncated at offset " + std::to_string(header_pos));
    }
    const TraceHeader th = parse_trace_header(trc);
    if (th.samples_in_trace != 0 &&
        th.samples_in_trace != scan.binary.samples_per_trace) {
      raise(Errc::non_rectilinear_geometry,
            "trace at offset " + std::to_string(header_pos) + " has " +
                std::to_string(th.samples_in_trace) + " samples, expected " +
                std::to_string(scan.binary.samples_per_trace));
    }
    scan.traces.push_back({th.inline_no, th.crossline_no,
                           header_pos + kTraceHeaderBytes});
    in.seekg(body_bytes, std::ios::cur);
    // Probe one byte so a body that stops short is caught during the scan.
    in.peek();
    if (in.eof()) {
      in.clear();
      in.seekg(0, std::ios::end);
      if (in.tellg() < scan.traces.back().body_offset + body_bytes) {
        raise(Errc::truncated_trace, "trace body truncated at end of stream");
      }
      break;
    }
    if (!in) raise(Errc::truncated_trace, "stream failed mid trace body");
  }
  if (scan.traces.empty()) {
    raise(Errc::non_rectilinear_geometry, "file contains no traces");
  }

  scan.il_min = scan.il_max = scan.traces.front().inline_no;
  scan.xl_min = scan.xl_max = scan.traces.front().crossline_no;
  for (const auto& t : scan.traces) {
    scan.il_min = std::min(scan.il_min, t.inline_no);
    scan.il_max = std::max(scan.il_max, t.inline_no);
    scan.xl_min = std::min(scan.xl_min, t.crossline_no);
    scan.xl_max = std::max(scan.xl_max, t.crossline_no);
  }
  return scan;
}

}  // namespace detail

// Reads a rectilinear volume. The stream is scanned once for geometry, then
// trace bodies are loaded in file order. Every (inline, crossline) cell of
// the inferred grid must be present exactly once.
inline SeismicVolume read_volume(std::istream& in) {
  const detail::FileScan scan = detail::prescan(in);

  SeismicVolume vol;
  vol.geometry.n_inline = scan.il_max - scan.il_min + 1;
  vol.geometry.n_crossline = scan.xl_max - scan.xl_min + 1;
  vol.geometry.n_sample = scan.binary.samples_per_trace;
  vol.dt_s = scan.binary.sample_interval_us * 1e-6;

  const std::int64_t cells =
      static_cast<std::int64_t>(vol.geometry.n_inline) *
      vol.geometry.n_crossline;
  std::vector<char> seen(cells, 0);
  for (const auto& t : scan.traces) {
    const std::int64_t cell =
        static_cast<std::int64_t>(t.inline_no - scan.il_min) *
            vol.geometry.n_crossline +
        (t.crossline_no - scan.xl_min);
    if (seen[cell]) {
      raise(Errc::non_rectilinear_geometry,
            "duplicate trace at inline " + std::to_string(t.inline_no) +
                ", crossline " + std::to_string(t.crossline_no));
    }
    seen[cell] = 1;
  }
  if (static_cast<std::int64_t>(scan.traces.size()) != cells) {
    std::string missing;
    int listed = 0;
    for (std::int64_t c = 0; c < cells && listed < 8; ++c) {
      if (!seen[c]) {
        const int il = scan.il_min + static_cast<int>(c / vol.geometry.n_crossline);
        const int xl = scan.xl_min + static_cast<int>(c % vol.geometry.n_crossline);
        missing += " (" + std::to_string(il) + "," + std::to_string(xl) + ")";
        ++listed;
      }
    }
    raise(Errc::non_rectilinear_geometry,
          std::to_string(cells - static_cast<std::int64_t>(scan.traces.size())) +
              " missing (inline,crossline) cells:" + missing);
  }

  vol.data.resize(vol.geometry.size());
  const int ns = vol.geometry.n_sample;
  std::vector<unsigned char> body(static_cast<std::size_t>(ns) * 4);
  in.clear();
  for (const auto& t : scan.traces) {
    in.seekg(t.body_offset);
    in.read(reinterpret_cast<char*>(body.data()), body.size());
    if (in.gcount() != static_cast<std::streamsize>(body.size())) {
      raise(Errc::truncated_trace,
            "trace body truncated at offset " + std::to_string(t.body_offset));
    }
    float* out = vol.data.data() + row_id(vol.geometry, t.inline_no - scan.il_min,
                                          t.crossline_no - scan.xl_min, 0);
    for (int s = 0; s < ns; ++s) {
      const std::uint32_t word = detail::be32(body.data() + 4 * s);
      float value;
      if (scan.binary.data_format_code == 1) {
        value = static_cast<float>(decode_ibm_float(word));
      } else {
        value = std::bit_cast<float>(word);
      }
      if (!std::isfinite(value)) {
        raise(Errc::corrupt_sample,
              "non-finite sample at inline " + std::to_string(t.inline_no) +
                  ", crossline " + std::to_string(t.crossline_no) +
                  ", sample " + std::to_string(s));
      }
      out[s] = value;
    }
  }
  return vol;
}

inline SeismicVolume read_volume(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::io_error, "cannot open " + path);
  return read_volume(in);
}

// Minimal writer, primarily for round-trip tests and synthetic inputs.
// Inline/crossline numbers are written 1-based.
inline void write_volume(const SeismicVolume& vol, std::ostream& out,
                         int data_format_code = 5) {
  if (data_format_code != 1 && data_format_code != 5) {
    raise(Errc::unsupported_format_code,
          "writer supports format codes 1 and 5, got " +
              std::to_string(data_format_code));
  }
  if (!vol.geometry.valid() || vol.dt_s <= 0) {
    raise(Errc::invalid_spec, "volume has empty geometry or no sample rate");
  }
  const double interval_us = std::round(vol.dt_s * 1e6);
  if (interval_us < 1 || interval_us > 65535) {
    raise(Errc::invalid_spec, "sample interval does not fit a rev1 header");
  }
  if (vol.geometry.n_sample > 65535) {
    raise(Errc::invalid_spec, "trace length does not fit a rev1 header");
  }

  std::string text(kTextHeaderBytes, ' ');
  const std::string banner = "C01 SEISFACIES VOLUME";
  std::copy(banner.begin(), banner.end(), text.begin());
  out.write(text.data(), text.size());

  std::vector<unsigned char> bin(kBinaryHeaderBytes, 0);
  detail::put_be16(bin.data() + kBinSampleIntervalPos - 1,
                   static_cast<std::uint16_t>(interval_us));
  detail::put_be16(bin.data() + kBinSamplesPerTracePos - 1,
                   static_cast<std::uint16_t>(vol.geometry.n_sample));
  detail::put_be16(bin.data() + kBinFormatCodePos - 1,
                   static_cast<std::uint16_t>(data_format_code));
  out.write(reinterpret_cast<const char*>(bin.data()), bin.size());

  std::vector<unsigned char> trc(kTraceHeaderBytes);
  std::vector<unsigned char> body(static_cast<std::size_t>(vol.geometry.n_sample) * 4);
  for (int il = 0; il < vol.geometry.n_inline; ++il) {
    for (int xl = 0; xl < vol.geometry.n_crossline; ++xl) {
      std::fill(trc.begin(), trc.end(), 0);
      detail::put_be16(trc.data() + kTrcSamplesPos - 1,
                       static_cast<std::uint16_t>(vol.geometry.n_sample));
      detail::put_be16(trc.data() + kTrcScalarCoordPos - 1, 1);
      detail::put_be32(trc.data() + kTrcInlinePos - 1,
                       static_cast<std::uint32_t>(il + 1));
      detail::put_be32(trc.data() + kTrcCrosslinePos - 1,
                       static_cast<std::uint32_t>(xl + 1));
      out.write(reinterpret_cast<const char*>(trc.data()), trc.size());

      const std::span<const float> trace = vol.trace(il, xl);
      for (int s = 0; s < vol.geometry.n_sample; ++s) {
        std::uint32_t word;
        if (data_format_code == 1) {
          word = encode_ibm_float(trace[s]);
        } else {
          word = std::bit_cast<std::uint32_t>(trace[s]);
        }
        detail::put_be32(body.data() + 4 * s, word);
      }
      out.write(reinterpret_cast<const char*>(body.data()), body.size());
    }
  }
  if (!out) raise(Errc::io_error, "write failed");
}

inline void write_volume(const SeismicVolume& vol, const std::string& path,
                         int data_format_code = 5) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::io_error, "cannot create " + path);
  write_volume(vol, out, data_format_code);
}

namespace detail {

inline double ricker(double t, double peak_hz) {
  const double a = M_PI * M_PI * peak_hz * peak_hz * t * t;
  return (1.0 - 2.0 * a) * std::exp(-a);
}

// Deterministic uniform in [0, 1) from the top 53 bits of the generator.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller, one normal per two draws. Written out explicitly so the byte
// stream does not depend on the standard library's distribution internals.
inline double standard_normal(std::mt19937_64& rng) {
  const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace detail

// Layered-earth synthetic: horizontal layers with seeded impedances, the
// resulting reflectivity convolved with a Ricker wavelet, plus optional
// Gaussian noise. A pure function of the spec.
inline SeismicVolume synth_volume(const SynthSpec& spec) {
  if (!spec.geometry.valid()) {
    raise(Errc::invalid_spec, "synthetic volume needs positive geometry");
  }
  if (spec.n_layers < 1) raise(Errc::invalid_spec, "need at least one layer");
  if (spec.noise_std < 0) raise(Errc::invalid_spec, "negative noise level");
  if (spec.dt_s <= 0) raise(Errc::invalid_spec, "sample interval must be positive");
  if (spec.wavelet_peak_hz <= 0) {
    raise(Errc::invalid_spec, "wavelet peak frequency must be positive");
  }

  std::mt19937_64 rng(spec.seed);
  const int ns = spec.geometry.n_sample;

  std::vector<double> impedance(spec.n_layers);
  for (auto& z : impedance) z = 3000.0 + 5000.0 * detail::uniform01(rng);

  std::vector<double> reflectivity(ns, 0.0);
  for (int b = 1; b < spec.n_layers; ++b) {
    const int s = static_cast<int>(
        std::llround(static_cast<double>(b) * ns / spec.n_layers));
    if (s >= ns) continue;
    reflectivity[s] = (impedance[b] - impedance[b - 1]) /
                      (impedance[b] + impedance[b - 1]);
  }

  // Ricker support is truncated where the envelope is far below round-off.
  const int half = std::min(
      ns, static_cast<int>(std::ceil(1.5 / (spec.wavelet_peak_hz * spec.dt_s))));
  std::vector<double> base(ns, 0.0);
  for (int s = 0; s < ns; ++s) {
    if (reflectivity[s] == 0.0) continue;
    const int lo = std::max(0, s - half);
    const int hi = std::min(ns - 1, s + half);
    for (int j = lo; j <= hi; ++j) {
      base[j] += reflectivity[s] * detail::ricker((j - s) * spec.dt_s,
                                                  spec.wavelet_peak_hz);
    }
  }

  SeismicVolume vol;
  vol.geometry = spec.geometry;
  vol.dt_s = spec.dt_s;
  vol.data.resize(spec.geometry.size());
  std::int64_t idx = 0;
  for (int il = 0; il < spec.geometry.n_inline; ++il) {
    for (int xl = 0; xl < spec.geometry.n_crossline; ++xl) {
      for (int s = 0; s < ns; ++s) {
        double v = base[s];
        if (spec.noise_std > 0) {
          v += spec.noise_std * detail::standard_normal(rng);
        }
        vol.data[idx++] = static_cast<float>(v);
      }
    }
  }
  return vol;
}

}  // namespace seisfacies::segy
