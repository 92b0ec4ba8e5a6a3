#pragma once

#include <fftw3.h>

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "seisfacies/errors.hpp"
#include "seisfacies/parallel.hpp"
#include "seisfacies/segy.hpp"

// Per-trace instantaneous attributes from the FFT-based analytic signal.
namespace seisfacies::attributes {

inline constexpr int kAttributeCount = 9;

enum class Attr : int {
  amplitude = 0,
  cosine_inst_phase,
  dominant_frequency,
  envelope,
  inst_bandwidth,
  inst_frequency,
  inst_phase,
  reflection_intensity,
  second_derivative,
};

inline constexpr std::array<const char*, kAttributeCount> kAttributeNames = {
    "amplitude",        "cosine_inst_phase",    "dominant_frequency",
    "envelope",         "inst_bandwidth",       "inst_frequency",
    "inst_phase",       "reflection_intensity", "second_derivative",
};

inline constexpr int kDefaultWindowSamples = 11;

struct AnalyticTrace {
  std::vector<double> real_part;
  std::vector<double> imag_part;
  double dt_s = 0.0;
};

struct FeatureVolumeSet {
  Geometry geometry;
  double dt_s = 0.0;
  std::array<std::vector<float>, kAttributeCount> planes;

  const std::vector<float>& plane(Attr a) const {
    return planes[static_cast<int>(a)];
  }
};

namespace detail {

// FFTW's planner is not reentrant; execution of a finished plan is.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// One pair of in-place c2c plans for a fixed length. FFTW_UNALIGNED keeps the
// plan valid for any buffer passed to the new-array execute call, and
// FFTW_ESTIMATE keeps planning deterministic for a given length.
class FftPlan {
 public:
  explicit FftPlan(int n) : n_(n) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    scratch_ = fftw_alloc_complex(static_cast<std::size_t>(n));
    forward_ = fftw_plan_dft_1d(n, scratch_, scratch_, FFTW_FORWARD,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    backward_ = fftw_plan_dft_1d(n, scratch_, scratch_, FFTW_BACKWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  ~FftPlan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(scratch_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  int size() const { return n_; }
  void forward(std::complex<double>* buf) const {
    fftw_execute_dft(forward_, reinterpret_cast<fftw_complex*>(buf),
                     reinterpret_cast<fftw_complex*>(buf));
  }
  void backward(std::complex<double>* buf) const {
    fftw_execute_dft(backward_, reinterpret_cast<fftw_complex*>(buf),
                     reinterpret_cast<fftw_complex*>(buf));
  }

 private:
  int n_;
  fftw_complex* scratch_;
  fftw_plan forward_;
  fftw_plan backward_;
};

// Analytic signal via the one-sided spectrum mask: bin 0 kept, positive
// frequencies doubled, the Nyquist bin (even n) kept, negative bins zeroed.
inline void analytic_signal_into(std::span<const double> trace, double dt_s,
                                 const FftPlan& plan,
                                 std::complex<double>* buf,
                                 AnalyticTrace& out) {
  const int n = static_cast<int>(trace.size());
  for (int i = 0; i < n; ++i) buf[i] = std::complex<double>(trace[i], 0.0);
  plan.forward(buf);

  const int half = n / 2;
  if (n % 2 == 0) {
    for (int i = 1; i < half; ++i) buf[i] *= 2.0;
    for (int i = half + 1; i < n; ++i) buf[i] = 0.0;
  } else {
    for (int i = 1; i <= half; ++i) buf[i] *= 2.0;
    for (int i = half + 1; i < n; ++i) buf[i] = 0.0;
  }

  plan.backward(buf);
  const double scale = 1.0 / n;
  out.real_part.resize(n);
  out.imag_part.resize(n);
  for (int i = 0; i < n; ++i) {
    out.real_part[i] = buf[i].real() * scale;
    out.imag_part[i] = buf[i].imag() * scale;
  }
  out.dt_s = dt_s;
}

inline std::vector<double> unwrap(std::span<const double> phase) {
  std::vector<double> out(phase.begin(), phase.end());
  double shift = 0.0;
  for (std::size_t i = 1; i < out.size(); ++i) {
    const double jump = phase[i] - phase[i - 1];
    if (jump > M_PI) {
      shift -= 2.0 * M_PI;
    } else if (jump < -M_PI) {
      shift += 2.0 * M_PI;
    }
    out[i] = phase[i] + shift;
  }
  return out;
}

// Central differences inside, one-sided at the ends.
inline std::vector<double> derivative(std::span<const double> x, double dt_s) {
  const std::size_t n = x.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  out[0] = (x[1] - x[0]) / dt_s;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    out[i] = (x[i + 1] - x[i - 1]) / (2.0 * dt_s);
  }
  out[n - 1] = (x[n - 1] - x[n - 2]) / dt_s;
  return out;
}

}  // namespace detail

inline AnalyticTrace analytic_signal(std::span<const double> trace,
                                     double dt_s) {
  const int n = static_cast<int>(trace.size());
  if (n < 4) {
    raise(Errc::trace_too_short,
          "analytic signal needs at least 4 samples, got " + std::to_string(n));
  }
  detail::FftPlan plan(n);
  std::vector<std::complex<double>> buf(n);
  AnalyticTrace out;
  detail::analytic_signal_into(trace, dt_s, plan, buf.data(), out);
  return out;
}

inline AnalyticTrace analytic_signal(std::span<const float> trace,
                                     double dt_s) {
  std::vector<double> widened(trace.begin(), trace.end());
  return analytic_signal(std::span<const double>(widened), dt_s);
}

inline std::vector<double> envelope(const AnalyticTrace& a) {
  std::vector<double> out(a.real_part.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::hypot(a.real_part[i], a.imag_part[i]);
  }
  return out;
}

// atan2(0, 0) is 0 here, so a silent trace has zero phase.
inline std::vector<double> instantaneous_phase(const AnalyticTrace& a) {
  std::vector<double> out(a.real_part.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::atan2(a.imag_part[i], a.real_part[i]);
  }
  return out;
}

inline std::vector<double> cosine_instantaneous_phase(const AnalyticTrace& a) {
  std::vector<double> out = instantaneous_phase(a);
  for (auto& v : out) v = std::cos(v);
  return out;
}

inline std::vector<double> instantaneous_frequency(const AnalyticTrace& a) {
  const std::vector<double> unwrapped =
      detail::unwrap(instantaneous_phase(a));
  std::vector<double> out = detail::derivative(unwrapped, a.dt_s);
  for (auto& v : out) v /= 2.0 * M_PI;
  return out;
}

// |e'| / (2 pi e), zeroed where the envelope is below 1e-12 of its own peak.
inline std::vector<double> instantaneous_bandwidth(const AnalyticTrace& a) {
  const std::vector<double> env = envelope(a);
  const std::vector<double> denv = detail::derivative(env, a.dt_s);
  double peak = 0.0;
  for (double e : env) peak = std::max(peak, e);
  const double floor = 1e-12 * peak;
  std::vector<double> out(env.size(), 0.0);
  for (std::size_t i = 0; i < env.size(); ++i) {
    if (env[i] > floor && env[i] > 0.0) {
      out[i] = std::fabs(denv[i]) / (2.0 * M_PI * env[i]);
    }
  }
  return out;
}

inline std::vector<double> dominant_frequency(const AnalyticTrace& a) {
  const std::vector<double> freq = instantaneous_frequency(a);
  const std::vector<double> band = instantaneous_bandwidth(a);
  std::vector<double> out(freq.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::hypot(freq[i], band[i]);
  }
  return out;
}

// Sliding-window integral of |amplitude|; the window is truncated at the
// trace ends.
inline std::vector<double> reflection_intensity(std::span<const double> trace,
                                                double dt_s,
                                                int window_samples) {
  const int n = static_cast<int>(trace.size());
  if (window_samples < 1 || window_samples % 2 == 0) {
    raise(Errc::invalid_window,
          "window must be a positive odd sample count, got " +
              std::to_string(window_samples));
  }
  if (window_samples > n) {
    raise(Errc::window_too_large,
          "window of " + std::to_string(window_samples) +
              " samples exceeds trace length " + std::to_string(n));
  }
  const int half = window_samples / 2;
  std::vector<double> out(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(n - 1, i + half);
    double acc = 0.0;
    for (int j = lo; j <= hi; ++j) acc += std::fabs(trace[j]);
    out[i] = acc * dt_s;
  }
  return out;
}

inline std::vector<double> second_derivative(std::span<const double> trace,
                                             double dt_s) {
  const int n = static_cast<int>(trace.size());
  std::vector<double> out(n, 0.0);
  for (int i = 1; i + 1 < n; ++i) {
    out[i] = (trace[i + 1] - 2.0 * trace[i] + trace[i - 1]) / (dt_s * dt_s);
  }
  return out;
}

namespace detail {

struct TraceScratch {
  std::vector<double> input;
  std::vector<std::complex<double>> fft;
  AnalyticTrace analytic;
};

inline void compute_trace(std::span<const float> samples, double dt_s,
                          int window_samples, const FftPlan& plan,
                          TraceScratch& scratch,
                          std::array<float*, kAttributeCount> out) {
  const int n = static_cast<int>(samples.size());
  scratch.input.assign(samples.begin(), samples.end());
  scratch.fft.resize(n);
  analytic_signal_into(scratch.input, dt_s, plan, scratch.fft.data(),
                       scratch.analytic);

  const std::vector<double> env = envelope(scratch.analytic);
  const std::vector<double> phase = instantaneous_phase(scratch.analytic);
  const std::vector<double> unwrapped = unwrap(phase);
  std::vector<double> freq = derivative(unwrapped, dt_s);
  for (auto& v : freq) v /= 2.0 * M_PI;

  const std::vector<double> denv = derivative(env, dt_s);
  double peak = 0.0;
  for (double e : env) peak = std::max(peak, e);
  const double floor = 1e-12 * peak;
  std::vector<double> band(env.size(), 0.0);
  for (std::size_t i = 0; i < env.size(); ++i) {
    if (env[i] > floor && env[i] > 0.0) {
      band[i] = std::fabs(denv[i]) / (2.0 * M_PI * env[i]);
    }
  }

  const std::vector<double> intensity =
      reflection_intensity(scratch.input, dt_s, window_samples);
  const std::vector<double> sderiv = second_derivative(scratch.input, dt_s);

  for (int i = 0; i < n; ++i) {
    out[static_cast<int>(Attr::amplitude)][i] = samples[i];
    out[static_cast<int>(Attr::cosine_inst_phase)][i] =
        static_cast<float>(std::cos(phase[i]));
    out[static_cast<int>(Attr::dominant_frequency)][i] =
        static_cast<float>(std::hypot(freq[i], band[i]));
    out[static_cast<int>(Attr::envelope)][i] = static_cast<float>(env[i]);
    out[static_cast<int>(Attr::inst_bandwidth)][i] =
        static_cast<float>(band[i]);
    out[static_cast<int>(Attr::inst_frequency)][i] =
        static_cast<float>(freq[i]);
    out[static_cast<int>(Attr::inst_phase)][i] = static_cast<float>(phase[i]);
    out[static_cast<int>(Attr::reflection_intensity)][i] =
        static_cast<float>(intensity[i]);
    out[static_cast<int>(Attr::second_derivative)][i] =
        static_cast<float>(sderiv[i]);
  }
  for (int a = 0; a < kAttributeCount; ++a) {
    for (int i = 0; i < n; ++i) {
      if (!std::isfinite(out[a][i])) {
        raise(Errc::corrupt_sample,
              std::string("non-finite ") + kAttributeNames[a] + " value");
      }
    }
  }
}

}  // namespace detail

// Computes all nine attributes for every trace. Traces are independent, so
// they are distributed over a worker pool; each output plane is preallocated
// and workers write disjoint ranges, which keeps the result bitwise identical
// for any worker count.
inline FeatureVolumeSet compute_all(const segy::SeismicVolume& volume,
                                    int window_samples = kDefaultWindowSamples,
                                    int workers = 1) {
  if (!volume.geometry.valid()) {
    raise(Errc::geometry_mismatch, "volume has empty geometry");
  }
  const int ns = volume.geometry.n_sample;
  if (ns < 4) {
    raise(Errc::trace_too_short,
          "attributes need at least 4 samples per trace, got " +
              std::to_string(ns));
  }
  if (window_samples < 1 || window_samples % 2 == 0) {
    raise(Errc::invalid_window,
          "window must be a positive odd sample count, got " +
              std::to_string(window_samples));
  }
  if (window_samples > ns) {
    raise(Errc::window_too_large,
          "window of " + std::to_string(window_samples) +
              " samples exceeds trace length " + std::to_string(ns));
  }

  FeatureVolumeSet fv;
  fv.geometry = volume.geometry;
  fv.dt_s = volume.dt_s;
  for (auto& plane : fv.planes) plane.resize(volume.geometry.size());

  const std::int64_t n_traces =
      static_cast<std::int64_t>(volume.geometry.n_inline) *
      volume.geometry.n_crossline;
  const int nworkers = resolve_workers(workers);
  const detail::FftPlan plan(ns);
  std::vector<detail::TraceScratch> scratch(nworkers);

  parallel_for(n_traces, nworkers, [&](int worker_id, std::int64_t t) {
    const int il = static_cast<int>(t / volume.geometry.n_crossline);
    const int xl = static_cast<int>(t % volume.geometry.n_crossline);
    const std::int64_t base = row_id(volume.geometry, il, xl, 0);
    std::array<float*, kAttributeCount> out;
    for (int a = 0; a < kAttributeCount; ++a) {
      out[a] = fv.planes[a].data() + base;
    }
    try {
      detail::compute_trace(volume.trace(il, xl), volume.dt_s, window_samples,
                            plan, scratch[worker_id], out);
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()) + " at inline " +
                                std::to_string(il) + ", crossline " +
                                std::to_string(xl));
    }
  });
  return fv;
}

}  // namespace seisfacies::attributes
