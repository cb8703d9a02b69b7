#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chaosbandit {

/// One quantized sample. Valid values are the 256 integers in [-127, 128].
using Sample = std::int16_t;

inline constexpr int kSampleMin = -127;
inline constexpr int kSampleMax = 128;
inline constexpr double kDefaultPeriodPs = 10.0;

/// Immutable, validated sequence of 8-bit-range samples on a fixed time grid.
class SignalSeries {
 public:
  /// Throws InvalidArgument if `samples` is empty, any sample is out of
  /// range, or `sample_period_ps` is not strictly positive.
  SignalSeries(std::vector<Sample> samples, double sample_period_ps,
               std::string label = {});

  std::span<const Sample> samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  Sample operator[](std::size_t i) const noexcept { return samples_[i]; }
  double sample_period_ps() const noexcept { return period_ps_; }
  const std::string& label() const noexcept { return label_; }

  friend bool operator==(const SignalSeries&, const SignalSeries&) = default;

 private:
  std::vector<Sample> samples_;
  double period_ps_;
  std::string label_;
};

enum class SourceKind {
  kUniform,        // Mersenne Twister, i.i.d. over [-127, 128]
  kColouredNoise,  // first-order low-pass filtered Gaussian (Ornstein-Uhlenbeck)
  kQuasiperiodic,  // two incommensurate tones plus Gaussian dither
  kArSurrogate,    // stable AR(2) with a negative autocorrelation lobe
  kTraceFile,      // recorded trace (CSV or raw int8)
};

std::string to_string(SourceKind kind);
/// Accepts the canonical names ("uniform", "coloured", "quasiperiodic", "ar",
/// "trace") and the long forms ("uniform-prng", "coloured-noise", ...).
SourceKind parse_source_kind(const std::string& name);

/// Configuration envelope for every generator. Only the fields relevant to
/// `kind` are consulted.
struct SourceSpec {
  SourceKind kind = SourceKind::kUniform;
  std::uint64_t seed = 1;
  std::size_t length = 1'000'000;

  /// Standard deviations mapped onto the half-width of the sample range by
  /// the Gaussian-family quantizer.
  double sigma_span = 6.0;

  // coloured noise
  double cutoff_ghz = 10.0;

  // AR(2) surrogate. Coefficients follow x[t] = a1*x[t-1] + a2*x[t-2] + e[t].
  // When unset they are derived from ar_lag and ar_pole_radius.
  std::size_t ar_lag = 5;
  double ar_pole_radius = 0.85;
  std::optional<double> ar_a1;
  std::optional<double> ar_a2;

  // quasiperiodic surrogate; freq2_ghz == 0 selects a single tone
  double freq1_ghz = 6.5;
  double freq2_ghz = 6.5 / 1.6180339887498949;
  double dither = 0.05;

  // trace files
  std::filesystem::path trace_path;
  /// Sample period. Generated sources default to 10 ps; for traces an
  /// explicit value overrides the CSV header.
  std::optional<double> period_ps;
};

struct ArCoefficients {
  double a1 = 0.0;
  double a2 = 0.0;
};

/// Complex-pole AR(2) whose autocorrelation has its most negative value at
/// `lag`: poles r*exp(+-i*pi/lag), giving a1 = 2 r cos(pi/lag), a2 = -r^2.
ArCoefficients ar_coefficients_for_lag(std::size_t lag, double pole_radius);

/// Stationarity check. Convention: the characteristic polynomial
/// 1 - a1 z - a2 z^2 must have both roots strictly outside the unit circle;
/// a root on or inside it makes the pair unstable.
bool ar_is_stable(ArCoefficients c) noexcept;

/// Exact autocorrelation of a stationary AR(2) process up to `max_lag`.
std::vector<double> ar_theoretical_acf(ArCoefficients c, std::size_t max_lag);

/// Maps a standardized value z (zero mean, unit variance) to a sample:
/// +-sigma_span maps to the range edges, rounding is half away from zero,
/// and the result is clipped to [-127, 128]. Monotone in z.
Sample quantize_standardized(double z, double sigma_span) noexcept;

/// Standardizes `values` with their own mean and standard deviation, then
/// quantizes each one. A constant input maps to the range midpoint.
std::vector<Sample> quantize_gaussian(std::span<const double> values,
                                      double sigma_span);

SignalSeries generate_uniform(const SourceSpec& spec);
SignalSeries generate_coloured_noise(const SourceSpec& spec);
SignalSeries generate_ar_surrogate(const SourceSpec& spec);
SignalSeries generate_quasiperiodic(const SourceSpec& spec);
SignalSeries load_trace(const SourceSpec& spec);

/// Dispatches on spec.kind. Identical specs give identical series.
SignalSeries make_series(const SourceSpec& spec);

/// CSV trace: optional "# period_ps=<real>" header, then one integer per line.
void write_trace_csv(const SignalSeries& series,
                     const std::filesystem::path& path);
/// Binary trace: one signed byte per sample. +128 has no int8 encoding and
/// is stored as the otherwise-invalid code -128.
void write_trace_binary(const SignalSeries& series,
                        const std::filesystem::path& path);

}  // namespace chaosbandit
