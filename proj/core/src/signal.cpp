#include "chaosbandit/signal.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "chaosbandit/error.hpp"
#include "chaosbandit/output.hpp"

namespace chaosbandit {

namespace {

constexpr std::size_t kArBurnIn = 1000;

bool in_range(long v) { return v >= kSampleMin && v <= kSampleMax; }

void require_length(const SourceSpec& spec) {
  if (spec.length == 0) throw InvalidArgument("source length must be >= 1");
}

void require_sigma_span(const SourceSpec& spec) {
  if (!(spec.sigma_span > 0.0) || !std::isfinite(spec.sigma_span))
    throw InvalidArgument("sigma_span must be a positive finite number");
}

double generated_period(const SourceSpec& spec) {
  const double p = spec.period_ps.value_or(kDefaultPeriodPs);
  if (!(p > 0.0)) throw InvalidArgument("period_ps must be > 0");
  return p;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace

SignalSeries::SignalSeries(std::vector<Sample> samples, double sample_period_ps,
                           std::string label)
    : samples_(std::move(samples)),
      period_ps_(sample_period_ps),
      label_(std::move(label)) {
  if (samples_.empty()) throw InvalidArgument("signal series must not be empty");
  if (!(period_ps_ > 0.0) || !std::isfinite(period_ps_))
    throw InvalidArgument("sample period must be a positive finite number");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!in_range(samples_[i]))
      throw InvalidArgument("sample " + std::to_string(i) + " = " +
                            std::to_string(samples_[i]) +
                            " outside [-127, 128]");
  }
}

std::string to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::kUniform: return "uniform";
    case SourceKind::kColouredNoise: return "coloured";
    case SourceKind::kQuasiperiodic: return "quasiperiodic";
    case SourceKind::kArSurrogate: return "ar";
    case SourceKind::kTraceFile: return "trace";
  }
  return "unknown";
}

SourceKind parse_source_kind(const std::string& name) {
  if (name == "uniform" || name == "uniform-prng" || name == "rand")
    return SourceKind::kUniform;
  if (name == "coloured" || name == "coloured-noise" || name == "colored" ||
      name == "colored-noise")
    return SourceKind::kColouredNoise;
  if (name == "quasiperiodic" || name == "quasiperiodic-surrogate")
    return SourceKind::kQuasiperiodic;
  if (name == "ar" || name == "ar-surrogate") return SourceKind::kArSurrogate;
  if (name == "trace" || name == "trace-file") return SourceKind::kTraceFile;
  throw InvalidArgument("unknown source kind '" + name + "'");
}

ArCoefficients ar_coefficients_for_lag(std::size_t lag, double pole_radius) {
  if (lag == 0) throw InvalidArgument("AR negative-correlation lag must be >= 1");
  if (!(pole_radius > 0.0 && pole_radius < 1.0))
    throw InvalidArgument("AR pole radius must lie in (0, 1)");
  const double theta = std::numbers::pi / static_cast<double>(lag);
  return {2.0 * pole_radius * std::cos(theta), -pole_radius * pole_radius};
}

bool ar_is_stable(ArCoefficients c) noexcept {
  if (!std::isfinite(c.a1) || !std::isfinite(c.a2)) return false;
  // Roots of 1 - a1 z - a2 z^2 outside the unit circle <=> the stationarity
  // triangle, with strict inequalities.
  return c.a1 + c.a2 < 1.0 && c.a2 - c.a1 < 1.0 && std::abs(c.a2) < 1.0;
}

std::vector<double> ar_theoretical_acf(ArCoefficients c, std::size_t max_lag) {
  if (!ar_is_stable(c)) throw InvalidArgument("AR coefficients are not stable");
  std::vector<double> rho(max_lag + 1);
  rho[0] = 1.0;
  if (max_lag >= 1) rho[1] = c.a1 / (1.0 - c.a2);
  for (std::size_t k = 2; k <= max_lag; ++k)
    rho[k] = c.a1 * rho[k - 1] + c.a2 * rho[k - 2];
  return rho;
}

Sample quantize_standardized(double z, double sigma_span) noexcept {
  constexpr double kHalfWidth = (kSampleMax - kSampleMin) / 2.0;  // 127.5
  constexpr double kCentre = (kSampleMax + kSampleMin) / 2.0;     // 0.5
  double v = kCentre + kHalfWidth * (z / sigma_span);
  if (!(v > kSampleMin)) return static_cast<Sample>(kSampleMin);  // also NaN
  if (v >= kSampleMax) return static_cast<Sample>(kSampleMax);
  return static_cast<Sample>(std::round(v));  // half away from zero
}

std::vector<Sample> quantize_gaussian(std::span<const double> values,
                                      double sigma_span) {
  if (values.empty()) return {};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(values.size()));

  std::vector<Sample> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double z = sd > 0.0 ? (values[i] - mean) / sd : 0.0;
    out[i] = quantize_standardized(z, sigma_span);
  }
  return out;
}

SignalSeries generate_uniform(const SourceSpec& spec) {
  require_length(spec);
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<int> dist(kSampleMin, kSampleMax);
  std::vector<Sample> out(spec.length);
  for (auto& s : out) s = static_cast<Sample>(dist(rng));
  return SignalSeries(std::move(out), generated_period(spec), "uniform");
}

SignalSeries generate_coloured_noise(const SourceSpec& spec) {
  require_length(spec);
  require_sigma_span(spec);
  const double period = generated_period(spec);
  const double nyquist_ghz = 1000.0 / (2.0 * period);
  if (!(spec.cutoff_ghz > 0.0))
    throw InvalidArgument("coloured-noise cut-off must be > 0 GHz");
  if (spec.cutoff_ghz > nyquist_ghz)
    throw InvalidArgument("coloured-noise cut-off exceeds the Nyquist frequency");

  // x[t+1] = c x[t] + sqrt(1 - c^2) g[t], started from the stationary law.
  const double c = std::exp(-2.0 * std::numbers::pi * spec.cutoff_ghz * period * 1e-3);
  const double drive = std::sqrt(1.0 - c * c);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<double> x(spec.length);
  double state = gauss(rng);
  for (auto& v : x) {
    v = state;
    state = c * state + drive * gauss(rng);
  }
  return SignalSeries(quantize_gaussian(x, spec.sigma_span), period, "coloured");
}

SignalSeries generate_ar_surrogate(const SourceSpec& spec) {
  require_length(spec);
  require_sigma_span(spec);
  ArCoefficients coef;
  if (spec.ar_a1 || spec.ar_a2) {
    coef = {spec.ar_a1.value_or(0.0), spec.ar_a2.value_or(0.0)};
  } else {
    coef = ar_coefficients_for_lag(spec.ar_lag, spec.ar_pole_radius);
  }
  if (!ar_is_stable(coef))
    throw InvalidArgument("AR(2) coefficients (" + std::to_string(coef.a1) + ", " +
                          std::to_string(coef.a2) +
                          ") are not stable: a characteristic root lies on or "
                          "inside the unit circle");

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double x1 = 0.0, x2 = 0.0;
  for (std::size_t i = 0; i < kArBurnIn; ++i) {
    const double x = coef.a1 * x1 + coef.a2 * x2 + gauss(rng);
    x2 = x1;
    x1 = x;
  }
  std::vector<double> x(spec.length);
  for (auto& v : x) {
    v = coef.a1 * x1 + coef.a2 * x2 + gauss(rng);
    x2 = x1;
    x1 = v;
  }
  return SignalSeries(quantize_gaussian(x, spec.sigma_span), generated_period(spec),
                      "ar");
}

SignalSeries generate_quasiperiodic(const SourceSpec& spec) {
  require_length(spec);
  require_sigma_span(spec);
  if (!(spec.freq1_ghz > 0.0))
    throw InvalidArgument("quasiperiodic frequency must be > 0 GHz");
  if (spec.freq2_ghz < 0.0)
    throw InvalidArgument("second quasiperiodic frequency must be > 0 GHz (or 0 for a single tone)");
  if (!(spec.dither >= 0.0)) throw InvalidArgument("dither must be >= 0");

  const double period = generated_period(spec);
  // Cycles per sample; the phase is reduced modulo one cycle before scaling
  // so long series keep full precision.
  const double step1 = spec.freq1_ghz * period * 1e-3;
  const double step2 = spec.freq2_ghz * period * 1e-3;
  const bool two_tone = spec.freq2_ghz > 0.0;

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> x(spec.length);
  for (std::size_t t = 0; t < spec.length; ++t) {
    const double td = static_cast<double>(t);
    double v = std::sin(2.0 * std::numbers::pi * std::fmod(step1 * td, 1.0));
    if (two_tone) v += std::sin(2.0 * std::numbers::pi * std::fmod(step2 * td, 1.0));
    if (spec.dither > 0.0) v += spec.dither * gauss(rng);
    x[t] = v;
  }
  return SignalSeries(quantize_gaussian(x, spec.sigma_span), period, "quasiperiodic");
}

SignalSeries load_trace(const SourceSpec& spec) {
  const auto& path = spec.trace_path;
  if (path.empty()) throw InvalidArgument("trace source requires a file path");
  if (!std::filesystem::exists(path))
    throw IoError("trace file not found: " + path.string());

  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  const std::string label = "trace:" + path.filename().string();

  if (ext == ".csv" || ext == ".txt") {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open trace file: " + path.string());
    std::optional<double> header_period;
    std::vector<Sample> samples;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::string t = trim(line);
      if (t.empty()) continue;
      if (t.front() == '#') {
        const auto pos = t.find("period_ps=");
        if (pos != std::string::npos) {
          try {
            header_period = std::stod(t.substr(pos + 10));
          } catch (const std::exception&) {
            throw IoError(path.string() + ":" + std::to_string(line_no) +
                          ": malformed period header");
          }
        }
        continue;
      }
      long value = 0;
      const auto* first = t.data();
      const auto* last = t.data() + t.size();
      auto [ptr, ec] = std::from_chars(first, last, value);
      if (ec != std::errc() || ptr != last)
        throw IoError(path.string() + ":" + std::to_string(line_no) +
                      ": malformed row '" + t + "'");
      if (!in_range(value))
        throw IoError(path.string() + ":" + std::to_string(line_no) + ": value " +
                      std::to_string(value) + " outside [-127, 128]");
      samples.push_back(static_cast<Sample>(value));
    }
    if (samples.empty()) throw IoError("trace file has no samples: " + path.string());
    const double period = spec.period_ps.value_or(header_period.value_or(kDefaultPeriodPs));
    return SignalSeries(std::move(samples), period, label);
  }

  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open trace file: " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  if (bytes.empty()) throw IoError("trace file has no samples: " + path.string());
  std::vector<Sample> samples(bytes.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const auto b = static_cast<std::int8_t>(bytes[i]);
    samples[i] = b == -128 ? static_cast<Sample>(kSampleMax) : static_cast<Sample>(b);
  }
  return SignalSeries(std::move(samples), spec.period_ps.value_or(kDefaultPeriodPs),
                      label);
}

SignalSeries make_series(const SourceSpec& spec) {
  switch (spec.kind) {
    case SourceKind::kUniform: return generate_uniform(spec);
    case SourceKind::kColouredNoise: return generate_coloured_noise(spec);
    case SourceKind::kQuasiperiodic: return generate_quasiperiodic(spec);
    case SourceKind::kArSurrogate: return generate_ar_surrogate(spec);
    case SourceKind::kTraceFile: return load_trace(spec);
  }
  throw InvalidArgument("unhandled source kind");
}

void write_trace_csv(const SignalSeries& series, const std::filesystem::path& path) {
  std::ostringstream os;
  os << "# period_ps=" << format_real(series.sample_period_ps()) << '\n';
  for (Sample s : series.samples()) os << s << '\n';
  write_file_atomic(path, os.str());
}

void write_trace_binary(const SignalSeries& series, const std::filesystem::path& path) {
  std::string bytes(series.size(), '\0');
  for (std::size_t i = 0; i < series.size(); ++i) {
    const int s = series[i];
    bytes[i] = static_cast<char>(static_cast<std::int8_t>(s == kSampleMax ? -128 : s));
  }
  write_file_atomic(path, bytes);
}

}  // namespace chaosbandit
