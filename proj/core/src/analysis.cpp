#include "chaosbandit/analysis.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <random>

#include "chaosbandit/error.hpp"

namespace chaosbandit {

namespace {

// Floor for log10 of an exactly-zero bin.
constexpr double kMinPower = 1e-30;

// Decorrelates walk comparison streams from generators seeded with the same
// integer (mt19937_64(seed) also drives the uniform source).
std::uint64_t walk_seed(std::uint64_t seed, std::size_t index) noexcept {
  std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};
struct FftwPlanDestroy {
  void operator()(fftw_plan p) const noexcept { fftw_destroy_plan(p); }
};
using FftwPlan = std::unique_ptr<std::remove_pointer_t<fftw_plan>, FftwPlanDestroy>;

}  // namespace

std::vector<double> autocorrelation(std::span<const double> values, std::size_t max_lag) {
  const std::size_t n = values.size();
  if (max_lag >= n) throw InvalidArgument("max_lag must be smaller than the series length");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> centred(n);
  double denom = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    centred[i] = values[i] - mean;
    denom += centred[i] * centred[i];
  }
  if (denom == 0.0) throw InvalidArgument("autocorrelation of a constant series is undefined");

  std::vector<double> rho(max_lag + 1);
  rho[0] = 1.0;
  for (std::size_t lag = 1; lag <= max_lag; ++lag) {
    double acc = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) acc += centred[t] * centred[t + lag];
    rho[lag] = acc / denom;
  }
  return rho;
}

std::vector<double> autocorrelation(const SignalSeries& series, std::size_t max_lag) {
  std::vector<double> v(series.samples().begin(), series.samples().end());
  return autocorrelation(v, max_lag);
}

std::vector<SpectrumPoint> periodogram(const SignalSeries& series) {
  const std::size_t n = series.size();
  if (n < 2) throw InvalidArgument("periodogram needs at least two samples");
  const std::size_t bins = n / 2 + 1;

  std::unique_ptr<double, FftwFree> in(fftw_alloc_real(n));
  std::unique_ptr<fftw_complex, FftwFree> out(fftw_alloc_complex(bins));
  // FFTW_ESTIMATE: no timing-dependent planning, so results are reproducible.
  FftwPlan plan(fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
  if (!plan) throw Error("FFTW planning failed");

  double mean = 0.0;
  for (Sample s : series.samples()) mean += s;
  mean /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) in.get()[i] = series[i] - mean;
  fftw_execute(plan.get());

  const double df_ghz = 1000.0 / (static_cast<double>(n) * series.sample_period_ps());
  std::vector<SpectrumPoint> spec(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    const double re = out.get()[k][0];
    const double im = out.get()[k][1];
    const double power = (re * re + im * im) / static_cast<double>(n);
    spec[k] = {static_cast<double>(k) * df_ghz, 10.0 * std::log10(std::max(power, kMinPower))};
  }
  return spec;
}

std::vector<SpectrumPoint> power_spectrum(const SignalSeries& series, std::size_t window) {
  if (window < 1) throw InvalidArgument("smoothing window must be >= 1");
  if (series.size() < 2 * window)
    throw InvalidArgument("series shorter than twice the smoothing window");
  const auto raw = periodogram(series);
  // Window covering [i - window/2, i - window/2 + window); reported at bin i.
  const std::size_t left = window / 2;
  const std::size_t right = window - left - 1;
  std::vector<SpectrumPoint> smoothed;
  if (raw.size() < window) return smoothed;
  smoothed.reserve(raw.size() - window + 1);
  double acc = 0.0;
  for (std::size_t i = 0; i < window; ++i) acc += raw[i].power_db;
  for (std::size_t centre = left; centre + right < raw.size(); ++centre) {
    if (centre > left) acc += raw[centre + right].power_db - raw[centre - left - 1].power_db;
    smoothed.push_back({raw[centre].freq_ghz, acc / static_cast<double>(window)});
  }
  return smoothed;
}

Walk build_walk(std::span<const Sample> samples, std::size_t horizon, std::uint64_t seed) {
  if (horizon > samples.size())
    throw InvalidArgument("walk horizon exceeds the number of samples");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> draw(kSampleMin, kSampleMax);
  Walk x(horizon + 1);
  x[0] = 0;
  for (std::size_t t = 1; t <= horizon; ++t) {
    const int u = draw(rng);
    x[t] = x[t - 1] + (u < samples[t - 1] ? 1 : -1);
  }
  return x;
}

Walk build_walk(const SignalSeries& series, std::size_t horizon, std::uint64_t seed) {
  return build_walk(series.samples(), horizon, seed);
}

WalkEnsemble build_ensemble(const SignalSeries& series, std::size_t count,
                            std::size_t horizon, std::uint64_t seed) {
  if (count == 0) throw InvalidArgument("ensemble must contain at least one walk");
  if (count * horizon > series.size())
    throw InvalidArgument("series too short for " + std::to_string(count) + " walks of " +
                          std::to_string(horizon) + " steps");
  WalkEnsemble e;
  e.walks.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    e.walks.push_back(build_walk(series.samples().subspan(i * horizon, horizon), horizon, walk_seed(seed, i)));
  return e;
}

std::vector<double> etmsd(const WalkEnsemble& ensemble, std::span<const std::size_t> taus) {
  if (ensemble.walks.empty()) throw InvalidArgument("ETMSD of an empty ensemble");
  const std::size_t horizon = ensemble.horizon();
  for (const auto& w : ensemble.walks)
    if (w.size() != horizon + 1) throw InvalidArgument("walks in an ensemble must share a horizon");

  std::vector<double> out;
  out.reserve(taus.size());
  for (std::size_t tau : taus) {
    if (tau != 0 && tau >= horizon)
      throw InvalidArgument("tau must be smaller than the walk horizon");
    if (tau == 0) {
      out.push_back(0.0);
      continue;
    }
    const std::size_t terms = horizon - tau;
    double total = 0.0;
    for (const auto& x : ensemble.walks) {
      std::int64_t acc = 0;  // exact: bounded by terms * tau^2
      for (std::size_t t = 1; t <= terms; ++t) {
        const std::int64_t d = x[t + tau] - x[t];
        acc += d * d;
      }
      total += static_cast<double>(acc) / static_cast<double>(terms);
    }
    out.push_back(total / static_cast<double>(ensemble.walks.size()));
  }
  return out;
}

double condition_number(std::span<const double> first, std::span<const double> second) {
  if (first.size() != second.size()) throw InvalidArgument("pair components differ in length");
  const std::size_t n = first.size();
  if (n < 2) throw InvalidArgument("condition number needs at least two pairs");
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    m1 += first[i];
    m2 += second[i];
  }
  m1 /= static_cast<double>(n);
  m2 /= static_cast<double>(n);
  double s11 = 0.0, s22 = 0.0, s12 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d1 = first[i] - m1;
    const double d2 = second[i] - m2;
    s11 += d1 * d1;
    s22 += d2 * d2;
    s12 += d1 * d2;
  }
  const double norm = 1.0 / static_cast<double>(n - 1);
  s11 *= norm;
  s22 *= norm;
  s12 *= norm;

  // Symmetric PSD: singular values are the eigenvalues.
  const double mean_diag = 0.5 * (s11 + s22);
  const double radius = std::hypot(0.5 * (s11 - s22), s12);
  const double lmax = mean_diag + radius;
  const double lmin = mean_diag - radius;
  if (!(lmax > 0.0)) return std::numeric_limits<double>::infinity();
  if (lmin <= lmax * 4.0 * std::numeric_limits<double>::epsilon())
    return std::numeric_limits<double>::infinity();
  return lmax / lmin;
}

double condition_number(const WalkEnsemble& ensemble, std::size_t lag, PairingMode mode) {
  if (ensemble.walks.empty()) throw InvalidArgument("condition number of an empty ensemble");
  const std::size_t horizon = ensemble.horizon();
  if (lag >= horizon) throw InvalidArgument("lag D must be smaller than the walk horizon");
  const std::size_t span = horizon - lag;  // t = 1..T-D

  std::vector<double> a, b;
  if (mode == PairingMode::kPooled) {
    a.reserve(span * ensemble.size());
    b.reserve(span * ensemble.size());
    for (const auto& x : ensemble.walks) {
      for (std::size_t t = 1; t <= span; ++t) {
        a.push_back(static_cast<double>(x[t]));
        b.push_back(static_cast<double>(x[t + lag]));
      }
    }
  } else {
    a.assign(span, 0.0);
    b.assign(span, 0.0);
    for (const auto& x : ensemble.walks) {
      for (std::size_t t = 1; t <= span; ++t) {
        a[t - 1] += static_cast<double>(x[t]);
        b[t - 1] += static_cast<double>(x[t + lag]);
      }
    }
    const double inv = 1.0 / static_cast<double>(ensemble.size());
    for (std::size_t i = 0; i < span; ++i) {
      a[i] *= inv;
      b[i] *= inv;
    }
  }
  return condition_number(a, b);
}

}  // namespace chaosbandit
