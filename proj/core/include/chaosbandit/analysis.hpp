#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "chaosbandit/signal.hpp"

namespace chaosbandit {

/// rho(l) = sum (s_t - mu)(s_{t+l} - mu) / sum (s_t - mu)^2 for l = 0..max_lag.
/// rho(0) is exactly 1. Throws InvalidArgument on a constant series or
/// max_lag >= length.
std::vector<double> autocorrelation(const SignalSeries& series, std::size_t max_lag);
std::vector<double> autocorrelation(std::span<const double> values, std::size_t max_lag);

struct SpectrumPoint {
  double freq_ghz = 0.0;
  double power_db = 0.0;
};

/// Raw periodogram |X_k|^2 / n of the mean-removed series in dB, for bins
/// k = 0..n/2 on the grid implied by the sample period. No smoothing.
std::vector<SpectrumPoint> periodogram(const SignalSeries& series);

/// Periodogram smoothed by a centred `window`-point moving average over the
/// dB values. Only positions where the whole window fits are reported.
std::vector<SpectrumPoint> power_spectrum(const SignalSeries& series, std::size_t window = 20);

/// Positions x(0) = 0, x(1), ..., x(T) of one +-1 walk.
using Walk = std::vector<std::int64_t>;

struct WalkEnsemble {
  std::vector<Walk> walks;
  std::size_t horizon() const noexcept { return walks.empty() ? 0 : walks.front().size() - 1; }
  std::size_t size() const noexcept { return walks.size(); }
};

/// For t = 1..T draws u uniformly from [-127, 128]; steps right (+1) when
/// u < s(t) and left otherwise. `samples` supplies s(1..T).
Walk build_walk(std::span<const Sample> samples, std::size_t horizon, std::uint64_t seed);
Walk build_walk(const SignalSeries& series, std::size_t horizon, std::uint64_t seed);

/// `count` walks over consecutive disjoint segments of `series`. Walk i draws
/// its comparison numbers from a stream derived from (seed, i), so passing
/// the source's own seed is safe.
WalkEnsemble build_ensemble(const SignalSeries& series, std::size_t count,
                            std::size_t horizon, std::uint64_t seed);

/// Ensemble average of time-averaged mean square displacement,
/// < 1/(T-tau) sum_{t=1}^{T-tau} (x(t+tau) - x(t))^2 >, for each tau.
std::vector<double> etmsd(const WalkEnsemble& ensemble, std::span<const std::size_t> taus);

enum class PairingMode {
  kPooled,    // every (x_w(t), x_w(t+D)) pair across walks
  kAveraged,  // pairs of the ensemble-mean trajectory (<x(t)>, <x(t+D)>)
};

/// sigma_max / sigma_min of the 2x2 sample covariance (1/(n-1)) of the
/// pairs. Returns +infinity when the covariance is singular.
double condition_number(std::span<const double> first, std::span<const double> second);
double condition_number(const WalkEnsemble& ensemble, std::size_t lag = 10000,
                        PairingMode mode = PairingMode::kPooled);

}  // namespace chaosbandit
