#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "chaosbandit/analysis.hpp"
#include "chaosbandit/error.hpp"
#include "chaosbandit/signal.hpp"
#include "doctest.h"

using namespace chaosbandit;

namespace {

SignalSeries uniform_series(std::size_t n, std::uint64_t seed) {
  SourceSpec s;
  s.length = n;
  s.seed = seed;
  return generate_uniform(s);
}

}  // namespace

TEST_CASE("autocorrelation basics") {
  const SignalSeries s({1, 5, -3, 7, 0, 2}, 10.0);
  CHECK(autocorrelation(s, 3)[0] == 1.0);
  std::vector<double> alt(10'000);
  for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = i % 2 ? 1.0 : -1.0;
  CHECK(autocorrelation(alt, 1)[1] == doctest::Approx(-1.0).epsilon(1e-3));
  const std::vector<double> flat(10, 2.0);
  CHECK_THROWS_AS(autocorrelation(flat, 1), InvalidArgument);
  CHECK_THROWS_AS(autocorrelation(s, 6), InvalidArgument);
}

TEST_CASE("autocorrelation of AR(1) decays geometrically") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  const double phi = 0.7;
  std::vector<double> x(1'000'000);
  double state = 0.0;
  for (auto& v : x) {
    state = phi * state + g(rng);
    v = state;
  }
  const auto rho = autocorrelation(x, 6);
  for (std::size_t k = 0; k <= 6; ++k) CHECK(std::abs(rho[k] - std::pow(phi, k)) <= 0.02);
}

TEST_CASE("periodogram of a pure tone peaks at its frequency") {
  const std::size_t n = 4096;
  const double period_ps = 10.0;
  const double f0 = 6.5;  // GHz
  std::vector<Sample> v(n);
  for (std::size_t t = 0; t < n; ++t)
    v[t] = static_cast<Sample>(std::lround(100.0 * std::sin(2 * std::numbers::pi * f0 * t * period_ps * 1e-3)));
  const SignalSeries s(v, period_ps);
  const auto p = periodogram(s);
  CHECK(p.size() == n / 2 + 1);
  const double df = 1000.0 / (n * period_ps);
  CHECK(p[1].freq_ghz == doctest::Approx(df));
  std::size_t peak = 1;
  for (std::size_t k = 1; k < p.size(); ++k)
    if (p[k].power_db > p[peak].power_db) peak = k;
  CHECK(std::abs(p[peak].freq_ghz - f0) <= df);
}

TEST_CASE("periodogram of a constant series is floored") {
  const SignalSeries s(std::vector<Sample>(64, 7), 10.0);
  const auto p = periodogram(s);
  for (const auto& pt : p) CHECK(pt.power_db == doctest::Approx(-300.0));
  CHECK_THROWS_AS(periodogram(SignalSeries({1}, 10.0)), InvalidArgument);
}

TEST_CASE("smoothed spectrum of white noise is flat") {
  const auto spec = power_spectrum(uniform_series(1'000'000, 2), 20);
  REQUIRE(spec.size() > 1000);
  // A single bin's dB value scatters with sd ~5.57 dB (log of an exponential
  // variable); the 20-bin average has sd ~1.25 dB.
  double mean = 0.0;
  for (const auto& p : spec) mean += p.power_db;
  mean /= static_cast<double>(spec.size());
  double ss = 0.0;
  for (const auto& p : spec) ss += (p.power_db - mean) * (p.power_db - mean);
  const double sd = std::sqrt(ss / static_cast<double>(spec.size()));
  CHECK(sd == doctest::Approx(5.57 / std::sqrt(20.0)).epsilon(0.1));
  const std::size_t q = spec.size() / 4;
  double first = 0.0, last = 0.0;
  for (std::size_t i = 0; i < q; ++i) {
    first += spec[i].power_db;
    last += spec[spec.size() - 1 - i].power_db;
  }
  CHECK(std::abs(first - last) / static_cast<double>(q) < 0.1);
}

TEST_CASE("smoothing reports only full windows") {
  const auto s = uniform_series(200, 3);
  const auto raw = periodogram(s);
  const auto sm = power_spectrum(s, 5);
  CHECK(sm.size() == raw.size() - 4);
  CHECK(sm.front().freq_ghz == raw[2].freq_ghz);
  double avg = 0.0;
  for (std::size_t i = 0; i < 5; ++i) avg += raw[i].power_db;
  CHECK(sm.front().power_db == doctest::Approx(avg / 5));
  const auto even = power_spectrum(s, 4);
  CHECK(even.front().freq_ghz == raw[2].freq_ghz);
  CHECK(power_spectrum(s, 1).size() == raw.size());
  CHECK_THROWS_AS(power_spectrum(s, 0), InvalidArgument);
  CHECK_THROWS_AS(power_spectrum(s, 101), InvalidArgument);
}

TEST_CASE("walk at the upper boundary drifts up") {
  const std::vector<Sample> top(10'000, 128);
  const auto x = build_walk(std::span<const Sample>(top), 10'000, 1);
  const double p = 255.0 / 256.0;
  const double drift = 2 * p - 1;
  const double sd = 2 * std::sqrt(p * (1 - p) * 10'000.0);
  CHECK(std::abs(static_cast<double>(x.back()) - drift * 10'000.0) <= 3 * sd);
}

TEST_CASE("walk at the lower boundary always steps down") {
  const std::vector<Sample> bottom(1000, -127);
  const auto x = build_walk(std::span<const Sample>(bottom), 1000, 9);
  CHECK(x.size() == 1001);
  CHECK(x[0] == 0);
  CHECK(x.back() == -1000);
  CHECK_THROWS_AS(build_walk(std::span<const Sample>(bottom), 1001, 9), InvalidArgument);
}

TEST_CASE("uniform walks are unbiased with variance T") {
  const std::size_t walks = 400, horizon = 2500;
  const auto ens = build_ensemble(uniform_series(walks * horizon, 5), walks, horizon, 5);
  CHECK(ens.size() == walks);
  CHECK(ens.horizon() == horizon);
  double mean = 0.0, sq = 0.0;
  for (const auto& w : ens.walks) {
    mean += static_cast<double>(w.back());
    sq += static_cast<double>(w.back()) * static_cast<double>(w.back());
  }
  mean /= walks;
  sq /= walks;
  // Expected drift -T/256 from the strict comparison.
  const double sd_mean = std::sqrt(static_cast<double>(horizon) / walks);
  CHECK(std::abs(mean + horizon / 256.0) <= 4 * sd_mean);
  CHECK(sq / horizon == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("walks driven by the same seed as the uniform source are not degenerate") {
  const auto ens = build_ensemble(uniform_series(1000, 7), 1, 1000, 7);
  CHECK(std::abs(ens.walks[0].back()) < 200);
}

TEST_CASE("ETMSD oracles") {
  WalkEnsemble ballistic;
  Walk w(101);
  for (std::size_t t = 0; t <= 100; ++t) w[t] = static_cast<std::int64_t>(t);
  ballistic.walks = {w, w};
  const std::vector<std::size_t> taus{0, 1, 7, 50};
  const auto e = etmsd(ballistic, taus);
  CHECK(e[0] == 0.0);
  CHECK(e[1] == 1.0);
  CHECK(e[2] == 49.0);
  CHECK(e[3] == 2500.0);
  const std::vector<std::size_t> too_big{100};
  CHECK_THROWS_AS(etmsd(ballistic, too_big), InvalidArgument);
  CHECK_THROWS_AS(etmsd(WalkEnsemble{}, taus), InvalidArgument);
  WalkEnsemble ragged;
  ragged.walks = {w, Walk(50, 0)};
  CHECK_THROWS_AS(etmsd(ragged, taus), InvalidArgument);
}

TEST_CASE("ETMSD of uniform-source walks grows linearly") {
  const std::size_t walks = 100, horizon = 100'000;
  const auto ens = build_ensemble(uniform_series(walks * horizon, 1), walks, horizon, 1);
  const std::vector<std::size_t> taus{1, 10, 100, 1000};
  const auto e = etmsd(ens, taus);
  CHECK(e[0] == doctest::Approx(1.0));
  for (std::size_t i = 1; i < taus.size(); ++i)
    CHECK(e[i] == doctest::Approx(static_cast<double>(taus[i])).epsilon(0.05));
}

TEST_CASE("condition number oracles") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  std::vector<double> a(10'000), b(10'000);
  for (auto& v : a) v = g(rng);
  for (auto& v : b) v = g(rng);
  CHECK(condition_number(a, b) == doctest::Approx(1.0).epsilon(0.1));
  CHECK(std::isinf(condition_number(a, a)));
  std::vector<double> scaled(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) scaled[i] = 3 * a[i] + 1;
  CHECK(std::isinf(condition_number(a, scaled)));
  const std::vector<double> two{1.0, 2.0}, flat{1.0, 1.0};
  CHECK(std::isinf(condition_number(two, flat)));
  CHECK_THROWS_AS(condition_number(std::vector<double>{1.0}, std::vector<double>{1.0}),
                  InvalidArgument);
  CHECK_THROWS_AS(condition_number(two, std::vector<double>{1.0}), InvalidArgument);
}

TEST_CASE("condition number of walk pairs: drifting trajectories score higher") {
  const std::size_t walks = 50, horizon = 20'000, lag = 2000;
  SourceSpec ar;
  ar.kind = SourceKind::kArSurrogate;
  ar.length = walks * horizon;
  ar.seed = 4;
  // Tone with a DC offset: every walk picks up the same drift.
  std::vector<Sample> biased(walks * horizon);
  for (std::size_t t = 0; t < biased.size(); ++t)
    biased[t] = static_cast<Sample>(std::lround(16.0 + 100.0 * std::sin(2 * std::numbers::pi * 0.065 * t)));
  const auto e_ar = build_ensemble(make_series(ar), walks, horizon, 4);
  const auto e_biased = build_ensemble(SignalSeries(biased, 10.0), walks, horizon, 4);
  for (auto mode : {PairingMode::kPooled, PairingMode::kAveraged}) {
    const double c_ar = condition_number(e_ar, lag, mode);
    const double c_biased = condition_number(e_biased, lag, mode);
    CHECK(c_ar >= 1.0);
    CHECK(c_ar < c_biased);
  }
  CHECK_THROWS_AS(condition_number(e_ar, horizon, PairingMode::kPooled), InvalidArgument);
}
