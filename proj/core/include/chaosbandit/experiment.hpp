#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chaosbandit/bandit.hpp"
#include "chaosbandit/signal.hpp"
#include "chaosbandit/threshold_tree.hpp"

namespace chaosbandit {

/// Everything needed to reproduce one CDR curve.
struct ExperimentSpec {
  BanditProblem problem = canonical_problem(2);
  /// Signal source. For generated kinds `length` is ignored and the series
  /// is sized to give every repetition its own segment.
  SourceSpec source;
  SamplingPlan plan;
  std::size_t plays = 500;
  std::size_t repetitions = 1000;
  /// Threshold precision: z = 2^(K-1), i.e. 2^K + 1 levels.
  int threshold_levels_k = 8;
  /// Learning parameters; `z` is overwritten from threshold_levels_k.
  TreeParams tree;
  /// Reuse the series cyclically when it is too short for disjoint segments.
  bool allow_wrap = true;
  /// Keep every repetition's final tree in the result.
  bool keep_trees = false;
  /// Worker threads; 0 means hardware concurrency. Never affects results.
  unsigned jobs = 0;

  TreeParams resolved_tree_params() const;
  /// Samples consumed by one repetition.
  std::size_t segment_length() const;
  void validate() const;
};

struct ExperimentResult {
  /// CDR(t) for t = 1..plays (index t-1).
  std::vector<double> cdr;
  /// Number of repetitions whose cycle-t choice was the best machine.
  std::vector<std::uint64_t> correct_counts;
  /// Plays per machine, summed over all cycles and repetitions.
  std::vector<std::uint64_t> selections;
  std::size_t repetitions = 0;
  std::size_t best_machine = 0;
  /// The source was shorter than repetitions * segment and was reused.
  bool wrapped = false;
  /// Root-node statistics averaged over repetitions at the final cycle.
  double mean_root_estimate0 = 0.0;
  double mean_root_estimate1 = 0.0;
  double mean_root_omega = 0.0;
  double mean_root_threshold = 0.0;
  std::vector<ThresholdTree> final_trees;
  double wall_seconds = 0.0;

  /// CDR at a 1-based cycle.
  double cdr_at(std::size_t cycle) const;
  /// First 1-based cycle whose CDR is >= level, read off the averaged curve
  /// without smoothing.
  std::optional<std::size_t> first_cycle_reaching(double level) const;
};

/// Machines chosen by a single repetition, one per cycle.
struct RepetitionTrace {
  std::vector<std::uint32_t> machines;
  ThresholdTree final_tree;
};

/// Builds the source series an experiment would use.
SignalSeries experiment_series(const ExperimentSpec& spec);

/// decide -> play -> update for `plays` cycles from a fresh tree, using the
/// repetition's own signal segment and reward stream.
RepetitionTrace run_repetition(const ExperimentSpec& spec, const SignalSeries& series,
                               std::size_t repetition);

ExperimentResult run_experiment(const ExperimentSpec& spec);
/// Same, over a caller-supplied series (shared across sweeps, or a trace).
ExperimentResult run_experiment(const ExperimentSpec& spec, const SignalSeries& series);

/// One line of a sweep table: `label` names the series/problem variant,
/// `value` is the swept parameter.
struct SweepRow {
  std::string label;
  double value = 0.0;
  double cdr = 0.0;
  std::optional<double> cv;
};

/// CDR at `at_cycle` for each inter-decision interval.
std::vector<SweepRow> sweep_inter_decision(const ExperimentSpec& spec,
                                           std::span<const std::size_t> ds_values,
                                           std::size_t at_cycle);

/// CDR at `at_cycle` for each (type, inter-bit interval) on the four-armed
/// Type problems, plus the coefficient of variation across types per
/// interval (stored on every row of that interval).
std::vector<SweepRow> sweep_inter_bit(const ExperimentSpec& spec,
                                      std::span<const std::size_t> dl_values,
                                      std::span<const int> types, std::size_t at_cycle = 100);

/// CDR at `at_cycle` on two-armed problems (0.9, p1) for each K and p1.
std::vector<SweepRow> sweep_threshold_levels(const ExperimentSpec& spec,
                                             std::span<const int> k_values,
                                             std::span<const double> p1_values,
                                             std::size_t at_cycle = 200);

/// Population standard deviation over mean; 0 when all values are equal.
double coefficient_of_variation(std::span<const double> values);

struct PowerLawFit {
  double a = 0.0;
  double b = 0.0;
  /// log(cycles) - (log a + b log N) per fitted point.
  std::vector<double> residuals;
};

/// Least squares of log y = log a + b log x. Needs at least two points with
/// distinct x; returns nullopt otherwise.
std::optional<PowerLawFit> fit_power_law(std::span<const double> x, std::span<const double> y);

struct ScalingSetting {
  std::size_t arms = 2;
  std::size_t plays = 500;
  std::size_t repetitions = 1000;
};

/// Plays/repetitions used for each arm count in the published runs.
ScalingSetting table1_setting(std::size_t arms);

struct ScalingPoint {
  ScalingSetting setting;
  std::optional<std::size_t> cycles;  // nullopt: CDR never reached the level
};

struct ScalingResult {
  std::vector<ScalingPoint> points;
  std::optional<PowerLawFit> fit;
  double level = 0.95;
};

/// Runs the canonical problem for each setting (other fields from
/// `templ`), records the first cycle with CDR >= level and fits a N^b.
ScalingResult scaling_study(const ExperimentSpec& templ,
                            std::span<const ScalingSetting> settings, double level = 0.95);

}  // namespace chaosbandit
