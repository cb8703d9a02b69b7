#include "chaosbandit/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

#include "chaosbandit/error.hpp"

namespace chaosbandit {

namespace {

struct Segment {
  std::span<const Sample> view;
  std::vector<Sample> storage;  // used only when the segment wraps
};

Segment segment_for(std::span<const Sample> all, std::size_t rep, std::size_t length) {
  const std::size_t n = all.size();
  const bool overflow = rep > std::numeric_limits<std::size_t>::max() / length;
  const std::size_t start = overflow ? ((rep % n) * (length % n)) % n : (rep * length) % n;
  Segment seg;
  if (start + length <= n) {
    seg.view = all.subspan(start, length);
    return seg;
  }
  seg.storage.resize(length);
  for (std::size_t i = 0; i < length; ++i) seg.storage[i] = all[(start + i) % n];
  seg.view = seg.storage;
  return seg;
}

struct RepOutcome {
  double est0 = 0.0, est1 = 0.0, omega = 0.0, th = 0.0;
};

unsigned resolve_jobs(unsigned jobs, std::size_t work) {
  unsigned j = jobs != 0 ? jobs : std::max(1U, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(j, std::max<std::size_t>(work, 1)));
}

// Plays one repetition, reporting each cycle's machine through `on_cycle`.
template <typename OnCycle>
ThresholdTree play_repetition(const ExperimentSpec& spec, std::span<const Sample> segment,
                              std::size_t rep, OnCycle&& on_cycle) {
  ThresholdTree tree(spec.problem.depth(), spec.resolved_tree_params());
  RewardStream rewards(spec.problem, rep);
  const std::size_t stride = spec.plan.stride(tree.depth());
  DecisionRecord record;
  for (std::size_t t = 0; t < spec.plays; ++t) {
    tree.decide_into(segment, t * stride, spec.plan, record);
    on_cycle(t, record.machine);
    record.reward = rewards.play(record.machine);
    tree.update(record);
  }
  return tree;
}

}  // namespace

TreeParams ExperimentSpec::resolved_tree_params() const {
  TreeParams p = tree;
  p.z = 1 << (threshold_levels_k - 1);
  return p;
}

std::size_t ExperimentSpec::segment_length() const {
  const int depth = problem.depth();
  return (plays - 1) * plan.stride(depth) + plan.decision_span(depth);
}

void ExperimentSpec::validate() const {
  if (plays < 1) throw InvalidArgument("plays per run must be >= 1");
  if (repetitions < 1) throw InvalidArgument("repetitions must be >= 1");
  if (threshold_levels_k < 1 || threshold_levels_k > 8)
    throw InvalidArgument("threshold levels K must lie in [1, 8]");
  plan.validate();
  resolved_tree_params().validate();
}

double ExperimentResult::cdr_at(std::size_t cycle) const {
  if (cycle < 1 || cycle > cdr.size())
    throw InvalidArgument("cycle " + std::to_string(cycle) + " outside [1, " +
                          std::to_string(cdr.size()) + "]");
  return cdr[cycle - 1];
}

std::optional<std::size_t> ExperimentResult::first_cycle_reaching(double level) const {
  for (std::size_t t = 0; t < cdr.size(); ++t)
    if (cdr[t] >= level) return t + 1;
  return std::nullopt;
}

SignalSeries experiment_series(const ExperimentSpec& spec) {
  spec.validate();
  SourceSpec src = spec.source;
  if (src.kind != SourceKind::kTraceFile) src.length = spec.repetitions * spec.segment_length();
  return make_series(src);
}

RepetitionTrace run_repetition(const ExperimentSpec& spec, const SignalSeries& series,
                               std::size_t repetition) {
  spec.validate();
  const std::size_t seg_len = spec.segment_length();
  if (!spec.allow_wrap && (repetition + 1) * seg_len > series.size())
    throw SeriesExhausted("series too short for repetition " + std::to_string(repetition));
  const Segment seg = segment_for(series.samples(), repetition, seg_len);
  RepetitionTrace trace{{}, ThresholdTree(spec.problem.depth(), spec.resolved_tree_params())};
  trace.machines.reserve(spec.plays);
  trace.final_tree = play_repetition(spec, seg.view, repetition,
                                     [&](std::size_t, std::uint32_t m) { trace.machines.push_back(m); });
  return trace;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  const SignalSeries series = experiment_series(spec);
  return run_experiment(spec, series);
}

ExperimentResult run_experiment(const ExperimentSpec& spec, const SignalSeries& series) {
  spec.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t reps = spec.repetitions;
  const std::size_t seg_len = spec.segment_length();
  const bool wrapped = reps * seg_len > series.size();
  if (wrapped && !spec.allow_wrap)
    throw SeriesExhausted("series of " + std::to_string(series.size()) +
                          " samples is shorter than the " + std::to_string(reps * seg_len) +
                          " required and wrap-around is disabled");

  const std::size_t machines = spec.problem.size();
  const std::size_t best = spec.problem.best_machine();
  const unsigned jobs = resolve_jobs(spec.jobs, reps);

  // Per-worker integer tallies; summation order cannot change the result.
  std::vector<std::vector<std::uint64_t>> correct(jobs, std::vector<std::uint64_t>(spec.plays));
  std::vector<std::vector<std::uint64_t>> picks(jobs, std::vector<std::uint64_t>(machines));
  std::vector<RepOutcome> outcomes(reps);
  std::vector<std::optional<ThresholdTree>> trees(spec.keep_trees ? reps : 0);
  std::vector<std::exception_ptr> errors(jobs);

  auto worker = [&](unsigned w) {
    try {
      const std::size_t lo = reps * w / jobs;
      const std::size_t hi = reps * (w + 1) / jobs;
      auto& my_correct = correct[w];
      auto& my_picks = picks[w];
      for (std::size_t rep = lo; rep < hi; ++rep) {
        const Segment seg = segment_for(series.samples(), rep, seg_len);
        ThresholdTree tree = play_repetition(spec, seg.view, rep,
                                             [&](std::size_t t, std::uint32_t m) {
                                               ++my_picks[m];
                                               if (m == best) ++my_correct[t];
                                             });
        const TreeNode& root = tree.node(0);
        outcomes[rep] = {estimated_reward_probability(root, 0),
                         estimated_reward_probability(root, 1), root.omega, root.th};
        if (spec.keep_trees) trees[rep] = std::move(tree);
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };

  if (jobs == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(worker, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  ExperimentResult result;
  result.repetitions = reps;
  result.best_machine = best;
  result.wrapped = wrapped;
  result.correct_counts.assign(spec.plays, 0);
  result.selections.assign(machines, 0);
  for (unsigned w = 0; w < jobs; ++w) {
    for (std::size_t t = 0; t < spec.plays; ++t) result.correct_counts[t] += correct[w][t];
    for (std::size_t m = 0; m < machines; ++m) result.selections[m] += picks[w][m];
  }
  result.cdr.resize(spec.plays);
  for (std::size_t t = 0; t < spec.plays; ++t)
    result.cdr[t] = static_cast<double>(result.correct_counts[t]) / static_cast<double>(reps);

  for (const auto& o : outcomes) {
    result.mean_root_estimate0 += o.est0;
    result.mean_root_estimate1 += o.est1;
    result.mean_root_omega += o.omega;
    result.mean_root_threshold += o.th;
  }
  const double inv = 1.0 / static_cast<double>(reps);
  result.mean_root_estimate0 *= inv;
  result.mean_root_estimate1 *= inv;
  result.mean_root_omega *= inv;
  result.mean_root_threshold *= inv;

  if (spec.keep_trees) {
    result.final_trees.reserve(reps);
    for (auto& t : trees) result.final_trees.push_back(std::move(*t));
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

std::vector<SweepRow> sweep_inter_decision(const ExperimentSpec& spec,
                                           std::span<const std::size_t> ds_values,
                                           std::size_t at_cycle) {
  if (at_cycle < 1 || at_cycle > spec.plays)
    throw InvalidArgument("sweep cycle must lie in [1, plays]");
  std::vector<SweepRow> rows;
  for (std::size_t ds : ds_values) {
    if (ds < 1) throw InvalidArgument("inter-decision interval must be >= 1 sample");
    ExperimentSpec s = spec;
    s.plan.delta_s = ds;
    const auto r = run_experiment(s);
    rows.push_back({to_string(spec.source.kind), static_cast<double>(ds), r.cdr_at(at_cycle), {}});
  }
  return rows;
}

std::vector<SweepRow> sweep_inter_bit(const ExperimentSpec& spec,
                                      std::span<const std::size_t> dl_values,
                                      std::span<const int> types, std::size_t at_cycle) {
  if (at_cycle < 1 || at_cycle > spec.plays)
    throw InvalidArgument("sweep cycle must lie in [1, plays]");
  std::vector<SweepRow> rows;
  for (std::size_t dl : dl_values) {
    std::vector<double> cdrs;
    const std::size_t first = rows.size();
    for (int type : types) {
      ExperimentSpec s = spec;
      s.problem = type_problem(type, spec.problem.seed());
      s.plan.delta_l = dl;
      const auto r = run_experiment(s);
      cdrs.push_back(r.cdr_at(at_cycle));
      rows.push_back({"type" + std::to_string(type), static_cast<double>(dl), cdrs.back(), {}});
    }
    const double cv = coefficient_of_variation(cdrs);
    for (std::size_t i = first; i < rows.size(); ++i) rows[i].cv = cv;
  }
  return rows;
}

std::vector<SweepRow> sweep_threshold_levels(const ExperimentSpec& spec,
                                             std::span<const int> k_values,
                                             std::span<const double> p1_values,
                                             std::size_t at_cycle) {
  if (at_cycle < 1 || at_cycle > spec.plays)
    throw InvalidArgument("sweep cycle must lie in [1, plays]");
  std::vector<SweepRow> rows;
  for (double p1 : p1_values) {
    for (int k : k_values) {
      ExperimentSpec s = spec;
      s.problem = BanditProblem({0.9, p1}, spec.problem.seed());
      s.threshold_levels_k = k;
      const auto r = run_experiment(s);
      char label[32];
      std::snprintf(label, sizeof(label), "p1=%g", p1);
      rows.push_back({label, static_cast<double>(k), r.cdr_at(at_cycle), {}});
    }
  }
  return rows;
}

double coefficient_of_variation(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("coefficient of variation of an empty set");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / n);
  if (sd == 0.0) return 0.0;
  return sd / mean;
}

std::optional<PowerLawFit> fit_power_law(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("fit needs matching x and y");
  const std::size_t n = x.size();
  if (n < 2) return std::nullopt;
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidArgument("power-law fit needs positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) return std::nullopt;
  PowerLawFit fit;
  fit.b = sxy / sxx;
  const double log_a = my - fit.b * mx;
  fit.a = std::exp(log_a);
  fit.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i) fit.residuals[i] = ly[i] - (log_a + fit.b * lx[i]);
  return fit;
}

ScalingSetting table1_setting(std::size_t arms) {
  switch (arms) {
    case 2: return {2, 500, 10000};
    case 4: return {4, 1000, 1000};
    case 8: return {8, 5000, 100};
    case 16: return {16, 5000, 100};
    case 32: return {32, 5000, 100};
    case 64: return {64, 10000, 100};
    default: throw InvalidArgument("no published setting for N = " + std::to_string(arms));
  }
}

ScalingResult scaling_study(const ExperimentSpec& templ,
                            std::span<const ScalingSetting> settings, double level) {
  ScalingResult out;
  out.level = level;
  std::vector<double> xs, ys;
  for (const auto& setting : settings) {
    ExperimentSpec s = templ;
    s.problem = canonical_problem(setting.arms, templ.problem.seed());
    s.plays = setting.plays;
    s.repetitions = setting.repetitions;
    const auto r = run_experiment(s);
    ScalingPoint p{setting, r.first_cycle_reaching(level)};
    if (p.cycles) {
      xs.push_back(static_cast<double>(setting.arms));
      ys.push_back(static_cast<double>(*p.cycles));
    }
    out.points.push_back(p);
  }
  out.fit = fit_power_law(xs, ys);
  return out;
}

}  // namespace chaosbandit
