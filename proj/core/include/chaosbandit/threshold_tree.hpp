#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chaosbandit/signal.hpp"

namespace chaosbandit {

/// Learning parameters shared by every node of a tree.
struct TreeParams {
  /// Threshold increment applied on a win.
  double delta = 1.0;
  /// Forgetting factor: every update multiplies the old threshold by alpha.
  double alpha = 0.99;
  /// Threshold half-range in levels; comparisons use 2z+1 levels.
  int z = 128;
  /// Loss step used when both estimated win rates are 1 (the ratio's
  /// denominator vanishes). Also caps the loss step in general.
  double omega_max = 100.0;
  /// When set, the loss step is pinned to this value instead of being
  /// estimated from counters. 0 disables loss updates entirely.
  std::optional<double> omega_override;

  /// Scale from levels to sample units: a = 128 / z.
  double a_scale() const noexcept { return 128.0 / static_cast<double>(z); }
  /// Stored thresholds are clamped to [-2z, 2z].
  double th_limit() const noexcept { return 2.0 * static_cast<double>(z); }

  /// Throws InvalidArgument on z < 1, alpha outside [0, 1], etc.
  void validate() const;

  friend bool operator==(const TreeParams&, const TreeParams&) = default;
};

/// State of one threshold. `c0`/`c1` count how often bit 0/1 was chosen at
/// this node, `l0`/`l1` how many of those plays were won.
struct TreeNode {
  double th = 0.0;
  std::uint64_t c0 = 0;
  std::uint64_t c1 = 0;
  std::uint64_t l0 = 0;
  std::uint64_t l1 = 0;
  double omega = 1.0;

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Sample spacing, in raw samples. `delta_l` separates the bits of one
/// decision; `delta_s` separates the last bit of one decision from the first
/// bit of the next.
struct SamplingPlan {
  std::size_t delta_s = 5;
  std::size_t delta_l = 10;

  /// Samples spanned by one decision's bits: (depth-1)*delta_l + 1.
  std::size_t decision_span(int depth) const noexcept;
  /// Offset between the first samples of consecutive decisions.
  std::size_t stride(int depth) const noexcept;
  void validate() const;

  friend bool operator==(const SamplingPlan&, const SamplingPlan&) = default;
};

/// One play: the bits D_1..D_M (MSB first), the machine they encode, and the
/// raw-series indices that produced them.
struct DecisionRecord {
  std::vector<std::uint8_t> bits;
  std::uint32_t machine = 0;
  std::vector<std::size_t> sample_indices;
  std::optional<bool> reward;
};

/// Round to the nearest integer with ties toward zero, clamp to [-z, z],
/// and scale by a = 128/z. The result is the value samples are compared to.
double quantize_threshold(const TreeParams& params, double th) noexcept;

/// Win frequency l/c of one side of a node; 0.5 when that side was never
/// chosen.
double estimated_reward_probability(const TreeNode& node, int side);

/// Loss step from the node's counters: S / (2 - S) with S = P0 + P1.
/// Returns omega_max when S reaches 2 and the result is capped there too.
/// Only meaningful when both sides have been chosen at least once.
double omega_from_counts(const TreeNode& node, const TreeParams& params);

/// Binary threshold tree of depth M that maps M samples to one of 2^M
/// machines. Node k on the path of a decision is addressed by the bits
/// already decided (D_1..D_{k-1}); nodes are stored in heap order, so the
/// root is index 0 and the children of i are 2i+1 (bit 0) and 2i+2 (bit 1).
///
/// A decision reads its bits strictly in order and bit k depends only on the
/// prefix and its own sample, so the comparisons can be pipelined.
class ThresholdTree {
 public:
  explicit ThresholdTree(int depth, TreeParams params = {});

  int depth() const noexcept { return depth_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t machine_count() const noexcept { return std::size_t{1} << depth_; }
  const TreeParams& params() const noexcept { return params_; }

  const TreeNode& node(std::size_t index) const { return nodes_.at(index); }
  TreeNode& node(std::size_t index) { return nodes_.at(index); }
  std::span<const TreeNode> nodes() const noexcept { return nodes_; }

  /// Heap index of the node reached by `prefix` (length < depth).
  std::size_t index_of(std::span<const std::uint8_t> prefix) const;
  /// Inverse of index_of, as a bit string ("" for the root).
  static std::string path_of(std::size_t index);

  /// Quantized comparison value of a node.
  double comparison_threshold(std::size_t index) const noexcept {
    return quantize_threshold(params_, nodes_[index].th);
  }

  /// Reads samples start, start+delta_l, ..., start+(M-1)*delta_l. Bit k is 0
  /// when its sample is <= the quantized threshold of the node selected by
  /// the earlier bits, 1 otherwise. Throws SeriesExhausted when the last
  /// index falls outside `samples`. Does not modify the tree.
  DecisionRecord decide(std::span<const Sample> samples, std::size_t start,
                        const SamplingPlan& plan) const;
  DecisionRecord decide(const SignalSeries& series, std::size_t start,
                        const SamplingPlan& plan) const {
    return decide(series.samples(), start, plan);
  }
  /// Allocation-free variant that reuses `out`'s buffers.
  void decide_into(std::span<const Sample> samples, std::size_t start,
                   const SamplingPlan& plan, DecisionRecord& out) const;

  /// Reinforce the decided path: th <- (+delta if D_k = 0 else -delta) +
  /// alpha*th at each node on the path; c and l of the chosen side += 1.
  void update_win(const DecisionRecord& record);
  /// Penalize the decided path: at each node, c of the chosen side += 1,
  /// omega is re-estimated from the counters, then
  /// th <- (-omega if D_k = 0 else +omega) + alpha*th.
  void update_lose(const DecisionRecord& record);
  /// Dispatches on record.reward, which must be set.
  void update(const DecisionRecord& record);

  /// Total plays seen by the tree (c0 + c1 at the root).
  std::uint64_t total_plays() const noexcept { return nodes_[0].c0 + nodes_[0].c1; }

  /// JSON object keyed by path string ("", "0", "1", "00", ...) with fields
  /// th, c0, c1, l0, l1, omega. Keys appear in heap order.
  std::string dump_json(int indent = 2) const;

  friend bool operator==(const ThresholdTree&, const ThresholdTree&) = default;

 private:
  void check_record(const DecisionRecord& record) const;
  void relax(TreeNode& node, double step) const;

  int depth_;
  TreeParams params_;
  std::vector<TreeNode> nodes_;
};

}  // namespace chaosbandit
