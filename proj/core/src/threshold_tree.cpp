#include "chaosbandit/threshold_tree.hpp"

#include <algorithm>
#include <cmath>

#include "chaosbandit/error.hpp"
#include "json.hpp"

namespace chaosbandit {

namespace {
constexpr int kMaxDepth = 20;
}

void TreeParams::validate() const {
  if (z < 1) throw InvalidArgument("z must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in [0, 1]");
  if (!std::isfinite(delta) || delta < 0.0) throw InvalidArgument("delta must be >= 0");
  if (!(omega_max > 0.0)) throw InvalidArgument("omega_max must be > 0");
  if (omega_override && !(*omega_override >= 0.0))
    throw InvalidArgument("omega override must be >= 0");
}

std::size_t SamplingPlan::decision_span(int depth) const noexcept {
  return static_cast<std::size_t>(depth - 1) * delta_l + 1;
}

std::size_t SamplingPlan::stride(int depth) const noexcept {
  return static_cast<std::size_t>(depth - 1) * delta_l + delta_s;
}

void SamplingPlan::validate() const {
  if (delta_s < 1) throw InvalidArgument("inter-decision interval must be >= 1 sample");
}

double quantize_threshold(const TreeParams& params, double th) noexcept {
  const double z = static_cast<double>(params.z);
  // Nearest integer, ties toward zero: 2.5 -> 2, -2.5 -> -2, 2.6 -> 3.
  double level = std::copysign(std::ceil(std::abs(th) - 0.5), th);
  if (std::isnan(level)) level = 0.0;
  level = std::clamp(level, -z, z);
  return params.a_scale() * level + 0.0;  // +0.0 folds -0 into 0
}

double estimated_reward_probability(const TreeNode& node, int side) {
  if (side != 0 && side != 1) throw InvalidArgument("side must be 0 or 1");
  const auto c = side == 0 ? node.c0 : node.c1;
  const auto l = side == 0 ? node.l0 : node.l1;
  if (c == 0) return 0.5;
  return static_cast<double>(l) / static_cast<double>(c);
}

double omega_from_counts(const TreeNode& node, const TreeParams& params) {
  const double sum = estimated_reward_probability(node, 0) +
                     estimated_reward_probability(node, 1);
  const double denom = 2.0 - sum;
  if (denom <= 0.0) return params.omega_max;
  return std::min(sum / denom, params.omega_max);
}

ThresholdTree::ThresholdTree(int depth, TreeParams params)
    : depth_(depth), params_(std::move(params)) {
  if (depth < 1 || depth > kMaxDepth)
    throw InvalidArgument("tree depth must lie in [1, " + std::to_string(kMaxDepth) + "]");
  params_.validate();
  nodes_.resize((std::size_t{1} << depth) - 1);
}

std::size_t ThresholdTree::index_of(std::span<const std::uint8_t> prefix) const {
  if (prefix.size() >= static_cast<std::size_t>(depth_))
    throw InvalidArgument("prefix longer than depth - 1");
  std::size_t index = 0;
  for (auto bit : prefix) {
    if (bit > 1) throw InvalidArgument("prefix bits must be 0 or 1");
    index = 2 * index + 1 + bit;
  }
  return index;
}

std::string ThresholdTree::path_of(std::size_t index) {
  std::string path;
  while (index > 0) {
    const std::size_t parent = (index - 1) / 2;
    path.push_back(index == 2 * parent + 1 ? '0' : '1');
    index = parent;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

void ThresholdTree::decide_into(std::span<const Sample> samples, std::size_t start,
                                const SamplingPlan& plan, DecisionRecord& out) const {
  const std::size_t last = start + plan.decision_span(depth_) - 1;
  if (last >= samples.size())
    throw SeriesExhausted("decision needs sample " + std::to_string(last) +
                          " but the series has " + std::to_string(samples.size()));
  out.bits.resize(static_cast<std::size_t>(depth_));
  out.sample_indices.resize(static_cast<std::size_t>(depth_));
  out.reward.reset();

  std::size_t node = 0;
  std::uint32_t machine = 0;
  for (int k = 0; k < depth_; ++k) {
    const std::size_t idx = start + static_cast<std::size_t>(k) * plan.delta_l;
    const std::uint8_t bit = samples[idx] <= comparison_threshold(node) ? 0 : 1;
    out.bits[static_cast<std::size_t>(k)] = bit;
    out.sample_indices[static_cast<std::size_t>(k)] = idx;
    machine = (machine << 1) | bit;
    node = 2 * node + 1 + bit;
  }
  out.machine = machine;
}

DecisionRecord ThresholdTree::decide(std::span<const Sample> samples, std::size_t start,
                                     const SamplingPlan& plan) const {
  DecisionRecord record;
  decide_into(samples, start, plan, record);
  return record;
}

void ThresholdTree::check_record(const DecisionRecord& record) const {
  if (record.bits.size() != static_cast<std::size_t>(depth_))
    throw InvalidArgument("decision record has " + std::to_string(record.bits.size()) +
                          " bits, tree depth is " + std::to_string(depth_));
}

void ThresholdTree::relax(TreeNode& node, double step) const {
  const double limit = params_.th_limit();
  node.th = std::clamp(step + params_.alpha * node.th, -limit, limit);
}

void ThresholdTree::update_win(const DecisionRecord& record) {
  check_record(record);
  std::size_t index = 0;
  for (auto bit : record.bits) {
    TreeNode& n = nodes_[index];
    if (bit == 0) {
      ++n.c0;
      ++n.l0;
    } else {
      ++n.c1;
      ++n.l1;
    }
    relax(n, bit == 0 ? params_.delta : -params_.delta);
    index = 2 * index + 1 + bit;
  }
}

void ThresholdTree::update_lose(const DecisionRecord& record) {
  check_record(record);
  std::size_t index = 0;
  for (auto bit : record.bits) {
    TreeNode& n = nodes_[index];
    if (bit == 0) {
      ++n.c0;
    } else {
      ++n.c1;
    }
    if (params_.omega_override) {
      n.omega = *params_.omega_override;
    } else if (n.c0 > 0 && n.c1 > 0) {
      n.omega = omega_from_counts(n, params_);
    }
    relax(n, bit == 0 ? -n.omega : n.omega);
    index = 2 * index + 1 + bit;
  }
}

void ThresholdTree::update(const DecisionRecord& record) {
  if (!record.reward) throw InvalidArgument("decision record has no reward outcome");
  if (*record.reward) {
    update_win(record);
  } else {
    update_lose(record);
  }
}

std::string ThresholdTree::dump_json(int indent) const {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const TreeNode& n = nodes_[i];
    doc[path_of(i)] = {{"th", n.th},     {"c0", n.c0}, {"c1", n.c1},
                       {"l0", n.l0},     {"l1", n.l1}, {"omega", n.omega}};
  }
  return doc.dump(indent) + "\n";
}

}  // namespace chaosbandit
