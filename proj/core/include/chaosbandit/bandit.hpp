#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace chaosbandit {

/// N = 2^M Bernoulli slot machines.
class BanditProblem {
 public:
  /// Throws InvalidArgument unless N is a power of two >= 2 and every
  /// probability lies in [0, 1]. The best machine is the first argmax.
  explicit BanditProblem(std::vector<double> probabilities, std::uint64_t seed = 0,
                         std::string label = {});

  const std::vector<double>& probabilities() const noexcept { return probs_; }
  std::size_t size() const noexcept { return probs_.size(); }
  /// log2(N): bits per decision.
  int depth() const noexcept { return depth_; }
  std::size_t best_machine() const noexcept { return best_; }
  /// True when more than one machine shares the maximum probability.
  bool has_tied_best() const noexcept;
  std::uint64_t seed() const noexcept { return seed_; }
  const std::string& label() const noexcept { return label_; }

  BanditProblem with_seed(std::uint64_t seed) const;

 private:
  std::vector<double> probs_;
  int depth_ = 0;
  std::size_t best_ = 0;
  std::uint64_t seed_ = 0;
  std::string label_;
};

/// Counter-based reward stream: draw number k for machine m is a pure
/// function of (problem seed, stream id, m, k), so independent streams never
/// share state and replays are exact.
class RewardStream {
 public:
  RewardStream(const BanditProblem& problem, std::uint64_t stream_id = 0);

  /// Bernoulli(P_machine). Throws InvalidArgument on an out-of-range index.
  bool play(std::size_t machine);
  std::uint64_t draws() const noexcept { return counter_; }

 private:
  std::vector<double> probs_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Reference arrangements for N in {2, 4, 8, 16, 32, 64}. N = 2 is (0.9, 0.7);
/// larger N start (0.7, 0.5, 0.9, 0.1) and continue with 0.7/0.5 pairs.
BanditProblem canonical_problem(std::size_t n, std::uint64_t seed = 0);

/// Four-armed Types 1-4, each a permutation of {0.9, 0.7, 0.5, 0.1}:
///   1: (0.7, 0.5, 0.9, 0.1)  best 2 (bits 10)
///   2: (0.9, 0.1, 0.7, 0.5)  best 0 (bits 00)
///   3: (0.7, 0.9, 0.5, 0.1)  best 1 (bits 01)
///   4: (0.7, 0.5, 0.1, 0.9)  best 3 (bits 11)
BanditProblem type_problem(int type, std::uint64_t seed = 0);

/// Comparison of the two halves of one prefix group on the best machine's path.
struct ContradictionLevel {
  int level = 0;           // 1-based bit position
  std::string prefix;      // bits above this level on the best machine's path
  double best_branch_sum = 0.0;
  double other_branch_sum = 0.0;
  /// Best machine sits in the branch with the strictly smaller sum.
  bool contradictory = false;
};

/// One entry per bit level along the best machine's path.
std::vector<ContradictionLevel> check_contradiction(const BanditProblem& problem);

/// JSON problem file: {"probabilities": [...], "seed": <uint>}.
BanditProblem load_problem_json(const std::filesystem::path& path);
std::string problem_to_json(const BanditProblem& problem);

/// Resolves "canonical:<N>", "type:<1-4>", "file:<path>" or an inline list
/// "probs:<p0>,<p1>,...". A seed override replaces the seed stored in a
/// problem file.
BanditProblem parse_problem_ref(const std::string& ref,
                                std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace chaosbandit
