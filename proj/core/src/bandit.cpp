#include "chaosbandit/bandit.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include "chaosbandit/error.hpp"
#include "json.hpp"

namespace chaosbandit {

namespace {

std::uint64_t mix64(std::uint64_t x) noexcept {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_interval(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;  // [0, 1)
}

std::vector<double> canonical_pattern(std::size_t n) {
  std::vector<double> p = {0.7, 0.5, 0.9, 0.1};
  while (p.size() < n) {
    p.push_back(0.7);
    p.push_back(0.5);
  }
  return p;
}

}  // namespace

BanditProblem::BanditProblem(std::vector<double> probabilities, std::uint64_t seed,
                             std::string label)
    : probs_(std::move(probabilities)), seed_(seed), label_(std::move(label)) {
  const std::size_t n = probs_.size();
  if (n < 2 || !std::has_single_bit(n))
    throw InvalidArgument("number of machines must be a power of two >= 2, got " +
                          std::to_string(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (!(probs_[i] >= 0.0 && probs_[i] <= 1.0))
      throw InvalidArgument("reward probability of machine " + std::to_string(i) +
                            " outside [0, 1]");
  }
  depth_ = std::countr_zero(n);
  best_ = static_cast<std::size_t>(
      std::distance(probs_.begin(), std::max_element(probs_.begin(), probs_.end())));
}

bool BanditProblem::has_tied_best() const noexcept {
  return std::count(probs_.begin(), probs_.end(), probs_[best_]) > 1;
}

BanditProblem BanditProblem::with_seed(std::uint64_t seed) const {
  return BanditProblem(probs_, seed, label_);
}

RewardStream::RewardStream(const BanditProblem& problem, std::uint64_t stream_id)
    : probs_(problem.probabilities()),
      key_(mix64(problem.seed() ^ mix64(stream_id ^ 0x5bd1e9955bd1e995ULL))) {}

bool RewardStream::play(std::size_t machine) {
  if (machine >= probs_.size())
    throw InvalidArgument("machine " + std::to_string(machine) + " out of range [0, " +
                          std::to_string(probs_.size()) + ")");
  const std::uint64_t k = counter_++;
  const double u = unit_interval(mix64(key_ ^ mix64(k * 0x100000001b3ULL + machine)));
  return u < probs_[machine];
}

BanditProblem canonical_problem(std::size_t n, std::uint64_t seed) {
  switch (n) {
    case 2:
      return BanditProblem({0.9, 0.7}, seed, "canonical:2");
    case 4:
    case 8:
    case 16:
    case 32:
    case 64: {
      auto p = canonical_pattern(n);
      p.resize(n);
      return BanditProblem(std::move(p), seed, "canonical:" + std::to_string(n));
    }
    default:
      throw InvalidArgument("no canonical problem for N = " + std::to_string(n) +
                            " (supported: 2, 4, 8, 16, 32, 64)");
  }
}

BanditProblem type_problem(int type, std::uint64_t seed) {
  const std::string label = "type:" + std::to_string(type);
  switch (type) {
    case 1: return BanditProblem({0.7, 0.5, 0.9, 0.1}, seed, label);
    case 2: return BanditProblem({0.9, 0.1, 0.7, 0.5}, seed, label);
    case 3: return BanditProblem({0.7, 0.9, 0.5, 0.1}, seed, label);
    case 4: return BanditProblem({0.7, 0.5, 0.1, 0.9}, seed, label);
    default: throw InvalidArgument("problem type must be 1-4, got " + std::to_string(type));
  }
}

std::vector<ContradictionLevel> check_contradiction(const BanditProblem& problem) {
  const auto& p = problem.probabilities();
  const int depth = problem.depth();
  const std::size_t best = problem.best_machine();
  std::vector<ContradictionLevel> out;
  for (int level = 1; level <= depth; ++level) {
    // Group = machines sharing the best machine's top (level-1) bits; it
    // splits into halves by bit `level`.
    const int low_bits = depth - level;
    const std::size_t half = std::size_t{1} << low_bits;
    const std::size_t group_start = (best >> (low_bits + 1)) << (low_bits + 1);
    const bool best_in_upper = ((best >> low_bits) & 1U) != 0;

    double lower = 0.0, upper = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
      lower += p[group_start + i];
      upper += p[group_start + half + i];
    }
    ContradictionLevel c;
    c.level = level;
    for (int b = depth - 1; b > low_bits; --b) c.prefix.push_back(((best >> b) & 1U) ? '1' : '0');
    c.best_branch_sum = best_in_upper ? upper : lower;
    c.other_branch_sum = best_in_upper ? lower : upper;
    c.contradictory = c.best_branch_sum < c.other_branch_sum;
    out.push_back(std::move(c));
  }
  return out;
}

BanditProblem load_problem_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open problem file: " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed problem file " + path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("probabilities") || !doc["probabilities"].is_array())
    throw IoError("problem file " + path.string() + " lacks a \"probabilities\" array");
  std::vector<double> probs;
  for (const auto& v : doc["probabilities"]) {
    if (!v.is_number()) throw IoError("non-numeric probability in " + path.string());
    probs.push_back(v.get<double>());
  }
  std::uint64_t seed = 0;
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer())
      throw IoError("\"seed\" must be an unsigned integer in " + path.string());
    seed = doc["seed"].get<std::uint64_t>();
  }
  return BanditProblem(std::move(probs), seed, "file:" + path.filename().string());
}

std::string problem_to_json(const BanditProblem& problem) {
  nlohmann::ordered_json doc;
  doc["probabilities"] = problem.probabilities();
  doc["seed"] = problem.seed();
  return doc.dump(2) + "\n";
}

BanditProblem parse_problem_ref(const std::string& ref, std::optional<std::uint64_t> seed) {
  const auto colon = ref.find(':');
  if (colon == std::string::npos)
    throw InvalidArgument(
        "problem reference must be canonical:<N>, type:<1-4>, file:<path> or probs:<p0>,<p1>,...");
  const std::string kind = ref.substr(0, colon);
  const std::string arg = ref.substr(colon + 1);
  auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty())
      throw InvalidArgument("bad number in problem reference '" + ref + "'");
    return v;
  };
  if (kind == "canonical") {
    const long n = to_int(arg);
    if (n < 0) throw InvalidArgument("bad arm count in '" + ref + "'");
    return canonical_problem(static_cast<std::size_t>(n), seed.value_or(0));
  }
  if (kind == "type") return type_problem(static_cast<int>(to_int(arg)), seed.value_or(0));
  if (kind == "probs") {
    std::vector<double> probs;
    std::stringstream ss(arg);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != item.size())
        throw InvalidArgument("bad probability '" + item + "' in '" + ref + "'");
      probs.push_back(v);
    }
    return BanditProblem(std::move(probs), seed.value_or(0), ref);
  }
  if (kind == "file") {
    auto p = load_problem_json(arg);
    return seed ? p.with_seed(*seed) : p;
  }
  throw InvalidArgument("unknown problem kind '" + kind + "'");
}

}  // namespace chaosbandit
