#pragma once

#include <functional>
#include <vector>

#include "lsopt/mcts.hpp"

namespace lsopt::testing {

/// Synthetic environment whose reward is an arbitrary function of the sequence.
class TableEnvironment final : public SearchEnvironment {
public:
  TableEnvironment(int actions, std::size_t length, std::function<double(std::span<const int>)> reward)
      : actions_(actions), length_(length), reward_(std::move(reward)) {}

  int action_count() const override { return actions_; }
  std::size_t recipe_length() const override { return length_; }
  Outcome evaluate(std::span<const int> sequence) override {
    ++evaluations;
    const double r = reward_(sequence);
    return {r, -r, 0, 0};
  }

  std::size_t evaluations = 0;

private:
  int actions_;
  std::size_t length_;
  std::function<double(std::span<const int>)> reward_;
};

/// Two arms, deterministic rewards: `good` pays 1, the other 0. Deeper
/// levels (if any) do not matter.
inline TableEnvironment two_armed_bandit(int good, std::size_t length = 1) {
  return TableEnvironment(2, length, [good](std::span<const int> s) { return s[0] == good ? 1.0 : 0.0; });
}

/// Visit conservation: below the root, Σ_a N at a node equals its arrivals
/// minus the one that created it; terminal nodes never select. Also checks
/// Q = reward_sum / N exactly.
inline bool tree_consistent(const SearchNode& node, std::uint64_t expected_total, std::size_t depth,
                            std::size_t length) {
  if (node.total_visits() != (depth == length ? 0 : expected_total)) return false;
  for (int a = 0; a < node.action_count(); ++a) {
    const auto i = static_cast<std::size_t>(a);
    const auto n = node.visits[i];
    if (n == 0) {
      if (node.reward_sum[i] != 0.0 || node.q[i] != 0.0) return false;
    } else if (node.q[i] != node.reward_sum[i] / n) {
      return false;
    }
    if (node.children[i] && !tree_consistent(*node.children[i], n == 0 ? 0 : n - 1, depth + 1, length)) {
      return false;
    }
  }
  return true;
}

}  // namespace lsopt::testing
