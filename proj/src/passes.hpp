#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lsopt/truth_table.hpp"
#include "network.hpp"

namespace lsopt::detail {

/// Visitation marks reset in O(1) by bumping a generation counter.
class Marks {
public:
  void next(std::size_t size) {
    if (stamp_.size() < size) stamp_.resize(size, 0);
    ++generation_;
  }
  bool test(std::uint32_t n) const { return stamp_[n] == generation_; }
  void set(std::uint32_t n) { stamp_[n] = generation_; }

private:
  std::vector<std::uint32_t> stamp_;
  std::uint32_t generation_ = 0;
};

/// Leaves of a reconvergence-driven cut of `root`, at most `max_leaves`,
/// sorted ascending. Leaves are not expanded more than `max_depth` levels
/// below the root.
std::vector<std::uint32_t> reconvergence_cut(const Network& net, std::uint32_t root,
                                             std::size_t max_leaves, Marks& marks,
                                             std::uint32_t max_depth = UINT32_MAX);

/// Internal nodes between the leaves and the root (root last), topologically ordered.
std::vector<std::uint32_t> collect_cone(const Network& net, std::uint32_t root,
                                        std::span<const std::uint32_t> leaves, Marks& marks);

/// Truth tables of `nodes` (a topologically ordered cone) over the leaves.
/// Returns a table indexed by position in `nodes`.
std::vector<TruthTable> cone_functions(const Network& net, std::span<const std::uint32_t> leaves,
                                       std::span<const std::uint32_t> nodes);

/// Cached resynthesis of small functions (keyed by truth table).
Subgraph synthesize_cached(const TruthTable& f, std::span<const std::uint32_t> leaf_levels);

}  // namespace lsopt::detail
