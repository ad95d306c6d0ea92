#include <algorithm>
#include <array>
#include <optional>

#include "lsopt/transforms.hpp"
#include "passes.hpp"

namespace lsopt {

namespace {

using detail::Network;

constexpr std::size_t kCutSize = 4;
constexpr std::size_t kCutsPerNode = 8;
constexpr std::uint16_t kVarTable[4] = {0xaaaa, 0xcccc, 0xf0f0, 0xff00};

struct Cut {
  std::array<std::uint32_t, kCutSize> leaves{};
  std::uint8_t size = 0;
  std::uint16_t table = 0;  ///< function of the cut root over its leaves

  bool operator==(const Cut& o) const {
    return size == o.size && std::equal(leaves.begin(), leaves.begin() + size, o.leaves.begin());
  }
  bool contains(const Cut& o) const {
    return std::includes(leaves.begin(), leaves.begin() + size, o.leaves.begin(), o.leaves.begin() + o.size);
  }
};

// Re-expresses `table` (over c.leaves) over the leaves of `target`.
std::uint16_t expand(const Cut& c, std::uint16_t table, const Cut& target) {
  std::array<int, kCutSize> position{};
  for (std::size_t i = 0, j = 0; i < c.size; ++i) {
    while (target.leaves[j] != c.leaves[i]) ++j;
    position[i] = static_cast<int>(j);
  }
  std::uint16_t out = 0;
  for (unsigned m = 0; m < 16; ++m) {
    unsigned local = 0;
    for (std::size_t i = 0; i < c.size; ++i) local |= ((m >> position[i]) & 1u) << i;
    if ((table >> local) & 1u) out |= static_cast<std::uint16_t>(1u << m);
  }
  return out;
}

std::optional<Cut> merge(const Cut& a, const Cut& b) {
  Cut out;
  std::size_t i = 0, j = 0;
  while (i < a.size || j < b.size) {
    std::uint32_t next;
    if (j >= b.size || (i < a.size && a.leaves[i] < b.leaves[j])) {
      next = a.leaves[i++];
    } else if (i >= a.size || b.leaves[j] < a.leaves[i]) {
      next = b.leaves[j++];
    } else {
      next = a.leaves[i++];
      ++j;
    }
    if (out.size == kCutSize) return std::nullopt;
    out.leaves[out.size++] = next;
  }
  return out;
}

// Priority cuts computed lazily against the current network state.
class CutManager {
public:
  explicit CutManager(const Network& net) : net_(net) {}

  const std::vector<Cut>& cuts(std::uint32_t root) {
    std::vector<std::uint32_t> stack{root};
    while (!stack.empty()) {
      const auto n = stack.back();
      ensure(n);
      if (done_[n]) {
        stack.pop_back();
        continue;
      }
      if (!net_.is_and(n)) {
        compute_leaf(n);
        stack.pop_back();
        continue;
      }
      const auto a = net_.fanin0(n).node(), b = net_.fanin1(n).node();
      ensure(std::max(a, b));
      if (!done_[a]) {
        stack.push_back(a);
      } else if (!done_[b]) {
        stack.push_back(b);
      } else {
        compute_and(n);
        stack.pop_back();
      }
    }
    return cuts_[root];
  }

private:
  void ensure(std::uint32_t n) {
    if (cuts_.size() <= n) {
      cuts_.resize(net_.size());
      done_.resize(net_.size(), 0);
    }
  }

  void compute_leaf(std::uint32_t n) {
    Cut c;
    if (n != 0) {
      c.leaves[0] = n;
      c.size = 1;
      c.table = kVarTable[0];
    }
    cuts_[n] = {c};
    done_[n] = 1;
  }

  void compute_and(std::uint32_t n) {
    const Lit f0 = net_.fanin0(n), f1 = net_.fanin1(n);
    std::vector<Cut> result;
    for (const auto& c0 : cuts_[f0.node()]) {
      for (const auto& c1 : cuts_[f1.node()]) {
        auto merged = merge(c0, c1);
        if (!merged) continue;
        std::uint16_t t0 = expand(c0, c0.table, *merged);
        std::uint16_t t1 = expand(c1, c1.table, *merged);
        if (f0.complemented()) t0 = static_cast<std::uint16_t>(~t0);
        if (f1.complemented()) t1 = static_cast<std::uint16_t>(~t1);
        merged->table = t0 & t1;
        if (std::find(result.begin(), result.end(), *merged) == result.end()) result.push_back(*merged);
      }
    }
    // Drop dominated cuts (strict supersets of another cut).
    std::vector<Cut> kept;
    for (const auto& c : result) {
      const bool dominated = std::any_of(result.begin(), result.end(), [&](const Cut& o) {
        return o.size < c.size && c.contains(o);
      });
      if (!dominated) kept.push_back(c);
    }
    std::stable_sort(kept.begin(), kept.end(), [](const Cut& a, const Cut& b) {
      if (a.size != b.size) return a.size < b.size;
      return std::lexicographical_compare(a.leaves.begin(), a.leaves.begin() + a.size, b.leaves.begin(),
                                          b.leaves.begin() + b.size);
    });
    if (kept.size() > kCutsPerNode) kept.resize(kCutsPerNode);
    Cut trivial;
    trivial.leaves[0] = n;
    trivial.size = 1;
    trivial.table = kVarTable[0];
    kept.push_back(trivial);
    cuts_[n] = std::move(kept);
    done_[n] = 1;
  }

  const Network& net_;
  std::vector<std::vector<Cut>> cuts_;
  std::vector<char> done_;
};

struct Candidate {
  int gain = 0;
  Subgraph graph;
  std::vector<Lit> leaves;
};

}  // namespace

Aig rewrite(const Aig& aig, bool zero_cost) {
  Network net(aig);
  CutManager cut_manager(net);
  const int threshold = zero_cost ? 0 : 1;
  const auto original_size = net.size();

  for (auto n = static_cast<std::uint32_t>(net.num_inputs() + 1); n < original_size; ++n) {
    if (net.is_dead(n)) continue;
    const std::vector<Cut> cuts = cut_manager.cuts(n);
    std::optional<Candidate> best;
    for (const auto& cut : cuts) {
      if (cut.size == 1 && cut.leaves[0] == n) continue;
      std::vector<std::uint32_t> leaf_nodes(cut.leaves.begin(), cut.leaves.begin() + cut.size);
      std::vector<std::uint32_t> leaf_levels;
      std::vector<Lit> leaf_lits;
      for (auto l : leaf_nodes) {
        leaf_levels.push_back(net.level(l));
        leaf_lits.push_back(Lit::make(l));
      }
      const auto graph = detail::synthesize_cached(TruthTable::from_word(cut.size, cut.table), leaf_levels);

      const auto freed = static_cast<int>(net.deref_cone(n, leaf_nodes).size());
      const auto cost = net.evaluate(graph, leaf_lits);
      net.ref_cone(n, leaf_nodes);

      if (cost.existing && cost.existing->node() == n) continue;
      if (cost.level > net.level(n)) continue;
      const int gain = freed - cost.added;
      if (gain < threshold) continue;
      if (!best || gain > best->gain) best = Candidate{gain, graph, leaf_lits};
    }
    if (!best) continue;
    const Lit replacement = net.instantiate(best->graph, best->leaves);
    if (replacement.node() == n) continue;
    net.replace(n, replacement);
  }
  return net.to_aig();
}

}  // namespace lsopt
