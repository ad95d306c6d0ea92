#include "passes.hpp"

#include <algorithm>
#include <map>

namespace lsopt::detail {

std::vector<std::uint32_t> reconvergence_cut(const Network& net, std::uint32_t root,
                                             std::size_t max_leaves, Marks& marks,
                                             std::uint32_t max_depth) {
  marks.next(net.size());
  marks.set(root);
  std::vector<std::uint32_t> leaves;
  for (Lit f : {net.fanin0(root), net.fanin1(root)}) {
    const auto v = f.node();
    if (v == 0 || marks.test(v)) continue;
    marks.set(v);
    leaves.push_back(v);
  }
  const std::uint32_t root_level = net.level(root);

  while (true) {
    int best = -1;
    int best_cost = 0;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      const auto l = leaves[i];
      if (!net.is_and(l)) continue;
      if (root_level - std::min(root_level, net.level(l)) >= max_depth) continue;
      int cost = -1;
      const auto a = net.fanin0(l).node(), b = net.fanin1(l).node();
      if (a != 0 && !marks.test(a)) ++cost;
      if (b != 0 && b != a && !marks.test(b)) ++cost;
      const bool better = best < 0 || cost < best_cost ||
                          (cost == best_cost && net.level(l) > net.level(leaves[best]));
      if (better) {
        best = static_cast<int>(i);
        best_cost = cost;
      }
    }
    if (best < 0 || static_cast<int>(leaves.size()) + best_cost > static_cast<int>(max_leaves)) break;
    const auto l = leaves[best];
    leaves.erase(leaves.begin() + best);
    for (Lit f : {net.fanin0(l), net.fanin1(l)}) {
      const auto v = f.node();
      if (v == 0 || marks.test(v)) continue;
      marks.set(v);
      leaves.push_back(v);
    }
  }
  std::sort(leaves.begin(), leaves.end());
  return leaves;
}

std::vector<std::uint32_t> collect_cone(const Network& net, std::uint32_t root,
                                        std::span<const std::uint32_t> leaves, Marks& marks) {
  marks.next(net.size());
  marks.set(0);
  for (auto l : leaves) marks.set(l);
  std::vector<std::uint32_t> order;
  std::vector<std::pair<std::uint32_t, int>> stack{{root, 0}};
  marks.set(root);
  while (!stack.empty()) {
    auto& [n, state] = stack.back();
    if (state < 2) {
      const Lit f = state == 0 ? net.fanin0(n) : net.fanin1(n);
      ++state;
      const auto v = f.node();
      if (!marks.test(v)) {
        marks.set(v);
        stack.emplace_back(v, 0);
      }
      continue;
    }
    order.push_back(n);
    stack.pop_back();
  }
  return order;
}

std::vector<TruthTable> cone_functions(const Network& net, std::span<const std::uint32_t> leaves,
                                       std::span<const std::uint32_t> nodes) {
  const auto k = static_cast<unsigned>(leaves.size());
  std::map<std::uint32_t, std::size_t> index;
  std::vector<TruthTable> table;
  table.reserve(leaves.size() + nodes.size());
  for (unsigned i = 0; i < k; ++i) {
    index[leaves[i]] = table.size();
    table.push_back(TruthTable::nth_var(k, i));
  }
  auto value = [&](Lit f) {
    if (f.node() == 0) return TruthTable::constant(k, f.complemented());
    const auto& t = table[index.at(f.node())];
    return f.complemented() ? ~t : t;
  };
  for (auto n : nodes) {
    auto t = value(net.fanin0(n)) & value(net.fanin1(n));
    index[n] = table.size();
    table.push_back(std::move(t));
  }
  return {table.begin() + k, table.end()};
}

Subgraph synthesize_cached(const TruthTable& f, std::span<const std::uint32_t> leaf_levels) {
  thread_local std::map<std::pair<unsigned, std::vector<std::uint64_t>>, FactoredCovers> cache;
  if (cache.size() > 200000) cache.clear();
  std::pair<unsigned, std::vector<std::uint64_t>> key{f.num_vars(), {f.words().begin(), f.words().end()}};
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(std::move(key), factor_both(f)).first;
  return synthesize(it->second, leaf_levels);
}

}  // namespace lsopt::detail
