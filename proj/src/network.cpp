#include "network.hpp"

#include <algorithm>

namespace lsopt::detail {

Network::Network(const Aig& aig)
    : num_inputs_(aig.num_inputs()), name_(aig.name()), nodes_(aig.num_nodes()),
      outputs_(aig.outputs().begin(), aig.outputs().end()), leaf_mark_(aig.num_nodes(), 0) {
  for (auto n = static_cast<std::uint32_t>(num_inputs_ + 1); n < aig.num_nodes(); ++n) {
    auto& node = nodes_[n];
    node.fanin[0] = aig.fanin0(n);
    node.fanin[1] = aig.fanin1(n);
    node.level = 1 + std::max(nodes_[node.fanin[0].node()].level, nodes_[node.fanin[1].node()].level);
    for (Lit f : node.fanin) {
      ++nodes_[f.node()].refs;
      nodes_[f.node()].fanouts.push_back(n);
    }
    strash_.emplace(key(node.fanin[0], node.fanin[1]), n);
  }
  for (Lit o : outputs_) ++nodes_[o.node()].refs;
}

std::optional<Lit> Network::lookup(Lit a, Lit b) const {
  if (b < a) std::swap(a, b);
  if (a == Lit::const0()) return a;
  if (a == Lit::const1()) return b;
  if (a == b) return a;
  if (a == !b) return Lit::const0();
  if (auto it = strash_.find(key(a, b)); it != strash_.end()) return Lit::make(it->second);
  return std::nullopt;
}

Lit Network::create_and(Lit a, Lit b) {
  if (auto existing = lookup(a, b)) return *existing;
  if (b < a) std::swap(a, b);
  const auto n = size();
  Node node;
  node.fanin[0] = a;
  node.fanin[1] = b;
  node.level = 1 + std::max(level(a.node()), level(b.node()));
  nodes_.push_back(std::move(node));
  leaf_mark_.push_back(0);
  for (Lit f : {a, b}) {
    ++nodes_[f.node()].refs;
    nodes_[f.node()].fanouts.push_back(n);
  }
  strash_.emplace(key(a, b), n);
  return Lit::make(n);
}

void Network::mark_leaves(std::span<const std::uint32_t> leaves) {
  for (auto l : leaves) leaf_mark_[l] = 1;
}

void Network::unmark_leaves(std::span<const std::uint32_t> leaves) {
  for (auto l : leaves) leaf_mark_[l] = 0;
}

std::vector<std::uint32_t> Network::deref_cone(std::uint32_t n, std::span<const std::uint32_t> leaves) {
  mark_leaves(leaves);
  std::vector<std::uint32_t> freed{n};
  for (std::size_t i = 0; i < freed.size(); ++i) {
    const auto x = freed[i];
    for (Lit f : nodes_[x].fanin) {
      const auto v = f.node();
      if (!is_and(v) || leaf_mark_[v]) continue;
      if (--nodes_[v].refs == 0) freed.push_back(v);
    }
  }
  unmark_leaves(leaves);
  return freed;
}

void Network::ref_cone(std::uint32_t n, std::span<const std::uint32_t> leaves) {
  mark_leaves(leaves);
  std::vector<std::uint32_t> stack{n};
  while (!stack.empty()) {
    const auto x = stack.back();
    stack.pop_back();
    for (Lit f : nodes_[x].fanin) {
      const auto v = f.node();
      if (!is_and(v) || leaf_mark_[v]) continue;
      if (nodes_[v].refs++ == 0) stack.push_back(v);
    }
  }
  unmark_leaves(leaves);
}

Network::Cost Network::evaluate(const Subgraph& g, std::span<const Lit> leaves) const {
  Cost cost;
  const std::size_t total = 1 + g.num_leaves + g.gates.size();
  std::vector<std::optional<Lit>> lit(total);
  std::vector<std::uint32_t> lvl(total, 0);
  lit[0] = Lit::const0();
  for (unsigned i = 0; i < g.num_leaves; ++i) {
    lit[i + 1] = leaves[i];
    lvl[i + 1] = level(leaves[i].node());
  }
  auto resolve = [&](Lit sub) -> std::optional<Lit> {
    if (!lit[sub.node()]) return std::nullopt;
    return *lit[sub.node()] ^ sub.complemented();
  };
  for (std::size_t i = 0; i < g.gates.size(); ++i) {
    const auto idx = 1 + g.num_leaves + i;
    const auto [sa, sb] = g.gates[i];
    const auto a = resolve(sa);
    const auto b = resolve(sb);
    lvl[idx] = 1 + std::max(lvl[sa.node()], lvl[sb.node()]);
    if (a && b) {
      if (auto found = lookup(*a, *b)) {
        lit[idx] = *found;
        const auto m = found->node();
        lvl[idx] = level(m);
        if (is_and(m) && nodes_[m].refs == 0) ++cost.added;
        continue;
      }
    }
    ++cost.added;
  }
  cost.level = lvl[g.output.node()];
  cost.existing = resolve(g.output);
  return cost;
}

Lit Network::instantiate(const Subgraph& g, std::span<const Lit> leaves) {
  std::vector<Lit> lit;
  lit.reserve(1 + g.num_leaves + g.gates.size());
  lit.push_back(Lit::const0());
  for (unsigned i = 0; i < g.num_leaves; ++i) lit.push_back(leaves[i]);
  auto resolve = [&](Lit sub) { return lit[sub.node()] ^ sub.complemented(); };
  for (const auto& [a, b] : g.gates) lit.push_back(create_and(resolve(a), resolve(b)));
  return resolve(g.output);
}

void Network::kill(std::uint32_t root) {
  std::vector<std::uint32_t> stack{root};
  while (!stack.empty()) {
    const auto n = stack.back();
    stack.pop_back();
    auto& node = nodes_[n];
    node.dead = true;
    if (auto it = strash_.find(key(node.fanin[0], node.fanin[1])); it != strash_.end() && it->second == n) {
      strash_.erase(it);
    }
    for (Lit f : node.fanin) {
      const auto v = f.node();
      if (--nodes_[v].refs == 0 && is_and(v) && !nodes_[v].dead) stack.push_back(v);
    }
  }
}

void Network::replace(std::uint32_t n, Lit r) {
  auto fanouts = std::move(nodes_[n].fanouts);
  nodes_[n].fanouts.clear();
  for (auto f : fanouts) {
    auto& node = nodes_[f];
    if (node.dead || (node.fanin[0].node() != n && node.fanin[1].node() != n)) continue;
    if (auto it = strash_.find(key(node.fanin[0], node.fanin[1])); it != strash_.end() && it->second == f) {
      strash_.erase(it);
    }
    for (Lit& fanin : node.fanin) {
      if (fanin.node() != n) continue;
      fanin = r ^ fanin.complemented();
      ++nodes_[r.node()].refs;
      --nodes_[n].refs;
    }
    if (node.fanin[1] < node.fanin[0]) std::swap(node.fanin[0], node.fanin[1]);
    nodes_[r.node()].fanouts.push_back(f);
    const Lit a = node.fanin[0], b = node.fanin[1];
    const bool trivial = a.is_const() || a.node() == b.node();
    if (!trivial) strash_.emplace(key(a, b), f);
  }
  for (Lit& o : outputs_) {
    if (o.node() != n) continue;
    o = r ^ o.complemented();
    ++nodes_[r.node()].refs;
    --nodes_[n].refs;
  }
  if (nodes_[n].refs == 0) kill(n);
}

Aig Network::to_aig() const {
  AigBuilder builder(name_);
  std::vector<Lit> map(nodes_.size(), Lit::const0());
  std::vector<char> done(nodes_.size(), 0);
  done[0] = 1;
  for (std::size_t i = 0; i < num_inputs_; ++i) {
    map[i + 1] = builder.add_input();
    done[i + 1] = 1;
  }
  std::vector<std::uint32_t> stack;
  for (Lit o : outputs_) {
    stack.push_back(o.node());
    while (!stack.empty()) {
      const auto n = stack.back();
      if (done[n]) {
        stack.pop_back();
        continue;
      }
      const Lit f0 = nodes_[n].fanin[0], f1 = nodes_[n].fanin[1];
      if (!done[f0.node()]) {
        stack.push_back(f0.node());
      } else if (!done[f1.node()]) {
        stack.push_back(f1.node());
      } else {
        map[n] = builder.add_and(map[f0.node()] ^ f0.complemented(), map[f1.node()] ^ f1.complemented());
        done[n] = 1;
        stack.pop_back();
      }
    }
  }
  for (Lit o : outputs_) builder.add_output(map[o.node()] ^ o.complemented());
  return std::move(builder).build();
}

}  // namespace lsopt::detail
