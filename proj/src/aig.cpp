#include "lsopt/aig.hpp"

#include <algorithm>

namespace lsopt {

namespace {

std::uint64_t pair_key(Lit a, Lit b) {
  return (static_cast<std::uint64_t>(a.raw()) << 32) | b.raw();
}

}  // namespace

AigBuilder::AigBuilder(std::string name) {
  aig_.name_ = std::move(name);
  levels_.push_back(0);
}

Lit AigBuilder::add_input() {
  if (!aig_.fanins_.empty()) {
    throw AigError("inputs must be created before and2 nodes");
  }
  ++aig_.num_inputs_;
  levels_.push_back(0);
  return Lit::make(static_cast<std::uint32_t>(aig_.num_inputs_));
}

Lit AigBuilder::add_and(Lit a, Lit b) {
  const auto limit = static_cast<std::uint32_t>(aig_.num_nodes());
  if (a.node() >= limit || b.node() >= limit) {
    throw AigError("and2 fanin refers to an undefined node");
  }
  if (b < a) std::swap(a, b);
  if (a == Lit::const0()) return a;
  if (a == Lit::const1()) return b;
  if (a == b) return a;
  if (a == !b) return Lit::const0();

  const auto key = pair_key(a, b);
  if (auto it = strash_.find(key); it != strash_.end()) {
    return Lit::make(it->second);
  }
  const auto node = static_cast<std::uint32_t>(aig_.num_nodes());
  aig_.fanins_.emplace_back(a, b);
  levels_.push_back(1 + std::max(levels_[a.node()], levels_[b.node()]));
  strash_.emplace(key, node);
  return Lit::make(node);
}

Lit AigBuilder::add_xor(Lit a, Lit b) {
  return add_or(add_and(a, !b), add_and(!a, b));
}

Lit AigBuilder::add_mux(Lit sel, Lit then_lit, Lit else_lit) {
  return add_or(add_and(sel, then_lit), add_and(!sel, else_lit));
}

void AigBuilder::add_output(Lit lit) {
  if (lit.node() >= aig_.num_nodes()) {
    throw AigError("output refers to an undefined node");
  }
  aig_.outputs_.push_back(lit);
}

Aig AigBuilder::build() && {
  strash_.clear();
  return std::move(aig_);
}

std::vector<std::uint32_t> compute_levels(const Aig& aig) {
  std::vector<std::uint32_t> level(aig.num_nodes(), 0);
  for (auto n = static_cast<std::uint32_t>(aig.num_inputs() + 1); n < aig.num_nodes(); ++n) {
    level[n] = 1 + std::max(level[aig.fanin0(n).node()], level[aig.fanin1(n).node()]);
  }
  return level;
}

std::vector<std::uint32_t> compute_fanouts(const Aig& aig) {
  std::vector<std::uint32_t> fanout(aig.num_nodes(), 0);
  for (auto n = static_cast<std::uint32_t>(aig.num_inputs() + 1); n < aig.num_nodes(); ++n) {
    ++fanout[aig.fanin0(n).node()];
    ++fanout[aig.fanin1(n).node()];
  }
  for (Lit o : aig.outputs()) ++fanout[o.node()];
  return fanout;
}

AigStats stats(const Aig& aig) {
  AigStats s;
  s.node_count = aig.num_ands();
  s.input_count = aig.num_inputs();
  s.output_count = aig.num_outputs();
  const auto level = compute_levels(aig);
  for (Lit o : aig.outputs()) s.depth = std::max(s.depth, level[o.node()]);
  return s;
}

Aig cleanup(const Aig& aig) {
  AigBuilder builder(aig.name());
  std::vector<Lit> map(aig.num_nodes(), Lit::const0());
  for (std::size_t i = 0; i < aig.num_inputs(); ++i) map[i + 1] = builder.add_input();

  // Iterative post-order from the outputs so that only reachable nodes survive.
  std::vector<char> done(aig.num_nodes(), 0);
  for (std::uint32_t n = 0; n <= aig.num_inputs(); ++n) done[n] = 1;
  std::vector<std::uint32_t> stack;
  for (Lit o : aig.outputs()) {
    stack.push_back(o.node());
    while (!stack.empty()) {
      const auto n = stack.back();
      if (done[n]) {
        stack.pop_back();
        continue;
      }
      const auto f0 = aig.fanin0(n).node();
      const auto f1 = aig.fanin1(n).node();
      if (!done[f0]) {
        stack.push_back(f0);
      } else if (!done[f1]) {
        stack.push_back(f1);
      } else {
        const Lit a = map[f0] ^ aig.fanin0(n).complemented();
        const Lit b = map[f1] ^ aig.fanin1(n).complemented();
        map[n] = builder.add_and(a, b);
        done[n] = 1;
        stack.pop_back();
      }
    }
  }
  for (Lit o : aig.outputs()) builder.add_output(map[o.node()] ^ o.complemented());
  return std::move(builder).build();
}

Eigen::MatrixXd node_features(const Aig& aig) {
  const auto n_nodes = static_cast<Eigen::Index>(aig.num_nodes());
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n_nodes, kNodeFeatureCount);
  const auto level = compute_levels(aig);
  const auto fanout = compute_fanouts(aig);
  const double max_level = *std::max_element(level.begin(), level.end());
  const double max_fanout = *std::max_element(fanout.begin(), fanout.end());

  for (std::uint32_t n = 0; n < aig.num_nodes(); ++n) {
    const auto row = static_cast<Eigen::Index>(n);
    switch (aig.kind(n)) {
      case NodeKind::constant: x(row, 0) = 1.0; break;
      case NodeKind::input: x(row, 1) = 1.0; break;
      case NodeKind::and2:
        x(row, 2) = 1.0;
        x(row, 3) = (int(aig.fanin0(n).complemented()) + int(aig.fanin1(n).complemented())) / 2.0;
        break;
    }
    x(row, 4) = max_level > 0 ? level[n] / max_level : 0.0;
    x(row, 5) = max_fanout > 0 ? fanout[n] / max_fanout : 0.0;
  }
  return x;
}

}  // namespace lsopt
