#include "lsopt/resynthesis.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <queue>

namespace lsopt {

int FactoredForm::literal_count() const {
  int count = 0;
  for (const auto& n : nodes) count += n.kind == Kind::literal ? 1 : 0;
  return count;
}

namespace {

using Kind = FactoredForm::Kind;

class Factorizer {
public:
  explicit Factorizer(FactoredForm& form) : form_(form) {}

  int run(std::vector<Cube> cubes) {
    if (cubes.empty()) return add({Kind::const0, 0, false, {}});
    for (const auto& c : cubes) {
      if (c.pos == 0 && c.neg == 0) return add({Kind::const1, 0, false, {}});
    }
    if (cubes.size() == 1) return cube_node(cubes.front());

    // Most frequent literal; lowest variable and positive polarity win ties.
    int best_count = 0;
    unsigned best_var = 0;
    bool best_neg = false;
    for (unsigned v = 0; v < 32; ++v) {
      for (bool neg : {false, true}) {
        int count = 0;
        for (const auto& c : cubes) count += ((neg ? c.neg : c.pos) >> v) & 1u;
        if (count > best_count) {
          best_count = count;
          best_var = v;
          best_neg = neg;
        }
      }
    }
    if (best_count <= 1) {
      std::vector<int> terms;
      for (const auto& c : cubes) terms.push_back(cube_node(c));
      return op(Kind::or_op, std::move(terms));
    }

    std::vector<Cube> quotient, remainder;
    const std::uint32_t bit = 1u << best_var;
    for (auto c : cubes) {
      std::uint32_t& field = best_neg ? c.neg : c.pos;
      if (field & bit) {
        field &= ~bit;
        quotient.push_back(c);
      } else {
        remainder.push_back(c);
      }
    }
    const int lit = literal(best_var, best_neg);
    const int product = op(Kind::and_op, {lit, run(std::move(quotient))});
    if (remainder.empty()) return product;
    return op(Kind::or_op, {product, run(std::move(remainder))});
  }

private:
  int add(FactoredForm::Node node) {
    form_.nodes.push_back(std::move(node));
    return static_cast<int>(form_.nodes.size() - 1);
  }

  int literal(unsigned var, bool neg) { return add({Kind::literal, var, neg, {}}); }

  int cube_node(const Cube& c) {
    std::vector<int> lits;
    for (unsigned v = 0; v < 32; ++v) {
      if (c.pos & (1u << v)) lits.push_back(literal(v, false));
      if (c.neg & (1u << v)) lits.push_back(literal(v, true));
    }
    if (lits.size() == 1) return lits.front();
    return op(Kind::and_op, std::move(lits));
  }

  // Builds an n-ary node, flattening children of the same kind.
  int op(Kind kind, std::vector<int> children) {
    std::vector<int> flat;
    for (int c : children) {
      if (form_.nodes[c].kind == Kind::const1 && kind == Kind::and_op) continue;
      if (form_.nodes[c].kind == kind) {
        const auto grand = form_.nodes[c].children;
        flat.insert(flat.end(), grand.begin(), grand.end());
      } else {
        flat.push_back(c);
      }
    }
    if (flat.size() == 1) return flat.front();
    return add({kind, 0, false, std::move(flat)});
  }

  FactoredForm& form_;
};

class SubgraphBuilder {
public:
  SubgraphBuilder(std::span<const std::uint32_t> leaf_levels) {
    graph_.num_leaves = static_cast<unsigned>(leaf_levels.size());
    levels_.push_back(0);
    levels_.insert(levels_.end(), leaf_levels.begin(), leaf_levels.end());
  }

  Lit and2(Lit a, Lit b) {
    if (b < a) std::swap(a, b);
    if (a == Lit::const0()) return a;
    if (a == Lit::const1()) return b;
    if (a == b) return a;
    if (a == !b) return Lit::const0();
    if (auto it = strash_.find({a.raw(), b.raw()}); it != strash_.end()) return Lit::make(it->second);
    const auto node = static_cast<std::uint32_t>(levels_.size());
    graph_.gates.emplace_back(a, b);
    levels_.push_back(1 + std::max(level(a), level(b)));
    strash_.emplace(std::make_pair(a.raw(), b.raw()), node);
    return Lit::make(node);
  }

  std::uint32_t level(Lit l) const { return levels_[l.node()]; }

  Lit build(const FactoredForm& form, int index) {
    const auto& n = form.nodes[index];
    switch (n.kind) {
      case Kind::const0: return Lit::const0();
      case Kind::const1: return Lit::const1();
      case Kind::literal: return Lit::make(n.var + 1, n.negated);
      case Kind::and_op:
      case Kind::or_op: {
        const bool is_or = n.kind == Kind::or_op;
        std::vector<Lit> operands;
        for (int c : n.children) operands.push_back(build(form, c) ^ is_or);
        return balanced_and(operands) ^ is_or;
      }
    }
    return Lit::const0();
  }

  Subgraph finish(Lit output) && {
    graph_.output = output;
    return std::move(graph_);
  }

private:
  // Combines the two shallowest operands first.
  Lit balanced_and(const std::vector<Lit>& operands) {
    using Entry = std::pair<std::uint32_t, std::uint32_t>;  // (level, raw lit)
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    for (Lit l : operands) heap.emplace(level(l), l.raw());
    while (heap.size() > 1) {
      const Lit a(heap.top().second);
      heap.pop();
      const Lit b(heap.top().second);
      heap.pop();
      const Lit r = and2(a, b);
      heap.emplace(level(r), r.raw());
    }
    return Lit(heap.top().second);
  }

  Subgraph graph_;
  std::vector<std::uint32_t> levels_;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> strash_;
};

Subgraph build_subgraph(const FactoredForm& form, std::span<const std::uint32_t> leaf_levels,
                        bool complement) {
  SubgraphBuilder builder(leaf_levels);
  const Lit out = builder.build(form, form.root) ^ complement;
  return std::move(builder).finish(out);
}

std::uint32_t output_level(const Subgraph& g, std::span<const std::uint32_t> leaf_levels) {
  std::vector<std::uint32_t> level(1 + g.num_leaves + g.gates.size(), 0);
  for (std::size_t i = 0; i < leaf_levels.size(); ++i) level[i + 1] = leaf_levels[i];
  for (std::size_t i = 0; i < g.gates.size(); ++i) {
    level[1 + g.num_leaves + i] =
        1 + std::max(level[g.gates[i].first.node()], level[g.gates[i].second.node()]);
  }
  return level[g.output.node()];
}

}  // namespace

FactoredForm factor(std::span<const Cube> cubes) {
  FactoredForm form;
  Factorizer f(form);
  form.root = f.run(std::vector<Cube>(cubes.begin(), cubes.end()));
  return form;
}

FactoredCovers factor_both(const TruthTable& f) {
  return {factor(isop(f)), factor(isop(~f))};
}

Subgraph synthesize(const TruthTable& f, std::span<const std::uint32_t> leaf_levels) {
  return synthesize(factor_both(f), leaf_levels);
}

Subgraph synthesize(const FactoredCovers& covers, std::span<const std::uint32_t> leaf_levels) {
  auto pos = build_subgraph(covers.positive, leaf_levels, false);
  auto neg = build_subgraph(covers.negative, leaf_levels, true);
  if (neg.size() < pos.size()) return neg;
  if (neg.size() == pos.size() && output_level(neg, leaf_levels) < output_level(pos, leaf_levels)) {
    return neg;
  }
  return pos;
}

TruthTable evaluate(const Subgraph& g) {
  const unsigned k = g.num_leaves;
  std::vector<TruthTable> value;
  value.reserve(1 + k + g.gates.size());
  value.push_back(TruthTable(k));
  for (unsigned i = 0; i < k; ++i) value.push_back(TruthTable::nth_var(k, i));
  auto lit_value = [&](Lit l) { return l.complemented() ? ~value[l.node()] : value[l.node()]; };
  for (const auto& [a, b] : g.gates) value.push_back(lit_value(a) & lit_value(b));
  return lit_value(g.output);
}

}  // namespace lsopt
