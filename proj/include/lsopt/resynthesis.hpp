#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lsopt/aig.hpp"
#include "lsopt/truth_table.hpp"

namespace lsopt {

/// Algebraic factored form of a cover: a tree of and/or nodes over literals.
struct FactoredForm {
  enum class Kind { const0, const1, literal, and_op, or_op };
  struct Node {
    Kind kind = Kind::const0;
    unsigned var = 0;
    bool negated = false;
    std::vector<int> children;
  };
  std::vector<Node> nodes;
  int root = 0;

  int literal_count() const;
};

/// Literal-sharing factoring: repeatedly divides by the most frequent literal.
FactoredForm factor(std::span<const Cube> cubes);

/**
 * And-inverter replacement structure over k leaves. Literal nodes are
 * numbered 0 (constant), 1..k (leaves), k+1.. (gates, in creation order).
 */
struct Subgraph {
  unsigned num_leaves = 0;
  std::vector<std::pair<Lit, Lit>> gates;
  Lit output;

  std::size_t size() const { return gates.size(); }
};

/// Factored covers of a function and of its complement.
struct FactoredCovers {
  FactoredForm positive;
  FactoredForm negative;
};

FactoredCovers factor_both(const TruthTable& f);

/// Builds both covers on the given leaf levels and keeps the smaller one
/// (fewer gates, then lower output level, then the positive form).
Subgraph synthesize(const FactoredCovers& covers, std::span<const std::uint32_t> leaf_levels);

/**
 * Resynthesizes `f` into a subgraph: factored ISOP of f and of !f, and trees
 * balanced by the supplied leaf levels. Returns the smaller of the two.
 */
Subgraph synthesize(const TruthTable& f, std::span<const std::uint32_t> leaf_levels);

/// Truth table of a subgraph's output over its leaves.
TruthTable evaluate(const Subgraph& g);

}  // namespace lsopt
