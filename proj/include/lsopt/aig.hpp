#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace lsopt {

/// AIGER-style literal: 2 * node + complement. Node 0 is constant false.
class Lit {
public:
  constexpr Lit() = default;
  constexpr explicit Lit(std::uint32_t raw) : raw_(raw) {}

  static constexpr Lit make(std::uint32_t node, bool complemented = false) {
    return Lit((node << 1) | (complemented ? 1u : 0u));
  }
  static constexpr Lit const0() { return Lit(0); }
  static constexpr Lit const1() { return Lit(1); }

  constexpr std::uint32_t raw() const { return raw_; }
  constexpr std::uint32_t node() const { return raw_ >> 1; }
  constexpr bool complemented() const { return (raw_ & 1u) != 0; }
  constexpr bool is_const() const { return node() == 0; }

  constexpr Lit operator!() const { return Lit(raw_ ^ 1u); }
  constexpr Lit operator^(bool c) const { return Lit(raw_ ^ (c ? 1u : 0u)); }
  constexpr Lit regular() const { return Lit(raw_ & ~1u); }

  constexpr auto operator<=>(const Lit&) const = default;

private:
  std::uint32_t raw_ = 0;
};

enum class NodeKind { constant, input, and2 };

struct AigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AigStats {
  std::size_t node_count = 0;  ///< and2 nodes
  std::uint32_t depth = 0;     ///< max level over outputs
  std::size_t input_count = 0;
  std::size_t output_count = 0;
  bool operator==(const AigStats&) const = default;
};

/**
 * Immutable and-inverter graph.
 *
 * Node 0 is the constant, nodes 1..I are primary inputs, the remaining nodes
 * are and2 gates stored in topological order. Every and2 keeps its fanins in
 * canonical order (fanin0 < fanin1) and no two and2 share a fanin pair.
 * Instances are produced by AigBuilder and never change afterwards.
 */
class Aig {
public:
  Aig() = default;

  std::size_t num_nodes() const { return 1 + num_inputs_ + fanins_.size(); }
  std::size_t num_inputs() const { return num_inputs_; }
  std::size_t num_ands() const { return fanins_.size(); }
  std::size_t num_outputs() const { return outputs_.size(); }

  NodeKind kind(std::uint32_t node) const {
    if (node == 0) return NodeKind::constant;
    if (node <= num_inputs_) return NodeKind::input;
    return NodeKind::and2;
  }
  bool is_and(std::uint32_t node) const { return node > num_inputs_; }
  bool is_input(std::uint32_t node) const { return node >= 1 && node <= num_inputs_; }

  Lit input(std::size_t i) const { return Lit::make(static_cast<std::uint32_t>(i + 1)); }
  Lit fanin0(std::uint32_t node) const { return fanins_[and_index(node)].first; }
  Lit fanin1(std::uint32_t node) const { return fanins_[and_index(node)].second; }

  std::span<const Lit> outputs() const { return outputs_; }
  Lit output(std::size_t i) const { return outputs_[i]; }

  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  /// Structural equality: same interface, same and2 list, same outputs.
  bool operator==(const Aig& other) const {
    return num_inputs_ == other.num_inputs_ && fanins_ == other.fanins_ &&
           outputs_ == other.outputs_;
  }

private:
  friend class AigBuilder;

  std::size_t and_index(std::uint32_t node) const { return node - num_inputs_ - 1; }

  std::size_t num_inputs_ = 0;
  std::vector<std::pair<Lit, Lit>> fanins_;
  std::vector<Lit> outputs_;
  std::string name_;
};

/**
 * Incremental AIG construction with structural hashing.
 *
 * add_and() canonicalizes the fanin pair, folds constants and the trivial
 * identities x&x = x, x&!x = 0, and returns an existing node when the pair
 * was already created. All inputs must be created before the first and2.
 */
class AigBuilder {
public:
  explicit AigBuilder(std::string name = {});

  Lit add_input();
  Lit add_and(Lit a, Lit b);
  void add_output(Lit lit);

  Lit add_or(Lit a, Lit b) { return !add_and(!a, !b); }
  /// Two-level xor, three and2 nodes: (a & !b) | (!a & b).
  Lit add_xor(Lit a, Lit b);
  /// sel ? then_lit : else_lit
  Lit add_mux(Lit sel, Lit then_lit, Lit else_lit);

  std::size_t num_inputs() const { return aig_.num_inputs_; }
  std::size_t num_ands() const { return aig_.fanins_.size(); }
  std::uint32_t level(Lit lit) const { return levels_[lit.node()]; }

  Aig build() &&;

private:
  Aig aig_;
  std::vector<std::uint32_t> levels_;
  std::unordered_map<std::uint64_t, std::uint32_t> strash_;
};

/// Per-node level: constant and inputs 0, and2 = 1 + max fanin level.
std::vector<std::uint32_t> compute_levels(const Aig& aig);

/// Fanout references per node, counting and2 fanins and output references.
std::vector<std::uint32_t> compute_fanouts(const Aig& aig);

AigStats stats(const Aig& aig);

/// Rebuilds the graph from its outputs: drops dangling nodes, re-hashes.
Aig cleanup(const Aig& aig);

/// Number of node features produced by node_features().
inline constexpr int kNodeFeatureCount = 6;

/**
 * Per-node feature rows [num_nodes x 6]:
 * one-hot kind (const, input, and2), complemented-fanin count / 2,
 * level / max level, fanout / max fanout.
 */
Eigen::MatrixXd node_features(const Aig& aig);

}  // namespace lsopt
