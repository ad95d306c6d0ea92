#pragma once

// Mutable AIG used inside the rewriting passes. Nodes carry reference counts
// so that the fanout-free cone freed by a replacement can be measured before
// committing it. Replacements may leave duplicate or trivial nodes behind;
// to_aig() folds them away.

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "lsopt/aig.hpp"
#include "lsopt/resynthesis.hpp"

namespace lsopt::detail {

class Network {
public:
  explicit Network(const Aig& aig);

  std::uint32_t size() const { return static_cast<std::uint32_t>(nodes_.size()); }
  std::size_t num_inputs() const { return num_inputs_; }
  bool is_and(std::uint32_t n) const { return n > num_inputs_; }
  bool is_dead(std::uint32_t n) const { return nodes_[n].dead; }
  Lit fanin0(std::uint32_t n) const { return nodes_[n].fanin[0]; }
  Lit fanin1(std::uint32_t n) const { return nodes_[n].fanin[1]; }
  std::uint32_t refs(std::uint32_t n) const { return nodes_[n].refs; }
  std::uint32_t level(std::uint32_t n) const { return nodes_[n].level; }
  std::span<const std::uint32_t> fanouts(std::uint32_t n) const { return nodes_[n].fanouts; }

  /// Existing literal for a & b (after trivial folding), if any.
  std::optional<Lit> lookup(Lit a, Lit b) const;
  Lit create_and(Lit a, Lit b);

  /// Dereferences the cone of n down to (not including) the leaves; returns
  /// the nodes whose count reached zero, n first. An empty leaf set derefs the
  /// whole maximum fanout-free cone.
  std::vector<std::uint32_t> deref_cone(std::uint32_t n, std::span<const std::uint32_t> leaves);
  /// Inverse of deref_cone with the same leaves.
  void ref_cone(std::uint32_t n, std::span<const std::uint32_t> leaves);

  struct Cost {
    int added = 0;               ///< nodes that would be created or kept alive
    std::uint32_t level = 0;     ///< level of the candidate root
    std::optional<Lit> existing; ///< root literal if it already exists
  };
  /// Cost of instantiating `g` on `leaves` in the current (possibly
  /// dereferenced) state. Nodes with zero references count as added.
  Cost evaluate(const Subgraph& g, std::span<const Lit> leaves) const;
  Lit instantiate(const Subgraph& g, std::span<const Lit> leaves);

  /// Redirects all fanouts of n to r and frees n's fanout-free cone.
  void replace(std::uint32_t n, Lit r);

  Aig to_aig() const;

private:
  struct Node {
    Lit fanin[2];
    std::uint32_t refs = 0;
    std::uint32_t level = 0;
    bool dead = false;
    std::vector<std::uint32_t> fanouts;
  };

  static std::uint64_t key(Lit a, Lit b) {
    return (static_cast<std::uint64_t>(a.raw()) << 32) | b.raw();
  }
  void kill(std::uint32_t n);
  void mark_leaves(std::span<const std::uint32_t> leaves);
  void unmark_leaves(std::span<const std::uint32_t> leaves);

  std::size_t num_inputs_ = 0;
  std::string name_;
  std::vector<Node> nodes_;
  std::vector<Lit> outputs_;
  std::unordered_map<std::uint64_t, std::uint32_t> strash_;
  std::vector<char> leaf_mark_;
};

}  // namespace lsopt::detail
