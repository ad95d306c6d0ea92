#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lsopt/aig.hpp"

namespace lsopt {

/// The optimization passes forming the action space. The underlying values
/// index the policy head and must stay stable.
enum class Action : std::uint8_t {
  Balance = 0,
  Rewrite = 1,
  RewriteZ = 2,
  Refactor = 3,
  RefactorZ = 4,
  Resub = 5,
  ResubZ = 6,
};

inline constexpr int kActionCount = 7;

inline constexpr std::array<Action, kActionCount> kAllActions = {
    Action::Balance, Action::Rewrite,   Action::RewriteZ, Action::Refactor,
    Action::RefactorZ, Action::Resub,   Action::ResubZ,
};

constexpr int action_index(Action a) { return static_cast<int>(a); }
Action action_from_index(int index);

/// Short mnemonic: b, rw, rwz, rf, rfz, rs, rsz.
std::string_view action_name(Action a);
std::optional<Action> parse_action(std::string_view name);

/// Ordered sequence of actions bounded by a maximum length.
class Recipe {
public:
  static constexpr std::size_t kDefaultMaxLength = 10;

  explicit Recipe(std::size_t max_length = kDefaultMaxLength) : max_length_(max_length) {}
  Recipe(std::initializer_list<Action> actions, std::size_t max_length = kDefaultMaxLength);

  void push_back(Action a);
  Recipe extended(Action a) const {
    Recipe r = *this;
    r.push_back(a);
    return r;
  }

  std::size_t size() const { return actions_.size(); }
  bool empty() const { return actions_.empty(); }
  bool full() const { return actions_.size() >= max_length_; }
  std::size_t max_length() const { return max_length_; }
  Action operator[](std::size_t i) const { return actions_[i]; }
  auto begin() const { return actions_.begin(); }
  auto end() const { return actions_.end(); }
  const std::vector<Action>& actions() const { return actions_; }

  /// Semicolon separated mnemonics, e.g. "b;rw;rf".
  std::string to_string() const;
  static Recipe parse(std::string_view text, std::size_t max_length = kDefaultMaxLength);

  bool operator==(const Recipe& o) const { return actions_ == o.actions_; }

private:
  std::vector<Action> actions_;
  std::size_t max_length_;
};

/// Depth-oriented rebalancing of and-trees. Never increases depth.
Aig balance(const Aig& aig);

/// Cut-based rewriting over 4-input priority cuts. Never increases node count.
Aig rewrite(const Aig& aig, bool zero_cost);

/// Cone refactoring over reconvergence-driven cuts of up to 10 leaves.
Aig refactor(const Aig& aig, bool zero_cost);

/// Windowed resubstitution with zero- and one-gate replacements.
Aig resub(const Aig& aig, bool zero_cost);

/// The synthesis function: returns a new, functionally equivalent AIG.
Aig apply(const Aig& aig, Action action);

struct RecipeResult {
  Aig aig;
  std::vector<AigStats> trace;  ///< stats after each step
};

RecipeResult apply_recipe(const Aig& aig, const Recipe& recipe);

}  // namespace lsopt
