#include "lsopt/transforms.hpp"

#include <stdexcept>

namespace lsopt {

namespace {

constexpr std::array<std::string_view, kActionCount> kNames = {"b", "rw", "rwz", "rf", "rfz", "rs", "rsz"};

}  // namespace

Action action_from_index(int index) {
  if (index < 0 || index >= kActionCount) throw std::out_of_range("action index out of range");
  return static_cast<Action>(index);
}

std::string_view action_name(Action a) { return kNames[action_index(a)]; }

std::optional<Action> parse_action(std::string_view name) {
  for (int i = 0; i < kActionCount; ++i) {
    if (kNames[i] == name) return static_cast<Action>(i);
  }
  return std::nullopt;
}

Recipe::Recipe(std::initializer_list<Action> actions, std::size_t max_length) : max_length_(max_length) {
  for (auto a : actions) push_back(a);
}

void Recipe::push_back(Action a) {
  if (full()) throw std::length_error("recipe exceeds its maximum length");
  actions_.push_back(a);
}

std::string Recipe::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < actions_.size(); ++i) {
    if (i) out += ';';
    out += action_name(actions_[i]);
  }
  return out;
}

Recipe Recipe::parse(std::string_view text, std::size_t max_length) {
  Recipe r(max_length);
  while (!text.empty()) {
    const auto sep = text.find_first_of(";, ");
    const auto token = text.substr(0, sep);
    if (!token.empty()) {
      const auto a = parse_action(token);
      if (!a) throw std::invalid_argument("unknown action '" + std::string(token) + "'");
      r.push_back(*a);
    }
    if (sep == std::string_view::npos) break;
    text.remove_prefix(sep + 1);
  }
  return r;
}

Aig apply(const Aig& aig, Action action) {
  if (aig.num_ands() == 0) return aig;
  const auto before = stats(aig);
  Aig out;
  switch (action) {
    case Action::Balance: out = balance(aig); break;
    case Action::Rewrite: out = rewrite(aig, false); break;
    case Action::RewriteZ: out = rewrite(aig, true); break;
    case Action::Refactor: out = refactor(aig, false); break;
    case Action::RefactorZ: out = refactor(aig, true); break;
    case Action::Resub: out = resub(aig, false); break;
    case Action::ResubZ: out = resub(aig, true); break;
  }
  const auto after = stats(out);
  // Guard the pass contracts; a pass that would worsen its objective is a no-op.
  if (action == Action::Balance ? after.depth > before.depth : after.node_count > before.node_count) return aig;
  out.set_name(aig.name());
  return out;
}

RecipeResult apply_recipe(const Aig& aig, const Recipe& recipe) {
  RecipeResult result{aig, {}};
  result.trace.reserve(recipe.size());
  for (auto a : recipe) {
    result.aig = apply(result.aig, a);
    result.trace.push_back(stats(result.aig));
  }
  return result;
}

}  // namespace lsopt
