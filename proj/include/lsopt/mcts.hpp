#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "lsopt/aig.hpp"
#include "lsopt/qor.hpp"
#include "lsopt/transforms.hpp"

namespace lsopt {

/// Result of synthesizing one complete action sequence.
struct Outcome {
  double reward = 0.0;  ///< in [-1, 1], larger is better
  double cost = 0.0;    ///< objective being minimized (adp proxy for circuits)
  std::size_t node_count = 0;
  std::uint32_t depth = 0;
};

/**
 * A fixed-horizon sequential decision problem with terminal-only rewards.
 * Actions are indices 0..action_count()-1; a complete sequence has exactly
 * recipe_length() actions.
 */
class SearchEnvironment {
public:
  virtual ~SearchEnvironment() = default;
  virtual int action_count() const = 0;
  virtual std::size_t recipe_length() const = 0;
  virtual Outcome evaluate(std::span<const int> sequence) = 0;
  /// Text form of a (partial) sequence for traces.
  virtual std::string describe(std::span<const int> sequence) const;
};

/**
 * Recipe optimization on one circuit. Intermediate AIGs are cached by recipe
 * prefix so a prefix is never synthesized twice; the cache may be shared by
 * concurrent readers.
 */
class RecipeEnvironment final : public SearchEnvironment {
public:
  explicit RecipeEnvironment(Aig root, std::size_t length = Recipe::kDefaultMaxLength,
                             std::vector<Action> actions = {kAllActions.begin(), kAllActions.end()});

  int action_count() const override { return static_cast<int>(actions_.size()); }
  std::size_t recipe_length() const override { return length_; }
  Outcome evaluate(std::span<const int> sequence) override;
  std::string describe(std::span<const int> sequence) const override;

  Action action(int index) const { return actions_.at(static_cast<std::size_t>(index)); }
  Recipe recipe(std::span<const int> sequence) const;
  std::vector<int> indices(const Recipe& recipe) const;

  const Aig& root() const { return root_; }
  QorValue baseline() const { return baseline_; }

  /// The circuit after applying `prefix` to the root.
  Aig synthesize(std::span<const int> prefix);

  std::size_t pass_applications() const;
  std::size_t prefix_cache_hits() const;

private:
  Aig root_;
  std::size_t length_;
  std::vector<Action> actions_;
  QorValue baseline_;
  mutable std::shared_mutex mutex_;
  std::map<std::vector<int>, Aig> prefixes_;
  std::size_t pass_applications_ = 0;
  std::size_t prefix_hits_ = 0;
};

/// Statistics of one tree node: one slot per action.
struct SearchNode {
  explicit SearchNode(int action_count);

  std::vector<double> q;
  std::vector<double> reward_sum;
  std::vector<std::uint32_t> visits;
  std::vector<std::unique_ptr<SearchNode>> children;
  std::vector<double> prior;  ///< empty until a policy is consulted

  int action_count() const { return static_cast<int>(q.size()); }
  std::uint64_t total_visits() const;
};

struct MctsConfig {
  double c_uct = std::sqrt(2.0);
  std::size_t iterations = 512;  ///< per committed level
  double alpha = 0.0;
  std::uint64_t seed = 1;
  std::size_t budget = 0;     ///< distinct synthesis calls over the whole run; 0 = unlimited
  bool record_time = false;   ///< fill wall_ns in trace rows (otherwise 0)
};

/// Prior over actions for a state given by its action prefix.
using PriorFn = std::function<std::vector<double>(std::span<const int> prefix)>;

/// Exploration term c * sqrt(ln(sum N) / N(a)); +inf for unvisited actions.
double uct(const SearchNode& node, int action, double c_uct);

/// prior^alpha * u, with 0 * inf taken as 0.
double biased_uct(double prior, double u, double alpha);

/// Priors are floored before exponentiation so no action is masked for good.
inline constexpr double kPriorFloor = 1e-6;

/**
 * argmax over Q + prior^alpha * U. Unvisited actions come first, ordered by
 * prior (when alpha > 0); remaining ties go to the lowest index.
 */
int select(const SearchNode& node, double c_uct, double alpha);

/// Adds `value` to every edge on the path.
void backup(std::span<const std::pair<SearchNode*, int>> path, double value);

struct TraceRow {
  std::size_t iteration = 0;
  std::string prefix;
  std::size_t node_count = 0;
  std::uint32_t depth = 0;
  double adp_proxy = 0.0;
  double reward = 0.0;
  std::int64_t wall_ns = 0;
};

void write_trace_csv(std::ostream& out, std::span<const TraceRow> rows);

/**
 * Memoized, budgeted evaluation of complete sequences. Records one trace row
 * per distinct sequence and the best outcome seen.
 */
class Evaluator {
public:
  Evaluator(SearchEnvironment& env, std::size_t budget, bool record_time);

  /// nullopt when the sequence is new and the budget is spent.
  std::optional<Outcome> evaluate(std::span<const int> sequence, std::size_t iteration);

  std::size_t synthesis_calls() const { return calls_; }
  std::size_t cache_hits() const { return hits_; }
  bool exhausted() const { return budget_ != 0 && calls_ >= budget_; }
  const std::vector<TraceRow>& trace() const { return trace_; }
  const std::vector<int>& best_sequence() const { return best_sequence_; }
  const std::optional<Outcome>& best() const { return best_; }
  /// Calls made when the best cost so far first dropped to `cost` or below; 0 if never.
  std::size_t calls_to_reach(double cost) const;

private:
  SearchEnvironment& env_;
  std::size_t budget_;
  bool record_time_;
  std::map<std::vector<int>, Outcome> cache_;
  std::size_t calls_ = 0;
  std::size_t hits_ = 0;
  std::vector<TraceRow> trace_;
  std::vector<int> best_sequence_;
  std::optional<Outcome> best_;
  std::vector<std::pair<std::size_t, double>> improvements_;
};

/// Completes `prefix` with uniformly random actions and evaluates it.
std::optional<double> rollout(Evaluator& evaluator, const SearchEnvironment& env, std::vector<int> prefix,
                              std::mt19937_64& rng, std::size_t iteration);

struct SearchResult {
  std::vector<double> pi;  ///< root visit distribution
  int best_action = 0;     ///< most visited; ties to higher Q, then lower index
  std::size_t iterations = 0;
  bool budget_exhausted = false;
};

/**
 * Tree search from the state reached by `prefix`, rooted at `root` (which
 * keeps statistics from earlier calls). Runs config.iterations iterations of
 * select, expand, rollout and backup, stopping early if the budget runs out.
 */
class Mcts {
public:
  Mcts(SearchEnvironment& env, const MctsConfig& config, PriorFn prior = {});

  SearchResult search(SearchNode& root, const std::vector<int>& prefix);

  Evaluator& evaluator() { return evaluator_; }
  std::mt19937_64& rng() { return rng_; }
  std::size_t iterations_run() const { return iteration_; }

private:
  void ensure_prior(SearchNode& node, const std::vector<int>& prefix);

  SearchEnvironment& env_;
  MctsConfig config_;
  PriorFn prior_;
  Evaluator evaluator_;
  std::mt19937_64 rng_;
  std::size_t iteration_ = 0;
};

struct LevelRecord {
  std::vector<int> prefix;  ///< state at which the search ran
  std::vector<double> pi;   ///< root visit distribution
  int action = 0;           ///< committed action
  double q = 0.0;           ///< backed-up value of the committed action
};

struct RecipeSearchResult {
  std::vector<int> committed;        ///< recipe from committing the argmax at each level
  std::optional<Outcome> committed_outcome;
  std::vector<int> best;             ///< best complete recipe synthesized during the search
  Outcome best_outcome;
  std::vector<LevelRecord> levels;
  std::vector<TraceRow> trace;
  std::size_t synthesis_calls = 0;
  std::size_t cache_hits = 0;
  bool budget_exhausted = false;
};

/**
 * Level-by-level recipe generation: search, commit the argmax action,
 * descend into its subtree, repeat until the recipe is complete or the
 * budget runs out (then the best recipe seen so far is also the committed one).
 */
RecipeSearchResult generate_recipe(SearchEnvironment& env, const MctsConfig& config, PriorFn prior = {});

/// Full-depth generation wrapped for circuits.
struct CircuitSearchResult {
  Recipe recipe;            ///< committed recipe
  QorValue committed_qor;
  Recipe best_recipe;
  QorValue best_qor;        ///< reported result: best over all synthesized recipes
  QorValue baseline_qor;
  RecipeSearchResult raw;
};

CircuitSearchResult optimize_circuit(const Aig& aig, const MctsConfig& config, PriorFn prior = {},
                                     std::size_t length = Recipe::kDefaultMaxLength);

}  // namespace lsopt
