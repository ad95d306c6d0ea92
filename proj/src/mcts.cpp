#include "lsopt/mcts.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>

namespace lsopt {

namespace {

constexpr std::size_t kMaxCachedPrefixes = 50000;

}  // namespace

std::string SearchEnvironment::describe(std::span<const int> sequence) const {
  std::string out;
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(sequence[i]);
  }
  return out;
}

RecipeEnvironment::RecipeEnvironment(Aig root, std::size_t length, std::vector<Action> actions)
    : root_(std::move(root)), length_(length), actions_(std::move(actions)) {
  if (actions_.empty()) throw std::invalid_argument("action set must not be empty");
  if (length_ == 0) throw std::invalid_argument("recipe length must be positive");
  baseline_ = baseline_qor(root_);
}

Recipe RecipeEnvironment::recipe(std::span<const int> sequence) const {
  Recipe r(std::max(length_, sequence.size()));
  for (int i : sequence) r.push_back(action(i));
  return r;
}

std::vector<int> RecipeEnvironment::indices(const Recipe& recipe) const {
  std::vector<int> out;
  for (auto a : recipe) {
    const auto it = std::find(actions_.begin(), actions_.end(), a);
    if (it == actions_.end()) throw std::invalid_argument("action not in the environment's action set");
    out.push_back(static_cast<int>(it - actions_.begin()));
  }
  return out;
}

std::string RecipeEnvironment::describe(std::span<const int> sequence) const {
  return recipe(sequence).to_string();
}

Aig RecipeEnvironment::synthesize(std::span<const int> prefix) {
  std::size_t known = 0;
  Aig current = root_;
  {
    std::shared_lock lock(mutex_);
    std::vector<int> key(prefix.begin(), prefix.end());
    for (std::size_t k = prefix.size(); k > 0; --k) {
      key.resize(k);
      if (auto it = prefixes_.find(key); it != prefixes_.end()) {
        known = k;
        current = it->second;
        break;
      }
    }
  }
  if (known == prefix.size()) {
    std::unique_lock lock(mutex_);
    ++prefix_hits_;
    return current;
  }
  std::vector<Aig> steps;
  for (std::size_t k = known; k < prefix.size(); ++k) {
    current = apply(current, action(prefix[k]));
    steps.push_back(current);
  }
  std::unique_lock lock(mutex_);
  pass_applications_ += steps.size();
  std::vector<int> key(prefix.begin(), prefix.begin() + static_cast<std::ptrdiff_t>(known));
  for (std::size_t k = known; k < prefix.size(); ++k) {
    key.push_back(prefix[k]);
    if (key.size() < length_ && prefixes_.size() < kMaxCachedPrefixes) {
      prefixes_.emplace(key, steps[k - known]);
    }
  }
  return current;
}

Outcome RecipeEnvironment::evaluate(std::span<const int> sequence) {
  const Aig result = synthesize(sequence);
  const auto s = stats(result);
  const QorValue value = qor(result);
  return {reward(value, baseline_), value.adp_proxy, s.node_count, s.depth};
}

std::size_t RecipeEnvironment::pass_applications() const {
  std::shared_lock lock(mutex_);
  return pass_applications_;
}

std::size_t RecipeEnvironment::prefix_cache_hits() const {
  std::shared_lock lock(mutex_);
  return prefix_hits_;
}

SearchNode::SearchNode(int action_count)
    : q(static_cast<std::size_t>(action_count), 0.0),
      reward_sum(static_cast<std::size_t>(action_count), 0.0),
      visits(static_cast<std::size_t>(action_count), 0),
      children(static_cast<std::size_t>(action_count)) {}

std::uint64_t SearchNode::total_visits() const {
  std::uint64_t total = 0;
  for (auto n : visits) total += n;
  return total;
}

double uct(const SearchNode& node, int action, double c_uct) {
  const auto n = node.visits[static_cast<std::size_t>(action)];
  if (n == 0) return std::numeric_limits<double>::infinity();
  return c_uct * std::sqrt(std::log(static_cast<double>(node.total_visits())) / n);
}

double biased_uct(double prior, double u, double alpha) {
  const double weight = std::pow(prior, alpha);
  if (weight == 0.0) return 0.0;
  return weight * u;
}

int select(const SearchNode& node, double c_uct, double alpha) {
  int best = -1;
  bool best_unvisited = false;
  double best_key = 0.0;
  for (int a = 0; a < node.action_count(); ++a) {
    const auto i = static_cast<std::size_t>(a);
    const double prior = node.prior.empty() ? 1.0 : std::max(node.prior[i], kPriorFloor);
    if (node.visits[i] == 0) {
      const double weight = std::pow(prior, alpha);
      if (!best_unvisited || weight > best_key) {
        best = a;
        best_unvisited = true;
        best_key = weight;
      }
      continue;
    }
    if (best_unvisited) continue;
    const double score = node.q[i] + biased_uct(prior, uct(node, a, c_uct), alpha);
    if (best < 0 || score > best_key) {
      best = a;
      best_key = score;
    }
  }
  return best;
}

void backup(std::span<const std::pair<SearchNode*, int>> path, double value) {
  for (const auto& [node, action] : path) {
    const auto i = static_cast<std::size_t>(action);
    node->visits[i] += 1;
    node->reward_sum[i] += value;
    node->q[i] = node->reward_sum[i] / node->visits[i];
  }
}

void write_trace_csv(std::ostream& out, std::span<const TraceRow> rows) {
  out << "iteration,prefix,node_count,depth,adp_proxy,reward,wall_ns\n";
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(17);
  for (const auto& r : rows) {
    out << r.iteration << ',' << r.prefix << ',' << r.node_count << ',' << r.depth << ',' << r.adp_proxy << ','
        << r.reward << ',' << r.wall_ns << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

Evaluator::Evaluator(SearchEnvironment& env, std::size_t budget, bool record_time)
    : env_(env), budget_(budget), record_time_(record_time) {}

std::optional<Outcome> Evaluator::evaluate(std::span<const int> sequence, std::size_t iteration) {
  std::vector<int> key(sequence.begin(), sequence.end());
  if (auto it = cache_.find(key); it != cache_.end()) {
    ++hits_;
    return it->second;
  }
  if (exhausted()) return std::nullopt;
  const auto start = std::chrono::steady_clock::now();
  const Outcome out = env_.evaluate(sequence);
  const auto elapsed = std::chrono::steady_clock::now() - start;
  ++calls_;
  trace_.push_back({iteration, env_.describe(sequence), out.node_count, out.depth, out.cost, out.reward,
                    record_time_ ? std::chrono::duration_cast<std::chrono::nanoseconds>(elapsed).count() : 0});
  if (!best_ || out.cost < best_->cost) {
    best_ = out;
    best_sequence_ = key;
    improvements_.emplace_back(calls_, out.cost);
  }
  cache_.emplace(std::move(key), out);
  return out;
}

std::size_t Evaluator::calls_to_reach(double cost) const {
  for (const auto& [calls, value] : improvements_) {
    if (value <= cost) return calls;
  }
  return 0;
}

std::optional<double> rollout(Evaluator& evaluator, const SearchEnvironment& env, std::vector<int> prefix,
                              std::mt19937_64& rng, std::size_t iteration) {
  std::uniform_int_distribution<int> pick(0, env.action_count() - 1);
  while (prefix.size() < env.recipe_length()) prefix.push_back(pick(rng));
  const auto out = evaluator.evaluate(prefix, iteration);
  if (!out) return std::nullopt;
  return out->reward;
}

Mcts::Mcts(SearchEnvironment& env, const MctsConfig& config, PriorFn prior)
    : env_(env),
      config_(config),
      prior_(std::move(prior)),
      evaluator_(env, config.budget, config.record_time),
      rng_(config.seed) {
  if (config_.iterations == 0) throw std::invalid_argument("iterations must be at least 1");
  if (!(config_.alpha >= 0.0 && config_.alpha <= 1.0)) throw std::invalid_argument("alpha must be in [0, 1]");
}

void Mcts::ensure_prior(SearchNode& node, const std::vector<int>& prefix) {
  if (!prior_ || !node.prior.empty()) return;
  node.prior = prior_(prefix);
  if (node.prior.size() != static_cast<std::size_t>(node.action_count())) {
    throw std::logic_error("prior size does not match the action count");
  }
}

SearchResult Mcts::search(SearchNode& root, const std::vector<int>& prefix) {
  const auto length = env_.recipe_length();
  if (prefix.size() >= length) throw std::invalid_argument("search requires a prefix shorter than the recipe");
  SearchResult result;
  std::vector<std::pair<SearchNode*, int>> path;
  for (std::size_t k = 0; k < config_.iterations; ++k) {
    SearchNode* node = &root;
    std::vector<int> sequence = prefix;
    path.clear();
    std::optional<double> value;
    while (true) {
      if (sequence.size() == length) {
        const auto out = evaluator_.evaluate(sequence, iteration_);
        if (out) value = out->reward;
        break;
      }
      ensure_prior(*node, sequence);
      const int a = select(*node, config_.c_uct, config_.alpha);
      path.emplace_back(node, a);
      sequence.push_back(a);
      auto& child = node->children[static_cast<std::size_t>(a)];
      if (!child) {
        child = std::make_unique<SearchNode>(env_.action_count());
        value = rollout(evaluator_, env_, sequence, rng_, iteration_);
        break;
      }
      node = child.get();
    }
    if (!value) {
      result.budget_exhausted = true;
      break;
    }
    backup(path, *value);
    ++iteration_;
    ++result.iterations;
  }

  const auto total = root.total_visits();
  result.pi.assign(static_cast<std::size_t>(root.action_count()), 0.0);
  for (int a = 0; a < root.action_count(); ++a) {
    const auto i = static_cast<std::size_t>(a);
    result.pi[i] = total == 0 ? 1.0 / root.action_count() : static_cast<double>(root.visits[i]) / total;
    const auto j = static_cast<std::size_t>(result.best_action);
    if (root.visits[i] > root.visits[j] || (root.visits[i] == root.visits[j] && root.q[i] > root.q[j])) {
      result.best_action = a;
    }
  }
  return result;
}

RecipeSearchResult generate_recipe(SearchEnvironment& env, const MctsConfig& config, PriorFn prior) {
  Mcts mcts(env, config, std::move(prior));
  RecipeSearchResult result;
  auto root = std::make_unique<SearchNode>(env.action_count());
  SearchNode* current = root.get();
  std::vector<int> prefix;
  while (prefix.size() < env.recipe_length()) {
    const auto level = mcts.search(*current, prefix);
    if (current->total_visits() > 0) {
      const auto a = static_cast<std::size_t>(level.best_action);
      result.levels.push_back({prefix, level.pi, level.best_action, current->q[a]});
    }
    if (level.budget_exhausted) {
      result.budget_exhausted = true;
      break;
    }
    prefix.push_back(level.best_action);
    current = current->children[static_cast<std::size_t>(level.best_action)].get();
  }

  auto& evaluator = mcts.evaluator();
  if (!result.budget_exhausted) {
    result.committed = prefix;
    result.committed_outcome = evaluator.evaluate(prefix, mcts.iterations_run());
  }
  if (!result.committed_outcome) {
    result.committed = evaluator.best_sequence();
    result.committed_outcome = evaluator.best();
  }
  if (evaluator.best()) {
    result.best = evaluator.best_sequence();
    result.best_outcome = *evaluator.best();
  }
  result.trace = evaluator.trace();
  result.synthesis_calls = evaluator.synthesis_calls();
  result.cache_hits = evaluator.cache_hits();
  return result;
}

CircuitSearchResult optimize_circuit(const Aig& aig, const MctsConfig& config, PriorFn prior, std::size_t length) {
  RecipeEnvironment env(aig, length);
  CircuitSearchResult out;
  out.raw = generate_recipe(env, config, std::move(prior));
  out.recipe = env.recipe(out.raw.committed);
  out.committed_qor = {out.raw.committed_outcome ? out.raw.committed_outcome->cost : qor(aig).adp_proxy};
  out.best_recipe = env.recipe(out.raw.best);
  out.best_qor = {out.raw.best_outcome.cost};
  out.baseline_qor = env.baseline();
  return out;
}

}  // namespace lsopt
