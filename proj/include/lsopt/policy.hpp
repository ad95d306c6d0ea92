#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "lsopt/aig.hpp"
#include "lsopt/mcts.hpp"
#include "lsopt/transforms.hpp"

namespace lsopt {

struct PolicyConfig {
  int gcn_layers = 3;
  int hidden = 32;          ///< GCN width; the AIG embedding has 2 * hidden entries
  int embedding = 16;       ///< recipe embedding width
  int head_hidden = 64;
  int max_length = 10;      ///< L, rows of the position table
  double leaky_slope = 0.01;
  double final_layer_scale = 0.01;
  double bn_momentum = 0.1;
  double bn_epsilon = 1e-5;
  std::uint64_t seed = 1;
};

/// Normalized adjacency D^-1/2 (A + I) D^-1/2 of the undirected fanin graph
/// plus the node feature matrix.
struct GraphInput {
  Eigen::SparseMatrix<double, Eigen::RowMajor> adjacency;
  Eigen::MatrixXd features;
};

GraphInput prepare_graph(const Aig& aig);

using Distribution = std::array<double, kActionCount>;

/// -sum target * log(max(p, 1e-12)).
double cross_entropy(std::span<const double> p, std::span<const double> target);

struct PolicyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/**
 * Policy over the next action given the initial circuit and the recipe
 * prefix: a GCN encoder on the circuit, a sum of action and position
 * embeddings on the prefix, and three fully connected layers on their
 * concatenation.
 */
class PolicyNetwork {
public:
  struct Tensor {
    std::string name;
    Eigen::MatrixXd value;
  };

  /// One training example: circuit index, prefix, target distribution.
  struct Sample {
    std::size_t graph = 0;
    std::vector<Action> prefix;
    Distribution target{};
  };

  explicit PolicyNetwork(const PolicyConfig& config = {});

  const PolicyConfig& config() const { return config_; }
  int embedding_size() const { return 2 * config_.hidden; }

  /// Circuit embedding with batch norm in inference mode (running statistics).
  Eigen::VectorXd encode_aig(const GraphInput& graph) const;
  Eigen::VectorXd encode_aig(const Aig& aig) const { return encode_aig(prepare_graph(aig)); }
  Eigen::VectorXd encode_recipe(std::span<const Action> prefix) const;
  Eigen::VectorXd encode_recipe(const Recipe& prefix) const { return encode_recipe(prefix.actions()); }

  /// Pre-softmax scores for a given circuit embedding and prefix.
  Eigen::VectorXd logits(const Eigen::VectorXd& h_aig, std::span<const Action> prefix) const;
  Distribution policy(const Eigen::VectorXd& h_aig, std::span<const Action> prefix) const;
  Distribution forward(const Aig& aig, const Recipe& prefix) const;

  /**
   * Mean cross-entropy over `samples` in training mode (batch statistics per
   * graph) and, if `gradient` is non-null, its gradient with the same layout
   * as parameters(). Running statistics are updated only when asked.
   */
  double loss(std::span<const GraphInput> graphs, std::span<const Sample> samples,
              std::vector<Eigen::MatrixXd>* gradient = nullptr, bool update_running_stats = false);

  std::vector<Tensor>& parameters() { return params_; }
  const std::vector<Tensor>& parameters() const { return params_; }
  std::vector<Tensor>& buffers() { return buffers_; }
  const std::vector<Tensor>& buffers() const { return buffers_; }

  void save(const std::filesystem::path& path) const;
  static PolicyNetwork load(const std::filesystem::path& path);
  std::string serialize() const;
  static PolicyNetwork deserialize(std::string_view bytes);

  static constexpr std::uint32_t kFormatVersion = 1;

private:
  struct GraphCache;

  void initialize();
  Eigen::MatrixXd& param(std::size_t i) { return params_[i].value; }
  const Eigen::MatrixXd& param(std::size_t i) const { return params_[i].value; }
  std::size_t gcn_index(int layer, int which) const { return static_cast<std::size_t>(4 * layer + which); }
  std::size_t embed_index(int which) const { return static_cast<std::size_t>(4 * config_.gcn_layers + which); }
  std::size_t head_index(int which) const { return static_cast<std::size_t>(4 * config_.gcn_layers + 2 + which); }

  Eigen::VectorXd encode(const GraphInput& graph, bool training, GraphCache* cache) const;
  void encode_backward(const GraphInput& graph, const GraphCache& cache, const Eigen::VectorXd& grad_h,
                       std::vector<Eigen::MatrixXd>& gradient) const;

  PolicyConfig config_;
  std::vector<Tensor> params_;
  std::vector<Tensor> buffers_;  ///< batch-norm running mean and variance per layer
};

/// Adaptive-moment optimizer over a parameter list.
class Adam {
public:
  explicit Adam(double learning_rate, double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);
  void step(std::vector<PolicyNetwork::Tensor>& params, const std::vector<Eigen::MatrixXd>& gradient);

private:
  double lr_, beta1_, beta2_, eps_;
  long step_ = 0;
  std::vector<Eigen::MatrixXd> m_, v_;
};

/// Bounded experience store with oldest-first eviction.
class ReplayBuffer {
public:
  struct Entry {
    std::size_t circuit = 0;
    std::vector<Action> prefix;
    Distribution pi{};
    int epoch = 0;
  };

  explicit ReplayBuffer(std::size_t capacity);

  void push(Entry entry);
  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  const std::deque<Entry>& entries() const { return entries_; }
  /// Up to `count` distinct entries drawn uniformly without replacement.
  std::vector<Entry> sample(std::size_t count, std::mt19937_64& rng) const;

private:
  std::size_t capacity_;
  std::deque<Entry> entries_;
};

struct TrainingConfig {
  int epochs = 50;
  double learning_rate = 0.01;
  std::size_t iterations = 512;  ///< K, per level
  std::size_t length = 10;       ///< L
  double c_uct = std::sqrt(2.0);
  double alpha = 1.0;            ///< prior exponent while collecting data
  std::uint64_t seed = 1;
};

struct TrainingReport {
  std::vector<double> loss;  ///< mean batch loss per epoch, before the step
  std::size_t synthesis_calls = 0;
};

/// Called after every epoch with (epoch, loss).
using EpochCallback = std::function<void(int, double)>;

/**
 * Per epoch: level-by-level search on every training circuit guided by the
 * current policy, one replay entry (the root visit distribution) per level,
 * then one optimizer step on L * N_tr entries sampled from the buffer.
 */
TrainingReport train(PolicyNetwork& net, std::span<const Aig> circuits, const TrainingConfig& config,
                     const EpochCallback& on_epoch = {});

/// epoch,loss rows, one per epoch.
void write_loss_csv(std::ostream& out, std::span<const double> loss);

/// Prior for searches on `env`, with the circuit embedding computed once.
PriorFn make_prior(const PolicyNetwork& net, const RecipeEnvironment& env);

}  // namespace lsopt
