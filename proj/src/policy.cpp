#include "lsopt/policy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <numeric>
#include <ostream>
#include <sstream>

namespace lsopt {

namespace {

using RowVector = Eigen::RowVectorXd;
using Matrix = Eigen::MatrixXd;

constexpr char kMagic[8] = {'L', 'S', 'O', 'P', 'T', 'N', 'E', 'T'};
constexpr double kProbabilityFloor = 1e-12;

Matrix leaky(const Matrix& x, double slope) {
  return x.unaryExpr([slope](double v) { return v > 0.0 ? v : slope * v; });
}

Matrix leaky_grad(const Matrix& pre, const Matrix& grad, double slope) {
  return grad.binaryExpr(pre, [slope](double g, double v) { return v > 0.0 ? g : slope * g; });
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const Eigen::VectorXd shifted = (logits.array() - logits.maxCoeff()).exp();
  return shifted / shifted.sum();
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Writer {
public:
  void u32(std::uint32_t v) { raw(v, 4); }
  void u64(std::uint64_t v) { raw(v, 8); }
  void f64(double v) { raw(std::bit_cast<std::uint64_t>(v), 8); }
  void bytes(std::string_view s) { out_ += s; }
  void matrix(const PolicyNetwork::Tensor& t) {
    u32(static_cast<std::uint32_t>(t.name.size()));
    bytes(t.name);
    u32(static_cast<std::uint32_t>(t.value.rows()));
    u32(static_cast<std::uint32_t>(t.value.cols()));
    for (Eigen::Index i = 0; i < t.value.size(); ++i) f64(t.value.data()[i]);
  }
  std::string& str() { return out_; }

private:
  void raw(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  std::string out_;
};

class Reader {
public:
  explicit Reader(std::string_view in) : in_(in) {}
  std::uint32_t u32() { return static_cast<std::uint32_t>(raw(4)); }
  std::uint64_t u64() { return raw(8); }
  double f64() { return std::bit_cast<double>(raw(8)); }
  std::string_view bytes(std::size_t n) {
    need(n);
    auto s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return in_.size() - pos_; }

private:
  void need(std::size_t n) const {
    if (pos_ + n > in_.size()) throw PolicyError("model file is truncated");
  }
  std::uint64_t raw(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::string_view in_;
  std::size_t pos_ = 0;
};

void read_into(Reader& r, PolicyNetwork::Tensor& t) {
  const auto name = r.bytes(r.u32());
  const auto rows = r.u32(), cols = r.u32();
  if (name != t.name || rows != t.value.rows() || cols != t.value.cols()) {
    throw PolicyError("model tensor mismatch at '" + std::string(name) + "'");
  }
  for (Eigen::Index i = 0; i < t.value.size(); ++i) t.value.data()[i] = r.f64();
}

}  // namespace

GraphInput prepare_graph(const Aig& aig) {
  const auto n = static_cast<Eigen::Index>(aig.num_nodes());
  std::vector<double> degree(static_cast<std::size_t>(n), 1.0);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t v = 0; v < aig.num_nodes(); ++v) {
    if (!aig.is_and(v)) continue;
    for (Lit f : {aig.fanin0(v), aig.fanin1(v)}) {
      edges.emplace_back(v, f.node());
      degree[v] += 1.0;
      degree[f.node()] += 1.0;
    }
  }
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(2 * edges.size() + static_cast<std::size_t>(n));
  for (Eigen::Index v = 0; v < n; ++v) entries.emplace_back(v, v, 1.0 / degree[static_cast<std::size_t>(v)]);
  for (auto [u, v] : edges) {
    const double w = 1.0 / std::sqrt(degree[u] * degree[v]);
    entries.emplace_back(u, v, w);
    entries.emplace_back(v, u, w);
  }
  GraphInput g;
  g.adjacency.resize(n, n);
  g.adjacency.setFromTriplets(entries.begin(), entries.end());
  g.features = node_features(aig);
  return g;
}

double cross_entropy(std::span<const double> p, std::span<const double> target) {
  if (p.size() != target.size()) throw std::invalid_argument("distribution sizes differ");
  double loss = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (target[i] != 0.0) loss -= target[i] * std::log(std::max(p[i], kProbabilityFloor));
  }
  return loss;
}

struct PolicyNetwork::GraphCache {
  struct Layer {
    Matrix propagated;  // A H_{l-1}
    Matrix normalized;  // batch-norm output before scale and shift
    Matrix pre;         // input to the activation
    RowVector inv_std;
  };
  std::vector<Layer> layers;
  Matrix output;
  std::vector<Eigen::Index> argmax;
};

PolicyNetwork::PolicyNetwork(const PolicyConfig& config) : config_(config) {
  if (config_.gcn_layers < 1 || config_.hidden < 1 || config_.embedding < 1 || config_.head_hidden < 1 ||
      config_.max_length < 1) {
    throw std::invalid_argument("policy dimensions must be positive");
  }
  const int h = config_.hidden;
  for (int l = 0; l < config_.gcn_layers; ++l) {
    const int in = l == 0 ? kNodeFeatureCount : h;
    const auto p = "gcn" + std::to_string(l);
    params_.push_back({p + ".weight", Matrix::Zero(in, h)});
    params_.push_back({p + ".bias", Matrix::Zero(1, h)});
    params_.push_back({p + ".bn_scale", Matrix::Ones(1, h)});
    params_.push_back({p + ".bn_shift", Matrix::Zero(1, h)});
    buffers_.push_back({p + ".running_mean", Matrix::Zero(1, h)});
    buffers_.push_back({p + ".running_var", Matrix::Ones(1, h)});
  }
  params_.push_back({"action_embedding", Matrix::Zero(kActionCount, config_.embedding)});
  params_.push_back({"position_embedding", Matrix::Zero(config_.max_length, config_.embedding)});
  const int in = 2 * h + config_.embedding;
  params_.push_back({"fc1.weight", Matrix::Zero(in, config_.head_hidden)});
  params_.push_back({"fc1.bias", Matrix::Zero(1, config_.head_hidden)});
  params_.push_back({"fc2.weight", Matrix::Zero(config_.head_hidden, config_.head_hidden)});
  params_.push_back({"fc2.bias", Matrix::Zero(1, config_.head_hidden)});
  params_.push_back({"fc3.weight", Matrix::Zero(config_.head_hidden, kActionCount)});
  params_.push_back({"fc3.bias", Matrix::Zero(1, kActionCount)});
  initialize();
}

void PolicyNetwork::initialize() {
  std::mt19937_64 rng(config_.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto he = [&](Matrix& w, double scale) {
    const double sd = scale * std::sqrt(2.0 / static_cast<double>(w.rows()));
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = sd * normal(rng);
  };
  for (int l = 0; l < config_.gcn_layers; ++l) he(param(gcn_index(l, 0)), 1.0);
  for (int e = 0; e < 2; ++e) {
    auto& m = param(embed_index(e));
    const double sd = 1.0 / std::sqrt(static_cast<double>(config_.embedding));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = sd * normal(rng);
  }
  he(param(head_index(0)), 1.0);
  he(param(head_index(2)), 1.0);
  he(param(head_index(4)), config_.final_layer_scale);
}

Eigen::VectorXd PolicyNetwork::encode(const GraphInput& graph, bool training, GraphCache* cache) const {
  const auto n = graph.features.rows();
  if (n == 0) throw std::invalid_argument("graph has no nodes");
  if (graph.features.cols() != kNodeFeatureCount) throw std::invalid_argument("unexpected feature width");
  const double slope = config_.leaky_slope, eps = config_.bn_epsilon;
  Matrix h = graph.features;
  if (cache) cache->layers.resize(static_cast<std::size_t>(config_.gcn_layers));
  for (int l = 0; l < config_.gcn_layers; ++l) {
    Matrix propagated = graph.adjacency * h;
    Matrix z = propagated * param(gcn_index(l, 0));
    z.rowwise() += param(gcn_index(l, 1)).row(0);
    RowVector mean, inv_std;
    if (training) {
      mean = z.colwise().mean();
      const RowVector var = (z.rowwise() - mean).array().square().colwise().mean();
      inv_std = (var.array() + eps).rsqrt();
    } else {
      mean = buffers_[2 * static_cast<std::size_t>(l)].value.row(0);
      inv_std = (buffers_[2 * static_cast<std::size_t>(l) + 1].value.row(0).array() + eps).rsqrt();
    }
    Matrix normalized = ((z.rowwise() - mean).array().rowwise() * inv_std.array()).matrix();
    Matrix pre = (normalized.array().rowwise() * param(gcn_index(l, 2)).row(0).array()).matrix();
    pre.rowwise() += param(gcn_index(l, 3)).row(0);
    h = leaky(pre, slope);
    if (cache) {
      auto& c = cache->layers[static_cast<std::size_t>(l)];
      c.propagated = std::move(propagated);
      c.normalized = std::move(normalized);
      c.pre = std::move(pre);
      c.inv_std = inv_std;
    }
  }
  const int d = config_.hidden;
  Eigen::VectorXd out(2 * d);
  out.head(d) = h.colwise().mean().transpose();
  std::vector<Eigen::Index> argmax(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) out(d + j) = h.col(j).maxCoeff(&argmax[static_cast<std::size_t>(j)]);
  if (cache) {
    cache->output = std::move(h);
    cache->argmax = std::move(argmax);
  }
  return out;
}

void PolicyNetwork::encode_backward(const GraphInput& graph, const GraphCache& cache, const Eigen::VectorXd& grad_h,
                                    std::vector<Matrix>& gradient) const {
  const auto n = graph.features.rows();
  const int d = config_.hidden;
  Matrix grad = Matrix::Constant(n, d, 0.0);
  grad.rowwise() += grad_h.head(d).transpose() / static_cast<double>(n);
  for (int j = 0; j < d; ++j) grad(cache.argmax[static_cast<std::size_t>(j)], j) += grad_h(d + j);

  for (int l = config_.gcn_layers - 1; l >= 0; --l) {
    const auto& c = cache.layers[static_cast<std::size_t>(l)];
    const Matrix d_pre = leaky_grad(c.pre, grad, config_.leaky_slope);
    gradient[gcn_index(l, 2)] += (d_pre.array() * c.normalized.array()).colwise().sum().matrix();
    gradient[gcn_index(l, 3)] += d_pre.colwise().sum();
    const Matrix d_norm = (d_pre.array().rowwise() * param(gcn_index(l, 2)).row(0).array()).matrix();
    const RowVector sum_d = d_norm.colwise().sum();
    const RowVector sum_dx = (d_norm.array() * c.normalized.array()).colwise().sum();
    const double inv_n = 1.0 / static_cast<double>(n);
    Matrix d_z = d_norm;
    d_z.rowwise() -= sum_d * inv_n;
    d_z -= (c.normalized.array().rowwise() * (sum_dx * inv_n).array()).matrix();
    d_z = (d_z.array().rowwise() * c.inv_std.array()).matrix();
    gradient[gcn_index(l, 0)] += c.propagated.transpose() * d_z;
    gradient[gcn_index(l, 1)] += d_z.colwise().sum();
    if (l > 0) grad = graph.adjacency.transpose() * (d_z * param(gcn_index(l, 0)).transpose());
  }
}

Eigen::VectorXd PolicyNetwork::encode_aig(const GraphInput& graph) const { return encode(graph, false, nullptr); }

Eigen::VectorXd PolicyNetwork::encode_recipe(std::span<const Action> prefix) const {
  if (prefix.size() > static_cast<std::size_t>(config_.max_length)) {
    throw std::invalid_argument("recipe prefix longer than the position table");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(config_.embedding);
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    out += param(embed_index(0)).row(action_index(prefix[i])).transpose();
    out += param(embed_index(1)).row(static_cast<Eigen::Index>(i)).transpose();
  }
  return out;
}

Eigen::VectorXd PolicyNetwork::logits(const Eigen::VectorXd& h_aig, std::span<const Action> prefix) const {
  if (h_aig.size() != embedding_size()) throw std::invalid_argument("circuit embedding has the wrong size");
  RowVector x(h_aig.size() + config_.embedding);
  x << h_aig.transpose(), encode_recipe(prefix).transpose();
  const double s = config_.leaky_slope;
  const RowVector z1 = leaky(x * param(head_index(0)) + param(head_index(1)), s);
  const RowVector z2 = leaky(z1 * param(head_index(2)) + param(head_index(3)), s);
  return (z2 * param(head_index(4)) + param(head_index(5))).transpose();
}

Distribution PolicyNetwork::policy(const Eigen::VectorXd& h_aig, std::span<const Action> prefix) const {
  const Eigen::VectorXd p = softmax(logits(h_aig, prefix));
  Distribution out;
  for (int i = 0; i < kActionCount; ++i) out[static_cast<std::size_t>(i)] = p(i);
  return out;
}

Distribution PolicyNetwork::forward(const Aig& aig, const Recipe& prefix) const {
  return policy(encode_aig(aig), prefix.actions());
}

double PolicyNetwork::loss(std::span<const GraphInput> graphs, std::span<const Sample> samples,
                           std::vector<Matrix>* gradient, bool update_running_stats) {
  if (samples.empty()) throw std::invalid_argument("loss needs at least one sample");
  if (gradient) {
    gradient->clear();
    for (const auto& p : params_) gradient->push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
  }
  std::map<std::size_t, std::pair<GraphCache, Eigen::VectorXd>> encoded;
  for (const auto& s : samples) {
    if (s.graph >= graphs.size()) throw std::out_of_range("sample refers to a missing graph");
    if (encoded.count(s.graph)) continue;
    GraphCache cache;
    Eigen::VectorXd h = encode(graphs[s.graph], true, &cache);
    encoded.emplace(s.graph, std::make_pair(std::move(cache), std::move(h)));
  }
  std::map<std::size_t, Eigen::VectorXd> grad_h;
  const double slope = config_.leaky_slope;
  const double scale = 1.0 / static_cast<double>(samples.size());
  const int dh = embedding_size();
  double total = 0.0;
  for (const auto& s : samples) {
    const Eigen::VectorXd& h = encoded.at(s.graph).second;
    RowVector x(dh + config_.embedding);
    x << h.transpose(), encode_recipe(s.prefix).transpose();
    const RowVector a1 = x * param(head_index(0)) + param(head_index(1));
    const RowVector z1 = leaky(a1, slope);
    const RowVector a2 = z1 * param(head_index(2)) + param(head_index(3));
    const RowVector z2 = leaky(a2, slope);
    const Eigen::VectorXd p = softmax((z2 * param(head_index(4)) + param(head_index(5))).transpose());
    total += cross_entropy({p.data(), static_cast<std::size_t>(p.size())}, s.target);
    if (!gradient) continue;

    auto& g = *gradient;
    RowVector d_logits(kActionCount);
    const double mass = std::accumulate(s.target.begin(), s.target.end(), 0.0);
    for (int i = 0; i < kActionCount; ++i) d_logits(i) = scale * (mass * p(i) - s.target[static_cast<std::size_t>(i)]);
    g[head_index(4)] += z2.transpose() * d_logits;
    g[head_index(5)] += d_logits;
    const RowVector d_a2 = leaky_grad(a2, d_logits * param(head_index(4)).transpose(), slope);
    g[head_index(2)] += z1.transpose() * d_a2;
    g[head_index(3)] += d_a2;
    const RowVector d_a1 = leaky_grad(a1, d_a2 * param(head_index(2)).transpose(), slope);
    g[head_index(0)] += x.transpose() * d_a1;
    g[head_index(1)] += d_a1;
    const RowVector d_x = d_a1 * param(head_index(0)).transpose();
    const RowVector d_recipe = d_x.tail(config_.embedding);
    for (std::size_t i = 0; i < s.prefix.size(); ++i) {
      g[embed_index(0)].row(action_index(s.prefix[i])) += d_recipe;
      g[embed_index(1)].row(static_cast<Eigen::Index>(i)) += d_recipe;
    }
    auto [it, fresh] = grad_h.try_emplace(s.graph, Eigen::VectorXd::Zero(dh));
    it->second += d_x.head(dh).transpose();
  }
  if (gradient) {
    for (const auto& [graph, d] : grad_h) encode_backward(graphs[graph], encoded.at(graph).first, d, *gradient);
  }
  if (update_running_stats) {
    const double m = config_.bn_momentum;
    for (const auto& [graph, entry] : encoded) {
      const auto n = static_cast<double>(graphs[graph].features.rows());
      for (int l = 0; l < config_.gcn_layers; ++l) {
        const auto& c = entry.first.layers[static_cast<std::size_t>(l)];
        Matrix z = c.propagated * param(gcn_index(l, 0));
        z.rowwise() += param(gcn_index(l, 1)).row(0);
        const RowVector mean = z.colwise().mean();
        RowVector var = (z.rowwise() - mean).array().square().colwise().mean();
        if (n > 1) var *= n / (n - 1);
        auto& rm = buffers_[2 * static_cast<std::size_t>(l)].value;
        auto& rv = buffers_[2 * static_cast<std::size_t>(l) + 1].value;
        rm = (1 - m) * rm + m * mean;
        rv = (1 - m) * rv + m * var;
      }
    }
  }
  return total * scale;
}

std::string PolicyNetwork::serialize() const {
  Writer w;
  w.bytes({kMagic, sizeof kMagic});
  w.u32(kFormatVersion);
  w.u32(static_cast<std::uint32_t>(config_.gcn_layers));
  w.u32(static_cast<std::uint32_t>(config_.hidden));
  w.u32(static_cast<std::uint32_t>(config_.embedding));
  w.u32(static_cast<std::uint32_t>(config_.head_hidden));
  w.u32(static_cast<std::uint32_t>(config_.max_length));
  w.f64(config_.leaky_slope);
  w.f64(config_.final_layer_scale);
  w.f64(config_.bn_momentum);
  w.f64(config_.bn_epsilon);
  w.u64(config_.seed);
  w.u32(static_cast<std::uint32_t>(params_.size()));
  for (const auto& t : params_) w.matrix(t);
  w.u32(static_cast<std::uint32_t>(buffers_.size()));
  for (const auto& t : buffers_) w.matrix(t);
  w.u64(fnv1a(w.str()));
  return std::move(w.str());
}

PolicyNetwork PolicyNetwork::deserialize(std::string_view bytes) {
  if (bytes.size() < sizeof kMagic || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw PolicyError("not a policy model file (bad magic)");
  }
  Reader header(bytes.substr(sizeof kMagic));
  const auto version = header.u32();
  if (version != kFormatVersion) {
    throw PolicyError("unsupported model format version " + std::to_string(version) + " (expected " +
                      std::to_string(kFormatVersion) + ")");
  }
  if (bytes.size() < sizeof kMagic + 12) throw PolicyError("model checksum mismatch");
  const auto body = bytes.substr(0, bytes.size() - 8);
  Reader tail(bytes.substr(bytes.size() - 8));
  if (tail.u64() != fnv1a(body)) throw PolicyError("model checksum mismatch");

  Reader r(body.substr(sizeof kMagic + 4));
  PolicyConfig c;
  c.gcn_layers = static_cast<int>(r.u32());
  c.hidden = static_cast<int>(r.u32());
  c.embedding = static_cast<int>(r.u32());
  c.head_hidden = static_cast<int>(r.u32());
  c.max_length = static_cast<int>(r.u32());
  c.leaky_slope = r.f64();
  c.final_layer_scale = r.f64();
  c.bn_momentum = r.f64();
  c.bn_epsilon = r.f64();
  c.seed = r.u64();
  PolicyNetwork net(c);
  if (r.u32() != net.params_.size()) throw PolicyError("model parameter count mismatch");
  for (auto& t : net.params_) read_into(r, t);
  if (r.u32() != net.buffers_.size()) throw PolicyError("model buffer count mismatch");
  for (auto& t : net.buffers_) read_into(r, t);
  if (r.remaining() != 0) throw PolicyError("trailing bytes in model file");
  return net;
}

void PolicyNetwork::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PolicyError("cannot open " + path.string() + " for writing");
  const auto bytes = serialize();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw PolicyError("failed writing " + path.string());
}

PolicyNetwork PolicyNetwork::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PolicyError("cannot open model file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str());
}

Adam::Adam(double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {}

void Adam::step(std::vector<PolicyNetwork::Tensor>& params, const std::vector<Matrix>& gradient) {
  if (gradient.size() != params.size()) throw std::invalid_argument("gradient does not match parameters");
  if (m_.empty()) {
    for (const auto& p : params) {
      m_.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
      v_.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
    }
  }
  ++step_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1 - beta1_) * gradient[i];
    v_[i] = beta2_ * v_[i] + (1 - beta2_) * gradient[i].cwiseProduct(gradient[i]);
    params[i].value.array() -= lr_ * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps_);
  }
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("replay capacity must be positive");
}

void ReplayBuffer::push(Entry entry) {
  if (entries_.size() == capacity_) entries_.pop_front();
  entries_.push_back(std::move(entry));
}

std::vector<ReplayBuffer::Entry> ReplayBuffer::sample(std::size_t count, std::mt19937_64& rng) const {
  std::vector<std::size_t> order(entries_.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t k = std::min(count, order.size());
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  std::vector<Entry> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(entries_[order[i]]);
  return out;
}

void write_loss_csv(std::ostream& out, std::span<const double> loss) {
  out << "epoch,loss\n";
  const auto precision = out.precision(17);
  for (std::size_t i = 0; i < loss.size(); ++i) out << i << ',' << loss[i] << '\n';
  out.precision(precision);
}

PriorFn make_prior(const PolicyNetwork& net, const RecipeEnvironment& env) {
  auto model = std::make_shared<const PolicyNetwork>(net);
  auto h = std::make_shared<const Eigen::VectorXd>(model->encode_aig(env.root()));
  std::vector<Action> actions;
  for (int i = 0; i < env.action_count(); ++i) actions.push_back(env.action(i));
  return [model, h, actions](std::span<const int> prefix) {
    std::vector<Action> recipe;
    for (int i : prefix) recipe.push_back(actions.at(static_cast<std::size_t>(i)));
    const auto p = model->policy(*h, recipe);
    std::vector<double> out;
    double total = 0.0;
    for (auto a : actions) {
      out.push_back(p[static_cast<std::size_t>(action_index(a))]);
      total += out.back();
    }
    for (auto& v : out) v /= total;
    return out;
  };
}

TrainingReport train(PolicyNetwork& net, std::span<const Aig> circuits, const TrainingConfig& config,
                     const EpochCallback& on_epoch) {
  if (circuits.empty()) throw std::invalid_argument("training needs at least one circuit");
  if (config.epochs < 1) throw std::invalid_argument("epochs must be at least 1");
  if (config.length > static_cast<std::size_t>(net.config().max_length)) {
    throw std::invalid_argument("recipe length exceeds the policy's position table");
  }
  std::vector<GraphInput> graphs;
  std::vector<std::unique_ptr<RecipeEnvironment>> envs;
  for (const auto& c : circuits) {
    graphs.push_back(prepare_graph(c));
    envs.push_back(std::make_unique<RecipeEnvironment>(c, config.length));
  }
  const std::size_t batch = config.length * circuits.size();
  ReplayBuffer buffer(2 * batch);
  Adam adam(config.learning_rate);
  std::mt19937_64 rng(config.seed);
  TrainingReport report;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = 0; i < circuits.size(); ++i) {
      MctsConfig mc;
      mc.c_uct = config.c_uct;
      mc.iterations = config.iterations;
      mc.alpha = config.alpha;
      mc.seed = config.seed + 1000003ULL * static_cast<std::uint64_t>(epoch) + i;
      const auto result = generate_recipe(*envs[i], mc, make_prior(net, *envs[i]));
      report.synthesis_calls += result.synthesis_calls;
      for (const auto& level : result.levels) {
        ReplayBuffer::Entry e;
        e.circuit = i;
        e.prefix = envs[i]->recipe(level.prefix).actions();
        std::copy(level.pi.begin(), level.pi.end(), e.pi.begin());
        e.epoch = epoch;
        buffer.push(std::move(e));
      }
    }
    std::vector<PolicyNetwork::Sample> samples;
    for (auto& e : buffer.sample(batch, rng)) samples.push_back({e.circuit, std::move(e.prefix), e.pi});
    std::vector<Matrix> gradient;
    const double loss = net.loss(graphs, samples, &gradient, true);
    adam.step(net.parameters(), gradient);
    report.loss.push_back(loss);
    if (on_epoch) on_epoch(epoch, loss);
  }
  return report;
}

}  // namespace lsopt
