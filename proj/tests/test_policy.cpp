#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "lsopt/generators.hpp"
#include "lsopt/policy.hpp"

using namespace lsopt;

namespace {

PolicyConfig small_config() {
  PolicyConfig c;
  c.hidden = 5;
  c.embedding = 4;
  c.head_hidden = 6;
  c.max_length = 4;
  c.final_layer_scale = 1.0;
  c.seed = 3;
  return c;
}

std::vector<Action> random_prefix(std::size_t length, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, kActionCount - 1);
  std::vector<Action> out;
  for (std::size_t i = 0; i < length; ++i) out.push_back(action_from_index(pick(rng)));
  return out;
}

GraphInput permuted(const GraphInput& g, const std::vector<int>& perm) {
  const auto n = g.features.rows();
  GraphInput out;
  out.features.resize(n, g.features.cols());
  for (Eigen::Index i = 0; i < n; ++i) out.features.row(perm[static_cast<std::size_t>(i)]) = g.features.row(i);
  std::vector<Eigen::Triplet<double>> t;
  for (Eigen::Index r = 0; r < g.adjacency.outerSize(); ++r) {
    for (decltype(g.adjacency)::InnerIterator it(g.adjacency, r); it; ++it) {
      t.emplace_back(perm[static_cast<std::size_t>(it.row())], perm[static_cast<std::size_t>(it.col())], it.value());
    }
  }
  out.adjacency.resize(n, n);
  out.adjacency.setFromTriplets(t.begin(), t.end());
  return out;
}

double leaky(double v, double slope) { return v > 0 ? v : slope * v; }

}  // namespace

TEST_CASE("normalized adjacency of a single and gate") {
  AigBuilder b;
  const Lit x = b.add_input(), y = b.add_input();
  b.add_output(!b.add_and(x, !y));
  const auto g = prepare_graph(std::move(b).build());
  REQUIRE(g.adjacency.rows() == 4);
  const Eigen::MatrixXd a = g.adjacency;
  // Degrees with self-loop: const 1, inputs 2, gate 3.
  CHECK(a(0, 0) == doctest::Approx(1.0));
  CHECK(a(1, 1) == doctest::Approx(0.5));
  CHECK(a(3, 3) == doctest::Approx(1.0 / 3));
  CHECK(a(1, 3) == doctest::Approx(1.0 / std::sqrt(6.0)));
  CHECK(a(3, 2) == doctest::Approx(1.0 / std::sqrt(6.0)));
  CHECK(a(1, 2) == 0.0);
  CHECK((a - a.transpose()).norm() == 0.0);
  CHECK(g.features.rows() == 4);
}

TEST_CASE("zero-weight network pools to a constant vector") {
  PolicyNetwork net(small_config());
  for (auto& p : net.parameters()) p.value.setZero();
  const auto h = net.encode_aig(generate_circuit(Family::ripple_adder, 3));
  const int d = net.config().hidden;
  CHECK(h.head(d) == h.tail(d));
  CHECK(h.norm() == 0.0);
}

TEST_CASE("circuit embedding is invariant to node order") {
  PolicyNetwork net;
  std::mt19937_64 rng(9);
  for (auto family : {Family::array_multiplier, Family::random_dag}) {
    const auto g = prepare_graph(generate_circuit(family, 4, 2));
    std::vector<int> perm(static_cast<std::size_t>(g.features.rows()));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto h0 = net.encode_aig(g);
    const auto h1 = net.encode_aig(permuted(g, perm));
    CHECK((h0 - h1).cwiseAbs().maxCoeff() < 1e-9);

    // Batch statistics are order-invariant too.
    std::vector<PolicyNetwork::Sample> s0 = {{0, {Action::Balance}, {1, 0, 0, 0, 0, 0, 0}}};
    std::vector<GraphInput> a = {g}, b = {permuted(g, perm)};
    CHECK(net.loss(a, s0) == doctest::Approx(net.loss(b, s0)).epsilon(1e-12));
  }
}

TEST_CASE("single-node graph reduces to a dense chain") {
  PolicyConfig c = small_config();
  c.seed = 21;
  PolicyNetwork net(c);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto& p : net.parameters()) p.value = p.value.unaryExpr([&](double) { return u(rng); });
  for (std::size_t i = 0; i < net.buffers().size(); ++i) {
    net.buffers()[i].value = net.buffers()[i].value.unaryExpr([&](double) { return i % 2 ? 0.5 + std::abs(u(rng)) : u(rng); });
  }

  GraphInput g;
  g.adjacency.resize(1, 1);
  g.adjacency.insert(0, 0) = 1.0;
  g.features = Eigen::MatrixXd(1, kNodeFeatureCount);
  g.features << 0, 1, 0, 0.5, 0.25, 0.75;

  std::vector<double> row(g.features.data(), g.features.data() + kNodeFeatureCount);
  const auto& params = net.parameters();
  for (int l = 0; l < c.gcn_layers; ++l) {
    const auto& w = params[static_cast<std::size_t>(4 * l)].value;
    std::vector<double> next(static_cast<std::size_t>(c.hidden));
    for (int j = 0; j < c.hidden; ++j) {
      double z = params[static_cast<std::size_t>(4 * l + 1)].value(0, j);
      for (std::size_t i = 0; i < row.size(); ++i) z += row[i] * w(static_cast<Eigen::Index>(i), j);
      const double mean = net.buffers()[static_cast<std::size_t>(2 * l)].value(0, j);
      const double var = net.buffers()[static_cast<std::size_t>(2 * l + 1)].value(0, j);
      const double y = (z - mean) / std::sqrt(var + c.bn_epsilon) * params[static_cast<std::size_t>(4 * l + 2)].value(0, j) +
                       params[static_cast<std::size_t>(4 * l + 3)].value(0, j);
      next[static_cast<std::size_t>(j)] = leaky(y, c.leaky_slope);
    }
    row = next;
  }
  const auto h = net.encode_aig(g);
  for (int j = 0; j < c.hidden; ++j) {
    CHECK(h(j) == doctest::Approx(row[static_cast<std::size_t>(j)]).epsilon(1e-12));
    CHECK(h(c.hidden + j) == doctest::Approx(row[static_cast<std::size_t>(j)]).epsilon(1e-12));
  }

  AigBuilder b;
  b.add_output(Lit::const1());
  const Aig constant = std::move(b).build();
  CHECK(net.encode_aig(constant).allFinite());
}

TEST_CASE("recipe encoding") {
  const PolicyNetwork net;
  CHECK(net.encode_recipe(std::vector<Action>{}).norm() == 0.0);
  const auto& p = net.parameters();
  const auto& actions = p[static_cast<std::size_t>(4 * net.config().gcn_layers)].value;
  const auto& positions = p[static_cast<std::size_t>(4 * net.config().gcn_layers + 1)].value;
  const Eigen::VectorXd one = net.encode_recipe(std::vector<Action>{Action::Refactor});
  const Eigen::VectorXd expected = (actions.row(action_index(Action::Refactor)) + positions.row(0)).transpose();
  CHECK(one == expected);
  const auto ab = net.encode_recipe(std::vector<Action>{Action::Balance, Action::Rewrite});
  const auto ba = net.encode_recipe(std::vector<Action>{Action::Rewrite, Action::Balance});
  CHECK((ab - ba).norm() > 0.0);
  CHECK(ab.size() == net.config().embedding);
  CHECK_THROWS(net.encode_recipe(std::vector<Action>(11, Action::Balance)));
}

TEST_CASE("forward is a near-uniform distribution at initialization") {
  const PolicyNetwork net;
  std::mt19937_64 rng(1);
  std::vector<Eigen::VectorXd> embeddings;
  for (auto f : {Family::ripple_adder, Family::comparator, Family::mux_tree, Family::random_dag}) {
    embeddings.push_back(net.encode_aig(generate_circuit(f, 3, 1)));
  }
  double worst_ratio = 1.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto& h = embeddings[static_cast<std::size_t>(trial) % embeddings.size()];
    const auto prefix = random_prefix(static_cast<std::size_t>(trial % 10), rng);
    const auto p = net.policy(h, prefix);
    const double sum = std::accumulate(p.begin(), p.end(), 0.0);
    CHECK(std::abs(sum - 1.0) <= 1e-9);
    for (double v : p) CHECK((v > 0.0 && v < 1.0));
    worst_ratio = std::max(worst_ratio, *std::max_element(p.begin(), p.end()) / *std::min_element(p.begin(), p.end()));
  }
  CHECK(worst_ratio < 1.2);

  const Aig adder = generate_circuit(Family::ripple_adder, 4);
  const auto p = net.forward(adder, Recipe::parse("b;rw"));
  CHECK(p == net.policy(net.encode_aig(adder), Recipe::parse("b;rw").actions()));
}

TEST_CASE("cross entropy") {
  const std::vector<double> one_hot = {0, 0, 1, 0, 0, 0, 0};
  CHECK(cross_entropy(one_hot, one_hot) <= 1e-11);
  const std::vector<double> uniform(7, 1.0 / 7);
  CHECK(cross_entropy(uniform, uniform) == doctest::Approx(1.945910149055313).epsilon(1e-12));
  const std::vector<double> p = {0.1, 0.2, 0.05, 0.3, 0.15, 0.1, 0.1};
  const std::vector<double> t = {0.3, 0.0, 0.2, 0.1, 0.1, 0.25, 0.05};
  long double expected = 0;
  for (std::size_t i = 0; i < p.size(); ++i) expected -= t[i] * std::log(static_cast<long double>(p[i]));
  CHECK(std::abs(cross_entropy(p, t) - static_cast<double>(expected)) < 1e-12);
  const std::vector<double> zero = {0, 1, 0, 0, 0, 0, 0};
  CHECK(cross_entropy(zero, one_hot) == doctest::Approx(-std::log(1e-12)));
}

TEST_CASE("analytic gradients match central differences") {
  PolicyNetwork net(small_config());
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  // Move scale, shift and biases off their initial values so every path carries gradient.
  for (auto& p : net.parameters()) {
    if (p.name.find("bias") != std::string::npos || p.name.find("bn_") != std::string::npos) {
      p.value = p.value.unaryExpr([&](double v) { return v + u(rng); });
    }
  }
  const std::vector<GraphInput> graphs = {prepare_graph(generate_circuit(Family::ripple_adder, 2)),
                                          prepare_graph(generate_circuit(Family::random_dag, 3, 5))};
  std::vector<PolicyNetwork::Sample> samples;
  for (int i = 0; i < 6; ++i) {
    PolicyNetwork::Sample s;
    s.graph = static_cast<std::size_t>(i % 2);
    s.prefix = random_prefix(static_cast<std::size_t>(i % 4), rng);
    double total = 0;
    for (auto& v : s.target) total += (v = u(rng) + 0.5);
    for (auto& v : s.target) v /= total;
    samples.push_back(s);
  }

  std::vector<Eigen::MatrixXd> grad;
  net.loss(graphs, samples, &grad);
  const double h = 1e-4;
  double worst = 0.0;
  std::string worst_name;
  for (std::size_t k = 0; k < net.parameters().size(); ++k) {
    auto& value = net.parameters()[k].value;
    for (Eigen::Index i = 0; i < value.size(); ++i) {
      const double saved = value.data()[i];
      value.data()[i] = saved + h;
      const double up = net.loss(graphs, samples);
      value.data()[i] = saved - h;
      const double down = net.loss(graphs, samples);
      value.data()[i] = saved;
      const double numeric = (up - down) / (2 * h);
      const double analytic = grad[k].data()[i];
      const double rel = std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-5});
      if (rel > worst) {
        worst = rel;
        worst_name = net.parameters()[k].name;
      }
    }
  }
  INFO("worst parameter: " << worst_name);
  CHECK(worst < 1e-3);
}

TEST_CASE("overfits a fixed replay buffer") {
  PolicyNetwork net;
  const std::vector<GraphInput> graphs = {prepare_graph(generate_circuit(Family::ripple_adder, 3))};
  std::mt19937_64 rng(2);
  std::vector<PolicyNetwork::Sample> samples;
  for (std::size_t level = 0; level < 10; ++level) {
    PolicyNetwork::Sample s;
    s.prefix = random_prefix(level, rng);
    s.target[rng() % kActionCount] = 1.0;
    samples.push_back(s);
  }
  Adam adam(0.01);
  std::vector<Eigen::MatrixXd> grad;
  const double initial = net.loss(graphs, samples, &grad, true);
  CHECK(initial == doctest::Approx(std::log(7.0)).epsilon(0.02));
  double last = initial;
  for (int step = 0; step < 200; ++step) {
    last = net.loss(graphs, samples, &grad, true);
    adam.step(net.parameters(), grad);
  }
  last = net.loss(graphs, samples);
  CHECK(last < 0.1 * initial);
}

TEST_CASE("replay buffer evicts the oldest entries") {
  ReplayBuffer rb(4);
  for (int i = 0; i < 7; ++i) {
    ReplayBuffer::Entry e;
    e.epoch = i;
    rb.push(e);
    CHECK(rb.size() <= 4);
  }
  REQUIRE(rb.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(rb.entries()[static_cast<std::size_t>(i)].epoch == i + 3);
  std::mt19937_64 rng(1);
  const auto s = rb.sample(3, rng);
  CHECK(s.size() == 3);
  std::set<int> seen;
  for (const auto& e : s) seen.insert(e.epoch);
  CHECK(seen.size() == 3);
  CHECK(rb.sample(10, rng).size() == 4);
}

TEST_CASE("training is deterministic and bounded") {
  const std::vector<Aig> circuits = {generate_circuit(Family::ripple_adder, 2), generate_circuit(Family::mux_tree, 1)};
  TrainingConfig tc;
  tc.epochs = 3;
  tc.iterations = 8;
  tc.length = 3;
  tc.seed = 5;
  PolicyConfig pc;
  pc.max_length = 3;
  PolicyNetwork a(pc), b(pc);
  std::vector<int> epochs;
  const auto ra = train(a, circuits, tc, [&](int e, double) { epochs.push_back(e); });
  const auto rb = train(b, circuits, tc);
  CHECK(ra.loss.size() == 3);
  CHECK(ra.loss == rb.loss);
  CHECK(epochs == std::vector<int>{0, 1, 2});
  CHECK(a.serialize() == b.serialize());
  for (double l : ra.loss) CHECK(std::isfinite(l));

  std::ostringstream csv;
  write_loss_csv(csv, ra.loss);
  CHECK(csv.str().rfind("epoch,loss\n0,", 0) == 0);

  CHECK_THROWS(train(a, std::vector<Aig>{}, tc));
  tc.length = 4;
  CHECK_THROWS(train(a, circuits, tc));
}

TEST_CASE("prior adapter follows the environment's action order") {
  const PolicyNetwork net;
  const Aig adder = generate_circuit(Family::ripple_adder, 3);
  RecipeEnvironment env(adder, 10, {Action::Resub, Action::Balance});
  const auto prior = make_prior(net, env);
  const std::vector<int> prefix = {1, 0};
  const auto p = prior(prefix);
  REQUIRE(p.size() == 2);
  CHECK(p[0] + p[1] == doctest::Approx(1.0));
  const auto full = net.policy(net.encode_aig(adder), std::vector<Action>{Action::Balance, Action::Resub});
  CHECK(p[0] / p[1] == doctest::Approx(full[action_index(Action::Resub)] / full[action_index(Action::Balance)]));
}

TEST_CASE("save and load") {
  PolicyNetwork net;
  TrainingConfig tc;
  const auto dir = std::filesystem::temp_directory_path() / "lsopt_policy_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "model.bin";
  net.save(path);
  const auto back = PolicyNetwork::load(path);
  const Aig g = generate_circuit(Family::comparator, 3);
  CHECK(back.forward(g, Recipe::parse("rw;b")) == net.forward(g, Recipe::parse("rw;b")));
  CHECK(back.serialize() == net.serialize());

  const std::string bytes = net.serialize();
  try {
    PolicyNetwork::deserialize(std::string_view(bytes).substr(0, bytes.size() - 100));
    FAIL("truncated model accepted");
  } catch (const PolicyError& e) {
    CHECK(std::string(e.what()).find("checksum") != std::string::npos);
  }
  std::string bumped = bytes;
  bumped[8] = 2;
  try {
    PolicyNetwork::deserialize(bumped);
    FAIL("future version accepted");
  } catch (const PolicyError& e) {
    CHECK(std::string(e.what()).find("version 2") != std::string::npos);
  }
  std::string flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x10;
  CHECK_THROWS_AS(PolicyNetwork::deserialize(flipped), PolicyError);
  CHECK_THROWS_AS(PolicyNetwork::deserialize("LSOPTNEX"), PolicyError);
  CHECK_THROWS_AS(PolicyNetwork::load(dir / "missing.bin"), PolicyError);
  std::filesystem::remove_all(dir);
}
