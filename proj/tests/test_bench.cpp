#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "lsopt/aiger.hpp"
#include "lsopt/bench.hpp"
#include "lsopt/generators.hpp"
#include "lsopt/simulate.hpp"

using namespace lsopt;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("lsopt_bench_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

EvalConfig small_eval() {
  EvalConfig c;
  c.circuits = {"ripple_adder_3", "comparator_2", "random_dag_5_s1"};
  c.seeds = {1, 2};
  c.budget = 20;
  c.iterations = 64;
  return c;
}

std::vector<bool> eval1(const Aig& g, const std::vector<bool>& in) {
  BitMatrix m(1, in.size());
  for (std::size_t i = 0; i < in.size(); ++i) m.set(0, i, in[i]);
  const auto out = simulate(g, m);
  std::vector<bool> v;
  for (std::size_t o = 0; o < out.cols(); ++o) v.push_back(out.get(0, o));
  return v;
}

std::string runs_csv(const EvalReport& r) {
  std::ostringstream out;
  r.write_runs_csv(out);
  return out.str();
}

}  // namespace

TEST_CASE("generated circuits match their integer semantics") {
  const Aig adder = generate_circuit(Family::ripple_adder, 4);
  CHECK(adder.num_inputs() == 8);
  CHECK(adder.num_outputs() == 5);
  for (unsigned a = 0; a < 16; ++a) {
    for (unsigned b = 0; b < 16; ++b) {
      std::vector<bool> in;
      for (int i = 0; i < 4; ++i) in.push_back((a >> i) & 1);
      for (int i = 0; i < 4; ++i) in.push_back((b >> i) & 1);
      const auto out = eval1(adder, in);
      unsigned sum = 0;
      for (int i = 0; i < 5; ++i) sum |= static_cast<unsigned>(out[static_cast<std::size_t>(i)]) << i;
      CHECK(sum == (a + b) % 32);
    }
  }

  const Aig mux = generate_circuit(Family::mux_tree, 2);
  CHECK(mux.num_inputs() == 6);
  for (unsigned bits = 0; bits < 64; ++bits) {
    std::vector<bool> in;
    for (int i = 0; i < 6; ++i) in.push_back((bits >> i) & 1);
    const unsigned select = bits >> 4;
    CHECK(eval1(mux, in)[0] == static_cast<bool>((bits >> select) & 1));
  }

  const Aig cmp = generate_circuit(Family::comparator, 3);
  for (unsigned a = 0; a < 8; ++a) {
    for (unsigned b = 0; b < 8; ++b) {
      std::vector<bool> in;
      for (int i = 0; i < 3; ++i) in.push_back((a >> i) & 1);
      for (int i = 0; i < 3; ++i) in.push_back((b >> i) & 1);
      const auto out = eval1(cmp, in);
      CHECK(out[0] == (a < b));
      CHECK(out[1] == (a == b));
      CHECK(out[2] == (a > b));
    }
  }

  CHECK(write_aiger(generate_circuit(Family::random_dag, 10, 7)) == write_aiger(generate_circuit(Family::random_dag, 10, 7)));
  CHECK(write_aiger(generate_circuit(Family::random_dag, 10, 7)) != write_aiger(generate_circuit(Family::random_dag, 10, 8)));
  CHECK_THROWS_AS(generate_circuit(Family::mux_tree, 5), std::invalid_argument);
  CHECK_THROWS_AS(generate_circuit(Family::ripple_adder, 0), std::invalid_argument);
}

TEST_CASE("circuit references") {
  CHECK(load_circuit("ripple_adder_4") == generate_circuit(Family::ripple_adder, 4));
  CHECK(load_circuit("random_dag_10_s3") == generate_circuit(Family::random_dag, 10, 3));
  CHECK_THROWS(load_circuit("adder_4"));
  CHECK_THROWS(load_circuit("ripple_adder"));
  CHECK_THROWS(load_circuit("missing.aag"));

  const auto dir = scratch_dir("load");
  const Aig g = generate_circuit(Family::comparator, 3);
  write_aiger_file(g, dir / "cmp.aag");
  const Aig back = load_circuit((dir / "cmp.aag").string());
  CHECK(back == g);
  std::filesystem::remove_all(dir);
}

TEST_CASE("dataset split") {
  const auto s = default_split();
  CHECK(s.train.size() == 6);
  CHECK(s.test.size() == 6);
  CHECK_NOTHROW(s.validate());
  for (const auto* list : {&s.train, &s.validation, &s.test}) {
    for (const auto& id : *list) CHECK_NOTHROW(load_circuit(id));
  }
  DatasetSplit bad = s;
  bad.test.push_back(s.train.front());
  CHECK_THROWS(bad.validate());

  const auto dir = scratch_dir("split");
  s.write_json(dir / "split.json");
  const auto back = DatasetSplit::read_json(dir / "split.json");
  CHECK(back.train == s.train);
  CHECK(back.validation == s.validation);
  CHECK(back.test == s.test);
  std::filesystem::remove_all(dir);
}

TEST_CASE("method specs") {
  CHECK(MethodSpec::parse("pure_mcts").method == Method::pure_mcts);
  CHECK(MethodSpec::parse("agent_guided").alpha == 1.0);
  CHECK(MethodSpec::parse("agent_guided(alpha=0.25)").alpha == 0.25);
  CHECK(MethodSpec::parse("agent_with_ood(T=0.06)").temperature == 0.06);
  for (const char* text : {"pure_mcts", "agent_guided", "agent_guided(alpha=0.5)", "agent_with_ood", "agent_with_ood(T=0.06)"}) {
    CHECK(MethodSpec::parse(text).label() == text);
  }
  CHECK_THROWS(MethodSpec::parse("agent_guided(alpha=2)"));
  CHECK_THROWS(MethodSpec::parse("pure_mcts(T=1)"));
  CHECK_THROWS(MethodSpec::parse("random"));
}

TEST_CASE("aggregate helpers") {
  CHECK(geomean_reduction({10.0}) == doctest::Approx(10.0));
  CHECK(geomean_reduction({0.0, 0.0}) == doctest::Approx(0.0));
  // (1.2 * 0.9)^(1/2) = 1.03923...
  CHECK(geomean_reduction({20.0, -10.0}) == doctest::Approx(100.0 * (std::sqrt(1.2 * 0.9) - 1.0)));

  RunRecord a;
  a.trace = {{0, "x", 0, 0, 50, 0, 0}, {1, "y", 0, 0, 40, 0, 0}, {2, "z", 0, 0, 30, 0, 0}};
  a.best_adp = 30;
  RunRecord b;
  b.trace = {{0, "x", 0, 0, 35, 0, 0}, {1, "y", 0, 0, 30, 0, 0}};
  b.best_adp = 30;
  CHECK(calls_to_reach(a.trace, 40) == 2);
  CHECK(calls_to_reach(a.trace, 10) == 0);
  CHECK(iso_qor_speedup(a, a) == 1.0);
  CHECK(iso_qor_speedup(b, a) == doctest::Approx(1.5));
  CHECK(iso_qor_speedup(a, b) == doctest::Approx(2.0 / 3.0));
  RunRecord c;
  c.trace = {{0, "x", 0, 0, 45, 0, 0}};
  c.best_adp = 45;
  CHECK(iso_qor_speedup(c, a) == 1.0);
}

TEST_CASE("evaluation without a policy") {
  EvalConfig cfg = small_eval();
  cfg.methods = {MethodSpec::parse("pure_mcts")};
  const auto report = evaluate(cfg);
  REQUIRE(report.runs.size() == 6);
  CHECK(report.runs[0].circuit == "ripple_adder_3");
  CHECK(report.runs[1].seed == 2);
  for (const auto& r : report.runs) {
    CHECK(r.synthesis_calls <= cfg.budget);
    CHECK(r.trace.size() == r.synthesis_calls);
    CHECK(r.best_adp <= load_circuit(r.circuit).num_ands() * stats(load_circuit(r.circuit)).depth);
    double best = r.trace.front().adp_proxy;
    for (const auto& row : r.trace) best = std::min(best, row.adp_proxy);
    CHECK(best == r.best_adp);
    CHECK(r.reduction_pct == doctest::Approx(100.0 * (1.0 - r.best_adp / r.baseline_adp)));
    CHECK(r.baseline_adp == baseline_qor(load_circuit(r.circuit)).adp_proxy);
  }
  const auto& s = report.summaries.at(0);
  CHECK(s.ties == 3);
  CHECK(s.wins + s.ties + s.losses == 3);
  CHECK(s.iso_qor_speedup_calls == 1.0);

  cfg.methods = {MethodSpec::parse("agent_guided")};
  CHECK_THROWS(evaluate(cfg));
}

TEST_CASE("guided evaluation, determinism and reports") {
  const PolicyNetwork net;
  EvalConfig cfg = small_eval();
  cfg.methods = {MethodSpec::parse("pure_mcts"), MethodSpec::parse("agent_guided(alpha=0)"),
                 MethodSpec::parse("agent_guided"), MethodSpec::parse("agent_with_ood(T=0.06)")};
  CHECK_THROWS(evaluate(cfg, &net));

  EmbeddingBank bank;
  for (const auto& id : {"ripple_adder_2", "comparator_3"}) bank.add(id, net.encode_aig(load_circuit(id)));
  const auto report = evaluate(cfg, &net, &bank);
  REQUIRE(report.runs.size() == 4 * 6);

  // alpha = 0 reproduces pure search row for row and trace for trace.
  for (const auto& id : cfg.circuits) {
    for (auto seed : cfg.seeds) {
      const auto& p = report.run("pure_mcts", id, seed);
      const auto& z = report.run("agent_guided(alpha=0)", id, seed);
      CHECK(p.best_adp == z.best_adp);
      CHECK(p.best_recipe == z.best_recipe);
      std::ostringstream a, b;
      write_trace_csv(a, p.trace);
      write_trace_csv(b, z.trace);
      CHECK(a.str() == b.str());
      const auto& g = report.run("agent_with_ood(T=0.06)", id, seed);
      const double expected = alpha(min_distance(net.encode_aig(load_circuit(id)), bank).distance, {cfg.delta_th, 0.06});
      CHECK(g.alpha == doctest::Approx(expected));
      CHECK(g.delta_min >= 0.0);
    }
  }

  // Geomean recomputed independently from the per-run rows.
  for (const auto& s : report.summaries) {
    CHECK(s.wins + s.ties + s.losses == 3);
    double log_sum = 0.0;
    for (const auto& id : cfg.circuits) {
      double mean = 0.0;
      for (auto seed : cfg.seeds) mean += report.run(s.method, id, seed).reduction_pct / 2.0;
      log_sum += std::log1p(mean / 100.0);
    }
    CHECK(std::abs(s.geomean_reduction_pct - 100.0 * std::expm1(log_sum / 3.0)) < 1e-9);
    CHECK(s.seed_geomean_pct.size() == 2);
  }
  CHECK(report.summaries[1].ties == 3);
  CHECK(report.summaries[1].iso_qor_speedup_calls == 1.0);

  EvalConfig parallel = cfg;
  parallel.jobs = 3;
  const auto again = evaluate(parallel, &net, &bank);
  CHECK(runs_csv(again) == runs_csv(report));

  std::ostringstream summary, json;
  report.write_summary_csv(summary);
  report.write_json(json);
  CHECK(summary.str().rfind("# geomean", 0) == 0);
  CHECK(json.str().find("\"geomean_convention\"") != std::string::npos);
  CHECK(runs_csv(report).rfind("method,circuit,seed,alpha,delta_min,", 0) == 0);

  const auto dir = scratch_dir("traces");
  report.write_traces(dir);
  const auto trace_file = dir / "agent_guided" / "comparator_2" / "2.csv";
  REQUIRE(std::filesystem::exists(trace_file));
  std::ifstream in(trace_file);
  std::string header;
  std::getline(in, header);
  CHECK(header == "iteration,prefix,node_count,depth,adp_proxy,reward,wall_ns");
  std::filesystem::remove_all(dir);

  const auto labels = winner_labels(report, "agent_guided(alpha=0)", "pure_mcts");
  CHECK(labels == std::vector<int>{0, 0, 0});
}
