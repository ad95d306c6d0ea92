#include "lsopt/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "lsopt/aiger.hpp"
#include "lsopt/generators.hpp"

namespace lsopt {

namespace {

using nlohmann::json;

bool is_gated(Method m) { return m == Method::agent_with_ood; }

std::string format_number(double v) {
  char buf[32];
  const auto end = std::to_chars(buf, buf + sizeof buf, v).ptr;
  return std::string(buf, end);
}

double geometric_mean(const std::vector<double>& values) {
  if (values.empty()) return 1.0;
  double log_sum = 0.0;
  for (double v : values) log_sum += std::log(v);
  return std::exp(log_sum / static_cast<double>(values.size()));
}

std::int64_t wall_to_reach(const std::vector<TraceRow>& trace, double cost) {
  std::int64_t total = 0;
  for (const auto& row : trace) {
    total += row.wall_ns;
    if (row.adp_proxy <= cost) return total;
  }
  return 0;
}

}  // namespace

Aig load_circuit(const std::string& id) {
  const std::filesystem::path path(id);
  if (std::filesystem::exists(path) || path.extension() == ".aag" || path.extension() == ".aig") {
    Aig g = read_aiger_file(path);
    if (g.name().empty()) g.set_name(path.stem().string());
    return g;
  }
  static const std::regex pattern(R"(^([a-z_]+?)_(\d+)(?:_s(\d+))?$)");
  std::smatch m;
  if (!std::regex_match(id, m, pattern)) throw std::invalid_argument("unknown circuit '" + id + "'");
  const auto family = parse_family(m[1].str());
  if (!family) throw std::invalid_argument("unknown circuit family in '" + id + "'");
  const int size = std::stoi(m[2].str());
  const std::uint64_t seed = m[3].matched ? std::stoull(m[3].str()) : 0;
  return generate_circuit(*family, size, seed);
}

void DatasetSplit::validate() const {
  std::set<std::string> seen;
  for (const auto* list : {&train, &validation, &test}) {
    for (const auto& id : *list) {
      if (!seen.insert(id).second) throw std::invalid_argument("circuit '" + id + "' appears twice in the split");
    }
  }
}

DatasetSplit DatasetSplit::read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open split file " + path.string());
  const json j = json::parse(in);
  DatasetSplit s;
  s.train = j.value("train", std::vector<std::string>{});
  s.validation = j.value("validation", std::vector<std::string>{});
  s.test = j.value("test", std::vector<std::string>{});
  s.validate();
  return s;
}

void DatasetSplit::write_json(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write split file " + path.string());
  out << json{{"train", train}, {"validation", validation}, {"test", test}}.dump(2) << '\n';
}

DatasetSplit default_split() {
  DatasetSplit s;
  s.train = {"array_multiplier_3", "array_multiplier_4", "array_multiplier_5",
             "ripple_adder_3",     "ripple_adder_4",     "ripple_adder_5"};
  s.validation = {"array_multiplier_2", "ripple_adder_6", "ripple_adder_7",  "comparator_4",
                  "comparator_5",       "mux_tree_3",     "random_dag_8_s1", "random_dag_10_s3"};
  s.test = {"array_multiplier_6", "array_multiplier_7", "ripple_adder_8",
            "ripple_adder_10",    "mux_tree_4",         "random_dag_12_s2"};
  return s;
}

std::string MethodSpec::label() const {
  switch (method) {
    case Method::pure_mcts: return "pure_mcts";
    case Method::agent_guided: return alpha == 1.0 ? "agent_guided" : "agent_guided(alpha=" + format_number(alpha) + ")";
    case Method::agent_with_ood:
      return temperature == 0.0 ? "agent_with_ood" : "agent_with_ood(T=" + format_number(temperature) + ")";
  }
  return "";
}

MethodSpec MethodSpec::parse(const std::string& text) {
  static const std::regex pattern(R"(^(pure_mcts|agent_guided|agent_with_ood)(?:\((alpha|T)=([0-9.eE+-]+)\))?$)");
  std::smatch m;
  if (!std::regex_match(text, m, pattern)) throw std::invalid_argument("unknown method '" + text + "'");
  MethodSpec spec;
  const auto name = m[1].str();
  spec.method = name == "pure_mcts" ? Method::pure_mcts
                : name == "agent_guided" ? Method::agent_guided
                                         : Method::agent_with_ood;
  if (m[2].matched) {
    const double v = std::stod(m[3].str());
    if (m[2] == "alpha" && spec.method == Method::agent_guided && v >= 0.0 && v <= 1.0) {
      spec.alpha = v;
    } else if (m[2] == "T" && spec.method == Method::agent_with_ood && v >= 0.0) {
      spec.temperature = v;
    } else {
      throw std::invalid_argument("invalid parameter in method '" + text + "'");
    }
  }
  return spec;
}

double geomean_reduction(const std::vector<double>& reductions_pct) {
  std::vector<double> factors;
  for (double r : reductions_pct) factors.push_back(std::max(1.0 + r / 100.0, 1e-9));
  return 100.0 * (geometric_mean(factors) - 1.0);
}

std::size_t calls_to_reach(const std::vector<TraceRow>& trace, double cost) {
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (trace[i].adp_proxy <= cost) return i + 1;
  }
  return 0;
}

double iso_qor_speedup(const RunRecord& method, const RunRecord& competitor) {
  const auto needed = calls_to_reach(method.trace, competitor.best_adp);
  const auto reference = calls_to_reach(competitor.trace, competitor.best_adp);
  if (needed == 0 || reference == 0) return 1.0;
  return static_cast<double>(reference) / static_cast<double>(needed);
}

RunRecord run_search(const Aig& circuit, const std::string& circuit_id, const MctsConfig& config,
                     std::size_t length, const PolicyNetwork* model, const std::string& method_label) {
  RecipeEnvironment env(circuit, length);
  PriorFn prior;
  if (model) prior = make_prior(*model, env);
  const auto result = generate_recipe(env, config, prior);
  RunRecord r;
  r.method = method_label;
  r.circuit = circuit_id;
  r.seed = config.seed;
  r.alpha = config.alpha;
  r.delta_min = std::numeric_limits<double>::quiet_NaN();
  r.baseline_adp = env.baseline().adp_proxy;
  r.best_adp = result.best_outcome.cost;
  r.reduction_pct = r.baseline_adp > 0 ? 100.0 * (1.0 - r.best_adp / r.baseline_adp) : 0.0;
  r.synthesis_calls = result.synthesis_calls;
  r.best_recipe = env.describe(result.best);
  r.trace = result.trace;
  r.calls_to_best = calls_to_reach(r.trace, r.best_adp);
  return r;
}

EvalReport evaluate(const EvalConfig& config, const PolicyNetwork* model, const EmbeddingBank* bank) {
  if (config.methods.empty()) throw std::invalid_argument("no methods to evaluate");
  if (config.circuits.empty()) throw std::invalid_argument("no circuits to evaluate");
  if (config.seeds.empty()) throw std::invalid_argument("no seeds to evaluate");
  bool gated = false;
  for (const auto& m : config.methods) {
    if (m.method != Method::pure_mcts && !model) {
      throw std::invalid_argument("method " + m.label() + " requires a trained model");
    }
    gated = gated || is_gated(m.method);
  }
  if (gated && (!bank || bank->empty())) throw std::invalid_argument("agent_with_ood requires an embedding bank");

  std::vector<Aig> circuits;
  std::vector<double> delta(config.circuits.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t c = 0; c < config.circuits.size(); ++c) {
    circuits.push_back(load_circuit(config.circuits[c]));
    if (gated) delta[c] = min_distance(model->encode_aig(circuits.back()), *bank).distance;
  }

  struct Job {
    std::size_t method, circuit, seed;
  };
  std::vector<Job> jobs;
  for (std::size_t m = 0; m < config.methods.size(); ++m) {
    for (std::size_t c = 0; c < circuits.size(); ++c) {
      for (std::size_t s = 0; s < config.seeds.size(); ++s) jobs.push_back({m, c, s});
    }
  }

  EvalReport report;
  report.config = config;
  report.runs.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      try {
        const auto& job = jobs[j];
        const auto& spec = config.methods[job.method];
        MctsConfig mc;
        mc.c_uct = config.c_uct;
        mc.iterations = config.iterations;
        mc.seed = config.seeds[job.seed];
        mc.budget = config.budget;
        mc.record_time = config.record_time;
        mc.alpha = spec.method == Method::pure_mcts ? 0.0
                   : spec.method == Method::agent_guided
                       ? spec.alpha
                       : alpha(delta[job.circuit], {config.delta_th, spec.temperature});
        const PolicyNetwork* net = spec.method == Method::pure_mcts ? nullptr : model;
        auto r = run_search(circuits[job.circuit], config.circuits[job.circuit], mc, config.length, net, spec.label());
        r.delta_min = is_gated(spec.method) ? delta[job.circuit] : std::numeric_limits<double>::quiet_NaN();
        report.runs[j] = std::move(r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(config.jobs, static_cast<int>(jobs.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (const auto& r : report.runs) {
    if (config.budget != 0 && r.synthesis_calls > config.budget) {
      throw std::logic_error("run exceeded the synthesis budget: " + r.method + " " + r.circuit);
    }
  }

  const auto pure = std::find_if(config.methods.begin(), config.methods.end(),
                                 [](const MethodSpec& m) { return m.method == Method::pure_mcts; });
  const std::string pure_label = pure == config.methods.end() ? "" : pure->label();
  for (const auto& spec : config.methods) {
    MethodSummary s;
    s.method = spec.label();
    std::vector<double> circuit_means;
    std::vector<double> speedup_calls, speedup_wall;
    for (const auto& id : config.circuits) {
      double mean_reduction = 0.0, mean_best = 0.0, mean_pure = 0.0;
      for (auto seed : config.seeds) {
        const auto& r = report.run(s.method, id, seed);
        mean_reduction += r.reduction_pct;
        mean_best += r.best_adp;
        if (!pure_label.empty()) {
          const auto& p = report.run(pure_label, id, seed);
          mean_pure += p.best_adp;
          speedup_calls.push_back(iso_qor_speedup(r, p));
          const auto needed = wall_to_reach(r.trace, p.best_adp);
          const auto reference = wall_to_reach(p.trace, p.best_adp);
          const bool timed = needed > 0 && reference > 0 && calls_to_reach(r.trace, p.best_adp) > 0;
          speedup_wall.push_back(timed ? static_cast<double>(reference) / static_cast<double>(needed) : 1.0);
        }
      }
      const auto n = static_cast<double>(config.seeds.size());
      circuit_means.push_back(mean_reduction / n);
      if (!pure_label.empty()) {
        const double a = mean_best / n, b = mean_pure / n;
        if (std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b))) ++s.ties;
        else if (a < b) ++s.wins;
        else ++s.losses;
      }
    }
    s.geomean_reduction_pct = geomean_reduction(circuit_means);
    for (auto seed : config.seeds) {
      std::vector<double> per_seed;
      for (const auto& id : config.circuits) per_seed.push_back(report.run(s.method, id, seed).reduction_pct);
      s.seed_geomean_pct.push_back(geomean_reduction(per_seed));
    }
    s.iso_qor_speedup_calls = geometric_mean(speedup_calls);
    s.iso_qor_speedup_wall = geometric_mean(speedup_wall);
    report.summaries.push_back(std::move(s));
  }
  return report;
}

std::vector<int> winner_labels(const EvalReport& report, const std::string& guided, const std::string& pure) {
  std::vector<int> labels;
  const auto n = static_cast<double>(report.config.seeds.size());
  for (const auto& id : report.config.circuits) {
    double guided_best = 0, pure_best = 0, guided_calls = 0, pure_calls = 0;
    for (auto seed : report.config.seeds) {
      const auto& g = report.run(guided, id, seed);
      const auto& p = report.run(pure, id, seed);
      guided_best += g.best_adp / n;
      pure_best += p.best_adp / n;
      guided_calls += static_cast<double>(g.calls_to_best) / n;
      pure_calls += static_cast<double>(p.calls_to_best) / n;
    }
    const bool pure_wins = pure_best < guided_best || (pure_best == guided_best && pure_calls < guided_calls);
    labels.push_back(pure_wins ? 1 : 0);
  }
  return labels;
}

const RunRecord& EvalReport::run(const std::string& method, const std::string& circuit, std::uint64_t seed) const {
  for (const auto& r : runs) {
    if (r.method == method && r.circuit == circuit && r.seed == seed) return r;
  }
  throw std::out_of_range("no run for " + method + " / " + circuit + " / seed " + std::to_string(seed));
}

void EvalReport::write_runs_csv(std::ostream& out) const {
  out << "method,circuit,seed,alpha,delta_min,baseline_adp,best_adp,reduction_pct,synthesis_calls,calls_to_best,"
         "best_recipe\n";
  const auto precision = out.precision(17);
  for (const auto& r : runs) {
    out << r.method << ',' << r.circuit << ',' << r.seed << ',' << r.alpha << ',';
    if (!std::isnan(r.delta_min)) out << r.delta_min;
    out << ',' << r.baseline_adp << ',' << r.best_adp << ',' << r.reduction_pct << ',' << r.synthesis_calls << ','
        << r.calls_to_best << ',' << r.best_recipe << '\n';
  }
  out.precision(precision);
}

void EvalReport::write_summary_csv(std::ostream& out) const {
  out << "# geomean over (1 + reduction_pct / 100) factors, reported as a percentage; wins/ties/losses and "
         "speedups are against pure_mcts\n";
  out << "method,geomean_reduction_pct,wins,ties,losses,iso_qor_speedup_calls,iso_qor_speedup_wall";
  for (auto seed : config.seeds) out << ",geomean_seed_" << seed;
  out << '\n';
  const auto precision = out.precision(17);
  for (const auto& s : summaries) {
    out << s.method << ',' << s.geomean_reduction_pct << ',' << s.wins << ',' << s.ties << ',' << s.losses << ','
        << s.iso_qor_speedup_calls << ',' << s.iso_qor_speedup_wall;
    for (double g : s.seed_geomean_pct) out << ',' << g;
    out << '\n';
  }
  out.precision(precision);
}

void EvalReport::write_json(std::ostream& out) const {
  json j;
  j["geomean_convention"] = "geometric mean of (1 + reduction_pct / 100) minus 1, as a percentage";
  j["budget"] = config.budget;
  j["iterations"] = config.iterations;
  j["length"] = config.length;
  j["seeds"] = config.seeds;
  j["circuits"] = config.circuits;
  j["delta_th"] = config.delta_th;
  j["summaries"] = json::array();
  for (const auto& s : summaries) {
    j["summaries"].push_back({{"method", s.method},
                              {"geomean_reduction_pct", s.geomean_reduction_pct},
                              {"seed_geomean_pct", s.seed_geomean_pct},
                              {"wins", s.wins},
                              {"ties", s.ties},
                              {"losses", s.losses},
                              {"iso_qor_speedup_calls", s.iso_qor_speedup_calls},
                              {"iso_qor_speedup_wall", s.iso_qor_speedup_wall}});
  }
  j["runs"] = json::array();
  for (const auto& r : runs) {
    j["runs"].push_back({{"method", r.method},
                         {"circuit", r.circuit},
                         {"seed", r.seed},
                         {"alpha", r.alpha},
                         {"delta_min", std::isnan(r.delta_min) ? json(nullptr) : json(r.delta_min)},
                         {"baseline_adp", r.baseline_adp},
                         {"best_adp", r.best_adp},
                         {"reduction_pct", r.reduction_pct},
                         {"synthesis_calls", r.synthesis_calls},
                         {"calls_to_best", r.calls_to_best},
                         {"best_recipe", r.best_recipe}});
  }
  out << j.dump(2) << '\n';
}

void EvalReport::write_traces(const std::filesystem::path& dir) const {
  for (const auto& r : runs) {
    const auto folder = dir / r.method / r.circuit;
    std::filesystem::create_directories(folder);
    std::ofstream out(folder / (std::to_string(r.seed) + ".csv"));
    if (!out) throw std::runtime_error("cannot write trace under " + folder.string());
    write_trace_csv(out, r.trace);
  }
}

}  // namespace lsopt
