#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lsopt/aiger.hpp"
#include "lsopt/bench.hpp"
#include "lsopt/generators.hpp"
#include "lsopt/ood.hpp"
#include "lsopt/policy.hpp"
#include "lsopt/qor.hpp"

#ifndef LSOPT_GIT_DESCRIBE
#define LSOPT_GIT_DESCRIBE "unknown"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lsopt;

namespace {

// Bad flag combinations found after parsing; reported like parse errors.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path results_root() {
  const char* env = std::getenv("LSOPT_RESULTS");
  return env && *env ? fs::path(env) : fs::path("results");
}

class Manifest {
public:
  Manifest(fs::path file, std::string command, json config, std::uint64_t seed)
      : file_(std::move(file)), start_(std::chrono::steady_clock::now()) {
    body_["command"] = std::move(command);
    body_["config"] = std::move(config);
    body_["seed"] = seed;
    body_["git_describe"] = LSOPT_GIT_DESCRIBE;
    body_["status"] = "running";
    body_["outputs"] = json::array();
    if (file_.has_parent_path()) fs::create_directories(file_.parent_path());
    write();
  }

  void resolved(const std::string& key, json value) { body_["resolved"][key] = std::move(value); }
  void output(const fs::path& path) { body_["outputs"].push_back(path.string()); }

  void finish() {
    body_["status"] = "complete";
    body_["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    write();
  }

private:
  void write() const {
    std::ofstream out(file_);
    if (!out) throw std::runtime_error("cannot write " + file_.string());
    out << body_.dump(2) << '\n';
  }

  fs::path file_;
  std::chrono::steady_clock::time_point start_;
  json body_;
};

template <class Fn>
void write_file(const fs::path& path, Manifest& manifest, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  fn(out);
  if (!out) throw std::runtime_error("write failed for " + path.string());
  manifest.output(path);
}

std::string circuit_label(const std::string& id) {
  const fs::path p(id);
  return fs::exists(p) || p.has_extension() ? p.stem().string() : id;
}

// --aig accepts a file or a generator name such as "ripple_adder_8".
const CLI::Validator kCircuitRef(
    [](std::string& value) -> std::string {
      if (fs::exists(value)) return {};
      try {
        load_circuit(value);
        return {};
      } catch (const std::exception&) {
        return "no such file or generated circuit: " + value;
      }
    },
    "FILE|NAME");

std::optional<double> parse_alpha(const std::string& text) {
  if (text == "auto") return std::nullopt;
  return std::stod(text);
}

const CLI::Validator kAlpha(
    [](std::string& value) -> std::string {
      if (value == "auto") return {};
      try {
        std::size_t used = 0;
        const double a = std::stod(value, &used);
        if (used == value.size() && a >= 0.0 && a <= 1.0) return {};
      } catch (const std::exception&) {
      }
      return "--alpha must be 'auto' or a number in [0, 1], got " + value;
    },
    "auto|[0,1]");

const CLI::Validator kMethod(
    [](std::string& value) -> std::string {
      try {
        MethodSpec::parse(value);
        return {};
      } catch (const std::exception& e) {
        return e.what();
      }
    },
    "METHOD");

double read_threshold(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  const json j = json::parse(in);
  const auto& v = j.at("delta_th");
  if (v.is_string() && v.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
  return v.get<double>();
}

EmbeddingBank read_bank(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("embedding bank " + path.string() + " not found; pass --bank");
  return EmbeddingBank::read_csv(in);
}

fs::path default_bank(const std::string& model) { return fs::path(model).parent_path() / "bank.csv"; }

DatasetSplit load_split(const std::string& path) {
  auto split = path.empty() ? default_split() : DatasetSplit::read_json(path);
  split.validate();
  return split;
}

// ---- gen ----

struct GenOptions {
  std::string family;
  int size = 0;
  std::uint64_t seed = 0;
  std::string out;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(GenOptions, family, size, seed, out)

void run_gen(const GenOptions& o) {
  const auto family = parse_family(o.family);
  if (!family) throw UsageError("unknown family '" + o.family + "'");
  const auto range = family_size_range(*family);
  if (o.size < range.min || o.size > range.max) {
    throw UsageError("--size for " + o.family + " must be in [" + std::to_string(range.min) + ", " +
                     std::to_string(range.max) + "]");
  }
  const fs::path out(o.out);
  Manifest manifest(fs::path(o.out + ".manifest.json"), "gen", json(o), o.seed);
  Aig g = generate_circuit(*family, o.size, o.seed);
  g.set_name(circuit_name(*family, o.size, o.seed));
  write_aiger_file(g, out);
  manifest.output(out);
  manifest.finish();
  const auto st = stats(g);
  std::cout << g.name() << ": " << st.input_count << " inputs, " << st.output_count << " outputs, " << st.node_count
            << " and nodes, depth " << st.depth << '\n';
}

// ---- search ----

struct SearchOptions {
  std::string aig;
  std::string alpha = "auto";
  std::string model;
  std::string bank;
  std::string calibration;
  double delta_th = 0.007;
  double temperature = 0.0;
  std::size_t budget = 100;
  std::size_t iterations = 512;
  std::size_t length = 10;
  double c_uct = std::sqrt(2.0);
  std::uint64_t seed = 1;
  bool time = false;
  std::string out;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SearchOptions, aig, alpha, model, bank, calibration, delta_th, temperature, budget,
                                   iterations, length, c_uct, seed, time, out)

void run_search(const SearchOptions& o) {
  const auto fixed_alpha = parse_alpha(o.alpha);
  if (!fixed_alpha && o.model.empty()) throw UsageError("--alpha auto requires --model");
  if (fixed_alpha && *fixed_alpha > 0.0 && o.model.empty()) throw UsageError("--alpha > 0 requires --model");

  const std::string label = circuit_label(o.aig);
  const fs::path dir = o.out.empty() ? results_root() / "search" / label / std::to_string(o.seed) : fs::path(o.out);
  Manifest manifest(dir / "manifest.json", "search", json(o), o.seed);

  const Aig circuit = load_circuit(o.aig);
  std::optional<PolicyNetwork> model;
  if (!o.model.empty()) model = PolicyNetwork::load(o.model);

  MctsConfig cfg;
  cfg.c_uct = o.c_uct;
  cfg.iterations = o.iterations;
  cfg.seed = o.seed;
  cfg.budget = o.budget;
  cfg.record_time = o.time;
  double delta = std::numeric_limits<double>::quiet_NaN();
  if (fixed_alpha) {
    cfg.alpha = *fixed_alpha;
  } else {
    const auto bank = read_bank(o.bank.empty() ? default_bank(o.model) : fs::path(o.bank));
    const double th = o.calibration.empty() ? o.delta_th : read_threshold(o.calibration);
    const auto nearest = min_distance(model->encode_aig(circuit), bank);
    delta = nearest.distance;
    cfg.alpha = alpha(delta, {th, o.temperature});
    manifest.resolved("delta_th", std::isfinite(th) ? json(th) : json("inf"));
    manifest.resolved("nearest_train_circuit", nearest.id);
  }
  manifest.resolved("alpha", cfg.alpha);

  const auto run = lsopt::run_search(circuit, label, cfg, o.length, model ? &*model : nullptr, "search");
  write_file(dir / "trace.csv", manifest, [&](std::ostream& out) { write_trace_csv(out, run.trace); });
  manifest.finish();

  std::cout << "circuit: " << label << '\n';
  std::cout << "alpha: " << cfg.alpha;
  if (!std::isnan(delta)) std::cout << " (delta_min " << delta << ')';
  std::cout << '\n';
  std::cout << "baseline adp: " << run.baseline_adp << '\n';
  std::cout << "best adp: " << run.best_adp << " (" << run.reduction_pct << "% reduction, " << run.synthesis_calls
            << " synthesis calls)\n";
  std::cout << "recipe: " << run.best_recipe << '\n';
  std::cout << "trace: " << (dir / "trace.csv").string() << '\n';
}

// ---- train ----

struct TrainOptions {
  std::string split;
  std::vector<std::string> circuits;
  int epochs = 50;
  double lr = 0.01;
  std::size_t iterations = 512;
  std::size_t length = 10;
  double c_uct = std::sqrt(2.0);
  double alpha = 1.0;
  int layers = 3;
  int hidden = 32;
  std::uint64_t seed = 1;
  std::string out;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TrainOptions, split, circuits, epochs, lr, iterations, length, c_uct, alpha, layers,
                                   hidden, seed, out)

void run_train(const TrainOptions& o) {
  const auto ids = o.circuits.empty() ? load_split(o.split).train : o.circuits;
  if (ids.empty()) throw UsageError("no training circuits");
  const fs::path dir = o.out.empty() ? results_root() / "train" : fs::path(o.out);
  Manifest manifest(dir / "manifest.json", "train", json(o), o.seed);
  manifest.resolved("circuits", ids);

  std::vector<Aig> circuits;
  for (const auto& id : ids) circuits.push_back(load_circuit(id));

  PolicyConfig pc;
  pc.gcn_layers = o.layers;
  pc.hidden = o.hidden;
  pc.max_length = std::max<std::size_t>(pc.max_length, o.length);
  pc.seed = o.seed;
  PolicyNetwork net(pc);

  TrainingConfig tc;
  tc.epochs = o.epochs;
  tc.learning_rate = o.lr;
  tc.iterations = o.iterations;
  tc.length = o.length;
  tc.c_uct = o.c_uct;
  tc.alpha = o.alpha;
  tc.seed = o.seed;
  const auto report = train(net, circuits, tc, [&](int epoch, double loss) {
    std::cerr << "epoch " << epoch + 1 << '/' << o.epochs << " loss " << loss << '\n';
  });

  net.save(dir / "model.bin");
  manifest.output(dir / "model.bin");
  EmbeddingBank bank;
  for (std::size_t i = 0; i < circuits.size(); ++i) bank.add(ids[i], net.encode_aig(circuits[i]));
  write_file(dir / "bank.csv", manifest, [&](std::ostream& out) { bank.write_csv(out); });
  write_file(dir / "loss.csv", manifest, [&](std::ostream& out) { write_loss_csv(out, report.loss); });
  manifest.resolved("synthesis_calls", report.synthesis_calls);
  manifest.finish();
  std::cout << "model: " << (dir / "model.bin").string() << '\n';
  std::cout << "final loss: " << (report.loss.empty() ? 0.0 : report.loss.back()) << '\n';
}

// ---- calibrate and bench share the evaluation flags ----

struct EvalOptions {
  std::string split;
  std::vector<std::string> circuits;
  std::string model;
  std::string bank;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::size_t budget = 100;
  std::size_t iterations = 512;
  std::size_t length = 10;
  double c_uct = std::sqrt(2.0);
  int jobs = 1;
  bool time = false;
  std::string out;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(EvalOptions, split, circuits, model, bank, seeds, budget, iterations, length, c_uct,
                                   jobs, time, out)

void add_eval_flags(CLI::App& app, EvalOptions& o) {
  app.add_option("--split", o.split, "Dataset split JSON (default: built-in split)")->check(CLI::ExistingFile);
  app.add_option("--circuits", o.circuits, "Circuits to use instead of the split")->delimiter(',')->check(kCircuitRef);
  app.add_option("--bank", o.bank, "Training embedding bank (default: bank.csv beside the model)")
      ->check(CLI::ExistingFile);
  app.add_option("--seeds", o.seeds, "Seeds, comma separated")->delimiter(',');
  app.add_option("--budget", o.budget, "Synthesis calls per search")->check(CLI::Range(1, 1000000));
  app.add_option("--iterations", o.iterations, "MCTS iterations per level (K)")->check(CLI::Range(1, 1000000));
  app.add_option("--length", o.length, "Recipe length (L)")->check(CLI::Range(1, 64));
  app.add_option("--c-uct", o.c_uct, "UCT exploration constant")->check(CLI::NonNegativeNumber);
  app.add_option("--jobs", o.jobs, "Worker threads for the job grid")->check(CLI::Range(1, 1024));
  app.add_flag("--time", o.time, "Record wall time per synthesis call (trace CSVs are then not reproducible)");
  app.add_option("--out", o.out, "Output directory (default: $LSOPT_RESULTS/<command>)");
}

EvalConfig eval_config(const EvalOptions& o, std::vector<std::string> circuits, std::vector<MethodSpec> methods) {
  EvalConfig cfg;
  cfg.methods = std::move(methods);
  cfg.circuits = std::move(circuits);
  cfg.seeds = o.seeds;
  cfg.budget = o.budget;
  cfg.iterations = o.iterations;
  cfg.length = o.length;
  cfg.c_uct = o.c_uct;
  cfg.jobs = o.jobs;
  cfg.record_time = o.time;
  return cfg;
}

std::uint64_t first_seed(const EvalOptions& o) { return o.seeds.empty() ? 0 : o.seeds.front(); }

void run_calibrate(const EvalOptions& o) {
  if (o.seeds.empty()) throw UsageError("--seeds must not be empty");
  const auto ids = o.circuits.empty() ? load_split(o.split).validation : o.circuits;
  if (ids.empty()) throw UsageError("no validation circuits");
  const fs::path dir = o.out.empty() ? results_root() / "calibrate" : fs::path(o.out);
  Manifest manifest(dir / "manifest.json", "calibrate", json(o), first_seed(o));
  manifest.resolved("circuits", ids);

  const auto model = PolicyNetwork::load(o.model);
  const auto bank = read_bank(o.bank.empty() ? default_bank(o.model) : fs::path(o.bank));
  const MethodSpec pure{Method::pure_mcts}, guided{Method::agent_guided, 1.0};
  const auto report = evaluate(eval_config(o, ids, {pure, guided}), &model);
  const auto labels = winner_labels(report, guided.label(), pure.label());

  std::vector<ValidationPoint> points;
  for (std::size_t i = 0; i < ids.size(); ++i) points.push_back({ids[i], model.encode_aig(load_circuit(ids[i])), labels[i]});
  const auto cal = calibrate(points, bank);

  write_file(dir / "runs.csv", manifest, [&](std::ostream& out) { report.write_runs_csv(out); });
  write_file(dir / "calibration.csv", manifest,
             [&](std::ostream& out) { write_calibration_csv(out, points, bank, cal); });
  json j;
  j["delta_th"] = std::isfinite(cal.threshold) ? json(cal.threshold) : json("inf");
  j["youden_j"] = cal.youden_j;
  j["circuits"] = ids;
  j["delta_min"] = cal.delta_min;
  j["winner"] = labels;
  write_file(dir / "calibration.json", manifest, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
  manifest.finish();
  std::cout << "delta_th: " << cal.threshold << " (Youden J " << cal.youden_j << ")\n";
}

struct BenchOptions {
  EvalOptions eval;
  std::vector<std::string> methods = {"pure_mcts", "agent_guided", "agent_with_ood"};
  std::string calibration;
  double delta_th = 0.007;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(BenchOptions, eval, methods, calibration, delta_th)

void run_bench(const BenchOptions& b) {
  const auto& o = b.eval;
  if (o.seeds.empty()) throw UsageError("--seeds must not be empty");
  std::vector<MethodSpec> methods;
  bool needs_model = false, needs_bank = false;
  for (const auto& m : b.methods) {
    methods.push_back(MethodSpec::parse(m));
    needs_model = needs_model || methods.back().method != Method::pure_mcts;
    needs_bank = needs_bank || methods.back().method == Method::agent_with_ood;
  }
  if (needs_model && o.model.empty()) throw UsageError("agent methods require --model");
  const auto ids = o.circuits.empty() ? load_split(o.split).test : o.circuits;
  if (ids.empty()) throw UsageError("no test circuits");

  const fs::path dir = o.out.empty() ? results_root() / "bench" : fs::path(o.out);
  Manifest manifest(dir / "manifest.json", "bench", json(b), first_seed(o));
  manifest.resolved("circuits", ids);

  std::optional<PolicyNetwork> model;
  if (!o.model.empty()) model = PolicyNetwork::load(o.model);
  std::optional<EmbeddingBank> bank;
  if (needs_bank) bank = read_bank(o.bank.empty() ? default_bank(o.model) : fs::path(o.bank));

  auto cfg = eval_config(o, ids, methods);
  cfg.delta_th = b.calibration.empty() ? b.delta_th : read_threshold(b.calibration);
  manifest.resolved("delta_th", std::isfinite(cfg.delta_th) ? json(cfg.delta_th) : json("inf"));
  const auto report = evaluate(cfg, model ? &*model : nullptr, bank ? &*bank : nullptr);

  write_file(dir / "runs.csv", manifest, [&](std::ostream& out) { report.write_runs_csv(out); });
  write_file(dir / "summary.csv", manifest, [&](std::ostream& out) { report.write_summary_csv(out); });
  write_file(dir / "report.json", manifest, [&](std::ostream& out) { report.write_json(out); });
  report.write_traces(dir / "traces");
  manifest.output(dir / "traces");
  manifest.finish();

  for (const auto& s : report.summaries) {
    std::cout << s.method << ": geomean reduction " << s.geomean_reduction_pct << "%, " << s.wins << '/' << s.ties
              << '/' << s.losses << " w/t/l vs pure_mcts, iso-QoR speedup " << s.iso_qor_speedup_calls << "x\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Logic synthesis recipe search with a learned policy prior"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.failure_message(CLI::FailureMessage::help);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Write a generated benchmark circuit as AIGER");
  gen_cmd->add_option("--family", gen.family, "ripple_adder, array_multiplier, comparator, mux_tree or random_dag")
      ->required();
  gen_cmd->add_option("--size", gen.size, "Family size parameter")->required();
  gen_cmd->add_option("--seed", gen.seed, "Seed (random_dag only)");
  gen_cmd->add_option("--out", gen.out, "Output .aag (ASCII) or .aig (binary) file")->required();

  SearchOptions search;
  auto* search_cmd = app.add_subcommand("search", "Search for a synthesis recipe for one circuit");
  search_cmd->add_option("--aig", search.aig, "Circuit file or generated circuit name")->required()->check(kCircuitRef);
  search_cmd->add_option("--alpha", search.alpha, "Prior exponent, or 'auto' for the out-of-distribution gate")
      ->check(kAlpha);
  search_cmd->add_option("--model", search.model, "Trained policy model")->check(CLI::ExistingFile);
  search_cmd->add_option("--bank", search.bank, "Training embedding bank (default: bank.csv beside the model)")
      ->check(CLI::ExistingFile);
  auto* search_cal = search_cmd->add_option("--calibration", search.calibration, "calibration.json from 'calibrate'")
                         ->check(CLI::ExistingFile);
  search_cmd->add_option("--delta-th", search.delta_th, "Gate threshold on the cosine distance")
      ->check(CLI::Range(0.0, 2.0))
      ->excludes(search_cal);
  search_cmd->add_option("--temperature", search.temperature, "Gate temperature; 0 is a hard gate")
      ->check(CLI::NonNegativeNumber);
  search_cmd->add_option("--budget", search.budget, "Synthesis calls")->check(CLI::Range(1, 1000000));
  search_cmd->add_option("--iterations", search.iterations, "MCTS iterations per level (K)")
      ->check(CLI::Range(1, 1000000));
  search_cmd->add_option("--length", search.length, "Recipe length (L)")->check(CLI::Range(1, 64));
  search_cmd->add_option("--c-uct", search.c_uct, "UCT exploration constant")->check(CLI::NonNegativeNumber);
  search_cmd->add_option("--seed", search.seed, "Search seed");
  search_cmd->add_flag("--time", search.time, "Record wall time per synthesis call");
  search_cmd->add_option("--out", search.out, "Output directory (default: $LSOPT_RESULTS/search/<circuit>/<seed>)");

  TrainOptions tr;
  auto* train_cmd = app.add_subcommand("train", "Train the policy prior on the training circuits");
  train_cmd->add_option("--split", tr.split, "Dataset split JSON (default: built-in split)")->check(CLI::ExistingFile);
  train_cmd->add_option("--circuits", tr.circuits, "Training circuits instead of the split")
      ->delimiter(',')
      ->check(kCircuitRef);
  train_cmd->add_option("--epochs", tr.epochs, "Epochs")->check(CLI::Range(1, 100000));
  train_cmd->add_option("--lr", tr.lr, "Adam learning rate")->check(CLI::PositiveNumber);
  train_cmd->add_option("--iterations", tr.iterations, "MCTS iterations per level (K)")->check(CLI::Range(1, 1000000));
  train_cmd->add_option("--length", tr.length, "Recipe length (L)")->check(CLI::Range(1, 64));
  train_cmd->add_option("--c-uct", tr.c_uct, "UCT exploration constant")->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--alpha", tr.alpha, "Prior exponent while collecting data")->check(CLI::Range(0.0, 1.0));
  train_cmd->add_option("--layers", tr.layers, "Graph convolution layers")->check(CLI::Range(1, 16));
  train_cmd->add_option("--hidden", tr.hidden, "Graph convolution width")->check(CLI::Range(1, 1024));
  train_cmd->add_option("--seed", tr.seed, "Initialization and search seed");
  train_cmd->add_option("--out", tr.out, "Output directory (default: $LSOPT_RESULTS/train)");

  EvalOptions cal;
  auto* cal_cmd = app.add_subcommand("calibrate", "Pick the gate threshold on the validation circuits");
  cal_cmd->add_option("--model", cal.model, "Trained policy model")->required()->check(CLI::ExistingFile);
  add_eval_flags(*cal_cmd, cal);

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Compare search methods on the test circuits");
  bench_cmd->add_option("--model", bench.eval.model, "Trained policy model")->check(CLI::ExistingFile);
  add_eval_flags(*bench_cmd, bench.eval);
  bench_cmd->add_option("--methods", bench.methods, "Methods, comma separated")->delimiter(',')->check(kMethod);
  auto* bench_cal = bench_cmd->add_option("--calibration", bench.calibration, "calibration.json from 'calibrate'")
                        ->check(CLI::ExistingFile);
  bench_cmd->add_option("--delta-th", bench.delta_th, "Gate threshold on the cosine distance")
      ->check(CLI::Range(0.0, 2.0))
      ->excludes(bench_cal);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  CLI::App* active = app.get_subcommands().front();
  try {
    if (active == gen_cmd) run_gen(gen);
    else if (active == search_cmd) run_search(search);
    else if (active == train_cmd) run_train(tr);
    else if (active == cal_cmd) run_calibrate(cal);
    else run_bench(bench);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << active->help();
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
