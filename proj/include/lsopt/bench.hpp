#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lsopt/aig.hpp"
#include "lsopt/mcts.hpp"
#include "lsopt/ood.hpp"
#include "lsopt/policy.hpp"

namespace lsopt {

/**
 * Circuit reference: a generator name such as "ripple_adder_8" or
 * "random_dag_10_s3", or a path to an .aag / .aig file.
 */
Aig load_circuit(const std::string& id);

struct DatasetSplit {
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;

  /// Throws if the lists overlap.
  void validate() const;

  static DatasetSplit read_json(const std::filesystem::path& path);
  void write_json(const std::filesystem::path& path) const;
};

/// Multipliers and adders for training; larger members of those families and
/// unseen families for validation and test.
DatasetSplit default_split();

enum class Method { pure_mcts, agent_guided, agent_with_ood };

struct MethodSpec {
  Method method = Method::pure_mcts;
  double alpha = 1.0;        ///< fixed exponent for agent_guided
  double temperature = 0.0;  ///< gate temperature for agent_with_ood

  std::string label() const;
  /// "pure_mcts", "agent_guided", "agent_guided(alpha=0.5)", "agent_with_ood", "agent_with_ood(T=0.06)".
  static MethodSpec parse(const std::string& text);
};

struct EvalConfig {
  std::vector<MethodSpec> methods;
  std::vector<std::string> circuits;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::size_t budget = 100;
  std::size_t iterations = 512;
  std::size_t length = 10;
  double c_uct = std::sqrt(2.0);
  double delta_th = 0.007;
  int jobs = 1;
  bool record_time = false;
};

struct RunRecord {
  std::string method;
  std::string circuit;
  std::uint64_t seed = 0;
  double alpha = 0.0;
  double delta_min = 0.0;  ///< NaN unless the method consults the gate
  double baseline_adp = 0.0;
  double best_adp = 0.0;
  double reduction_pct = 0.0;
  std::size_t synthesis_calls = 0;
  std::size_t calls_to_best = 0;
  std::string best_recipe;
  std::vector<TraceRow> trace;
};

struct MethodSummary {
  std::string method;
  double geomean_reduction_pct = 0.0;        ///< over per-circuit means
  std::vector<double> seed_geomean_pct;      ///< one per seed, in EvalConfig order
  int wins = 0, ties = 0, losses = 0;        ///< per circuit, against pure_mcts
  double iso_qor_speedup_calls = 1.0;        ///< geometric mean over circuits and seeds
  double iso_qor_speedup_wall = 1.0;         ///< 1 unless wall time was recorded
};

struct EvalReport {
  EvalConfig config;
  std::vector<RunRecord> runs;  ///< sorted by (method order, circuit order, seed order)
  std::vector<MethodSummary> summaries;

  const RunRecord& run(const std::string& method, const std::string& circuit, std::uint64_t seed) const;

  void write_runs_csv(std::ostream& out) const;
  void write_summary_csv(std::ostream& out) const;
  void write_json(std::ostream& out) const;
  /// <dir>/<method>/<circuit>/<seed>.csv
  void write_traces(const std::filesystem::path& dir) const;
};

/// 100 * (geomean of (1 + r / 100) - 1).
double geomean_reduction(const std::vector<double>& reductions_pct);

/// Calls needed to first reach `cost` in an evaluation trace; 0 if never.
std::size_t calls_to_reach(const std::vector<TraceRow>& trace, double cost);

/**
 * Calls the competitor used to reach its final best, divided by the calls
 * `method` needs to reach that same value; 1 when `method` never gets there.
 */
double iso_qor_speedup(const RunRecord& method, const RunRecord& competitor);

/**
 * Runs every method on every circuit for every seed under the same
 * synthesis-call budget. Agent methods need `model`; agent_with_ood also
 * needs the training embedding bank. Jobs run on config.jobs threads and are
 * merged in a fixed order.
 */
EvalReport evaluate(const EvalConfig& config, const PolicyNetwork* model = nullptr,
                    const EmbeddingBank* bank = nullptr);

/**
 * Per circuit in report order: 1 if `pure` beat `guided` (lower mean best
 * adp, or the same with fewer mean calls to reach it), else 0.
 */
std::vector<int> winner_labels(const EvalReport& report, const std::string& guided, const std::string& pure);

/// Single search used by evaluate and the command-line front end.
RunRecord run_search(const Aig& circuit, const std::string& circuit_id, const MctsConfig& config,
                     std::size_t length, const PolicyNetwork* model, const std::string& method_label);

}  // namespace lsopt
