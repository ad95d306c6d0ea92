#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lsopt {

enum class BankSource { train, validation };

struct BankEntry {
  std::string id;
  Eigen::VectorXd h;
};

/// Circuit embeddings of one dataset split; all of the same dimension.
class EmbeddingBank {
public:
  explicit EmbeddingBank(BankSource source = BankSource::train) : source_(source) {}

  /// Throws on a dimension mismatch or a non-finite value.
  void add(std::string id, Eigen::VectorXd h);

  BankSource source() const { return source_; }
  const std::vector<BankEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  Eigen::Index dimension() const { return entries_.empty() ? 0 : entries_.front().h.size(); }

  /// Header "circuit_id,dim,values", then one row per entry.
  void write_csv(std::ostream& out) const;
  static EmbeddingBank read_csv(std::istream& in, BankSource source = BankSource::train);

private:
  BankSource source_;
  std::vector<BankEntry> entries_;
};

struct OodConfig {
  double delta_th = 0.007;
  double temperature = 0.0;  ///< 0 selects the hard gate
};

/// 1 - cos(a, b), in [0, 2]. Throws on zero vectors or differing sizes.
double cosine_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

struct Nearest {
  double distance = 0.0;
  std::size_t index = 0;
  std::string id;
};

/// Closest bank entry; the first one wins ties. Throws on an empty bank.
Nearest min_distance(const Eigen::VectorXd& h, const EmbeddingBank& bank);

/// Hard gate [delta_min < delta_th] when T = 0, else 1 - sigmoid((delta_min - delta_th) / T).
double alpha(double delta_min, const OodConfig& config);

struct ValidationPoint {
  std::string id;
  Eigen::VectorXd h;
  int label = 0;  ///< 0: guided search won, 1: plain search won
};

struct Calibration {
  double threshold = 0.0;
  double youden_j = 0.0;
  std::vector<double> delta_min;  ///< per validation point, in input order
};

/**
 * Threshold maximizing Youden's J for the rule "delta < threshold => label 0",
 * swept over midpoints of the distinct sorted distances; ties go to the
 * smaller threshold. +inf if every label is 0, 0 if every label is 1.
 */
Calibration calibrate_distances(std::span<const double> delta_min, std::span<const int> labels);
Calibration calibrate(std::span<const ValidationPoint> validation, const EmbeddingBank& train);

/// Validation circuit x per-train distance table with delta_min, winner and threshold.
void write_calibration_csv(std::ostream& out, std::span<const ValidationPoint> validation,
                           const EmbeddingBank& train, const Calibration& calibration);

}  // namespace lsopt
