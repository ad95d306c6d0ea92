#include "lsopt/ood.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace lsopt {

void EmbeddingBank::add(std::string id, Eigen::VectorXd h) {
  if (h.size() == 0) throw std::invalid_argument("empty embedding for " + id);
  if (!entries_.empty() && h.size() != dimension()) {
    throw std::invalid_argument("embedding for " + id + " has dimension " + std::to_string(h.size()) +
                                ", bank has " + std::to_string(dimension()));
  }
  if (!h.allFinite()) throw std::invalid_argument("non-finite embedding for " + id);
  entries_.push_back({std::move(id), std::move(h)});
}

void EmbeddingBank::write_csv(std::ostream& out) const {
  out << "circuit_id,dim,values\n";
  const auto precision = out.precision(17);
  for (const auto& e : entries_) {
    out << e.id << ',' << e.h.size();
    for (Eigen::Index i = 0; i < e.h.size(); ++i) out << ',' << e.h(i);
    out << '\n';
  }
  out.precision(precision);
}

EmbeddingBank EmbeddingBank::read_csv(std::istream& in, BankSource source) {
  EmbeddingBank bank(source);
  std::string line;
  if (!std::getline(in, line) || line.rfind("circuit_id,dim", 0) != 0) {
    throw std::runtime_error("embedding bank: missing header");
  }
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string id, cell;
    std::getline(fields, id, ',');
    if (!std::getline(fields, cell, ',')) throw std::runtime_error("embedding bank: short row " + std::to_string(row));
    const long dim = std::stol(cell);
    if (dim <= 0) throw std::runtime_error("embedding bank: bad dimension on row " + std::to_string(row));
    Eigen::VectorXd h(dim);
    for (long i = 0; i < dim; ++i) {
      if (!std::getline(fields, cell, ',')) {
        throw std::runtime_error("embedding bank: row " + std::to_string(row) + " has fewer values than its dim");
      }
      h(i) = std::stod(cell);
    }
    if (std::getline(fields, cell, ',')) {
      throw std::runtime_error("embedding bank: row " + std::to_string(row) + " has more values than its dim");
    }
    bank.add(id, std::move(h));
  }
  return bank;
}

double cosine_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine distance of vectors with different sizes");
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("cosine distance of a zero vector");
  return std::clamp(1.0 - a.dot(b) / (na * nb), 0.0, 2.0);
}

Nearest min_distance(const Eigen::VectorXd& h, const EmbeddingBank& bank) {
  if (bank.empty()) throw std::invalid_argument("embedding bank is empty");
  Nearest best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < bank.size(); ++i) {
    const double d = cosine_distance(h, bank.entries()[i].h);
    if (d < best.distance) best = {d, i, bank.entries()[i].id};
  }
  return best;
}

double alpha(double delta_min, const OodConfig& config) {
  if (config.temperature <= 0.0) return delta_min < config.delta_th ? 1.0 : 0.0;
  return 1.0 / (1.0 + std::exp((delta_min - config.delta_th) / config.temperature));
}

Calibration calibrate_distances(std::span<const double> delta_min, std::span<const int> labels) {
  if (delta_min.empty()) throw std::invalid_argument("calibration needs at least one validation point");
  if (delta_min.size() != labels.size()) throw std::invalid_argument("distance and label counts differ");
  Calibration out;
  out.delta_min.assign(delta_min.begin(), delta_min.end());
  const auto zeros = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 0));
  const std::size_t ones = labels.size() - zeros;
  if (zeros + static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1)) != labels.size()) {
    throw std::invalid_argument("labels must be 0 or 1");
  }
  if (ones == 0) {
    out.threshold = std::numeric_limits<double>::infinity();
    return out;
  }
  if (zeros == 0) {
    out.threshold = 0.0;
    return out;
  }

  std::vector<double> sorted(delta_min.begin(), delta_min.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  out.threshold = sorted.front();
  out.youden_j = 0.0;
  bool found = false;
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    const double th = 0.5 * (sorted[i] + sorted[i + 1]);
    std::size_t tp = 0, fp = 0;
    for (std::size_t k = 0; k < labels.size(); ++k) {
      if (delta_min[k] < th) (labels[k] == 0 ? tp : fp) += 1;
    }
    const double j = static_cast<double>(tp) / zeros - static_cast<double>(fp) / ones;
    if (!found || j > out.youden_j + 1e-12) {
      out.threshold = th;
      out.youden_j = j;
      found = true;
    }
  }
  return out;
}

Calibration calibrate(std::span<const ValidationPoint> validation, const EmbeddingBank& train) {
  if (validation.empty()) throw std::invalid_argument("calibration needs at least one validation point");
  std::vector<double> d;
  std::vector<int> labels;
  for (const auto& v : validation) {
    d.push_back(min_distance(v.h, train).distance);
    labels.push_back(v.label);
  }
  return calibrate_distances(d, labels);
}

void write_calibration_csv(std::ostream& out, std::span<const ValidationPoint> validation,
                           const EmbeddingBank& train, const Calibration& calibration) {
  out << "circuit";
  for (const auto& e : train.entries()) out << ',' << e.id;
  out << ",delta_min,winner,delta_th\n";
  const auto precision = out.precision(17);
  for (std::size_t i = 0; i < validation.size(); ++i) {
    out << validation[i].id;
    for (const auto& e : train.entries()) out << ',' << cosine_distance(validation[i].h, e.h);
    out << ',' << calibration.delta_min.at(i) << ',' << validation[i].label << ',' << calibration.threshold << '\n';
  }
  out.precision(precision);
}

}  // namespace lsopt
