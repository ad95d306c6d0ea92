#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lsopt/aig.hpp"

namespace lsopt {

/// Dense row-major bit matrix; rows are vectors, columns are signals.
class BitMatrix {
public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), bits_(rows * cols, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool get(std::size_t r, std::size_t c) const { return bits_[r * cols_ + c] != 0; }
  void set(std::size_t r, std::size_t c, bool v) { bits_[r * cols_ + c] = v ? 1 : 0; }

  bool operator==(const BitMatrix&) const = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Evaluates every output for every input row. Throws AigError on width mismatch.
BitMatrix simulate(const Aig& aig, const BitMatrix& input_vectors);

/// Bit-parallel core: one word vector per input (all the same length);
/// returns one word vector per node.
std::vector<std::vector<std::uint64_t>> simulate_nodes(
    const Aig& aig, std::span<const std::vector<std::uint64_t>> input_words);

/// Per-output word vectors.
std::vector<std::vector<std::uint64_t>> simulate_outputs(
    const Aig& aig, std::span<const std::vector<std::uint64_t>> input_words);

enum class Verdict { exhaustive, sampled };

struct EquivalenceResult {
  bool equal = false;
  Verdict verdict = Verdict::exhaustive;
  explicit operator bool() const { return equal; }
};

inline constexpr std::size_t kExhaustiveInputLimit = 16;

/**
 * Simulation-based equivalence. Circuits with at most 16 inputs are checked
 * over all input combinations; larger ones over `budget` vectors drawn from
 * a generator seeded with `seed`.
 */
EquivalenceResult equivalent(const Aig& a, const Aig& b, std::size_t budget = 4096,
                             std::uint64_t seed = 0x5eed);

/// Word-packed exhaustive input patterns for n inputs (2^n vectors).
std::vector<std::vector<std::uint64_t>> exhaustive_patterns(std::size_t num_inputs);

}  // namespace lsopt
