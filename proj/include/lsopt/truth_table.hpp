#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace lsopt {

/// Dynamic truth table over up to 16 variables. Bit m holds f(m) where bit i of
/// m is the value of variable i.
class TruthTable {
public:
  static constexpr unsigned kMaxVars = 16;

  explicit TruthTable(unsigned num_vars = 0);

  static TruthTable nth_var(unsigned num_vars, unsigned var);
  static TruthTable constant(unsigned num_vars, bool value);
  static TruthTable from_word(unsigned num_vars, std::uint64_t word);

  unsigned num_vars() const { return num_vars_; }
  std::size_t num_bits() const { return std::size_t{1} << num_vars_; }
  std::span<const std::uint64_t> words() const { return words_; }
  std::uint64_t word(std::size_t i) const { return words_[i]; }

  bool bit(std::size_t minterm) const { return (words_[minterm >> 6] >> (minterm & 63)) & 1u; }
  void set_bit(std::size_t minterm, bool value);

  bool is_const0() const;
  bool is_const1() const;
  bool depends_on(unsigned var) const { return cofactor0(var) != cofactor1(var); }

  /// Cofactors keep the variable count; the result is independent of `var`.
  TruthTable cofactor0(unsigned var) const;
  TruthTable cofactor1(unsigned var) const;

  TruthTable operator~() const;
  TruthTable operator&(const TruthTable& o) const;
  TruthTable operator|(const TruthTable& o) const;
  TruthTable operator^(const TruthTable& o) const;
  bool operator==(const TruthTable& o) const = default;

private:
  void mask_tail();

  unsigned num_vars_;
  std::vector<std::uint64_t> words_;
};

/// Product term: bit i of `pos` means x_i, bit i of `neg` means !x_i.
struct Cube {
  std::uint32_t pos = 0;
  std::uint32_t neg = 0;
  int literal_count() const;
  bool operator==(const Cube&) const = default;
};

/// Irredundant sum-of-products cover (Minato-Morreale) of a completely
/// specified function.
std::vector<Cube> isop(const TruthTable& f);

/// Evaluates a cover back into a truth table.
TruthTable cover_to_truth_table(std::span<const Cube> cubes, unsigned num_vars);

}  // namespace lsopt
