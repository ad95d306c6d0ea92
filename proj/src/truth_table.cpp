#include "lsopt/truth_table.hpp"

#include <bit>
#include <stdexcept>

namespace lsopt {

namespace {

constexpr std::uint64_t kVarMasks[6] = {
    0xaaaaaaaaaaaaaaaaull, 0xccccccccccccccccull, 0xf0f0f0f0f0f0f0f0ull,
    0xff00ff00ff00ff00ull, 0xffff0000ffff0000ull, 0xffffffff00000000ull,
};

std::size_t word_count(unsigned num_vars) {
  return num_vars <= 6 ? 1 : (std::size_t{1} << (num_vars - 6));
}

}  // namespace

TruthTable::TruthTable(unsigned num_vars) : num_vars_(num_vars) {
  if (num_vars > kMaxVars) throw std::invalid_argument("truth table supports at most 16 variables");
  words_.assign(word_count(num_vars), 0);
}

TruthTable TruthTable::nth_var(unsigned num_vars, unsigned var) {
  TruthTable t(num_vars);
  for (std::size_t w = 0; w < t.words_.size(); ++w) {
    t.words_[w] = var < 6 ? kVarMasks[var] : (((w >> (var - 6)) & 1u) ? ~0ull : 0ull);
  }
  t.mask_tail();
  return t;
}

TruthTable TruthTable::constant(unsigned num_vars, bool value) {
  TruthTable t(num_vars);
  if (value) {
    for (auto& w : t.words_) w = ~0ull;
    t.mask_tail();
  }
  return t;
}

TruthTable TruthTable::from_word(unsigned num_vars, std::uint64_t word) {
  TruthTable t(num_vars);
  t.words_[0] = word;
  t.mask_tail();
  return t;
}

void TruthTable::mask_tail() {
  if (num_vars_ < 6) words_[0] &= (1ull << (1u << num_vars_)) - 1;
}

void TruthTable::set_bit(std::size_t minterm, bool value) {
  const std::uint64_t m = 1ull << (minterm & 63);
  if (value) {
    words_[minterm >> 6] |= m;
  } else {
    words_[minterm >> 6] &= ~m;
  }
}

bool TruthTable::is_const0() const {
  for (auto w : words_) {
    if (w != 0) return false;
  }
  return true;
}

bool TruthTable::is_const1() const { return *this == constant(num_vars_, true); }

TruthTable TruthTable::cofactor0(unsigned var) const {
  TruthTable t(num_vars_);
  if (var < 6) {
    const unsigned shift = 1u << var;
    for (std::size_t w = 0; w < words_.size(); ++w) {
      const std::uint64_t low = words_[w] & ~kVarMasks[var];
      t.words_[w] = low | (low << shift);
    }
  } else {
    const std::size_t stride = std::size_t{1} << (var - 6);
    for (std::size_t w = 0; w < words_.size(); ++w) {
      t.words_[w] = words_[w & ~stride];
    }
  }
  t.mask_tail();
  return t;
}

TruthTable TruthTable::cofactor1(unsigned var) const {
  TruthTable t(num_vars_);
  if (var < 6) {
    const unsigned shift = 1u << var;
    for (std::size_t w = 0; w < words_.size(); ++w) {
      const std::uint64_t high = words_[w] & kVarMasks[var];
      t.words_[w] = high | (high >> shift);
    }
  } else {
    const std::size_t stride = std::size_t{1} << (var - 6);
    for (std::size_t w = 0; w < words_.size(); ++w) {
      t.words_[w] = words_[w | stride];
    }
  }
  t.mask_tail();
  return t;
}

TruthTable TruthTable::operator~() const {
  TruthTable t = *this;
  for (auto& w : t.words_) w = ~w;
  t.mask_tail();
  return t;
}

TruthTable TruthTable::operator&(const TruthTable& o) const {
  TruthTable t = *this;
  for (std::size_t i = 0; i < words_.size(); ++i) t.words_[i] &= o.words_[i];
  return t;
}

TruthTable TruthTable::operator|(const TruthTable& o) const {
  TruthTable t = *this;
  for (std::size_t i = 0; i < words_.size(); ++i) t.words_[i] |= o.words_[i];
  return t;
}

TruthTable TruthTable::operator^(const TruthTable& o) const {
  TruthTable t = *this;
  for (std::size_t i = 0; i < words_.size(); ++i) t.words_[i] ^= o.words_[i];
  return t;
}

int Cube::literal_count() const { return std::popcount(pos) + std::popcount(neg); }

namespace {

// Minato-Morreale: on-set `lower`, upper bound `upper` (on-set plus don't cares).
// Appends cubes and returns the function they cover.
TruthTable isop_rec(const TruthTable& lower, const TruthTable& upper, unsigned var_limit,
                    std::vector<Cube>& cubes) {
  if (lower.is_const0()) return lower;
  if (upper.is_const1()) {
    cubes.push_back({});
    return upper;
  }
  unsigned var = var_limit;
  while (var > 0) {
    --var;
    if (lower.depends_on(var) || upper.depends_on(var)) break;
  }
  const auto l0 = lower.cofactor0(var), l1 = lower.cofactor1(var);
  const auto u0 = upper.cofactor0(var), u1 = upper.cofactor1(var);

  const auto begin0 = cubes.size();
  const auto r0 = isop_rec(l0 & ~u1, u0, var, cubes);
  const auto end0 = cubes.size();
  const auto r1 = isop_rec(l1 & ~u0, u1, var, cubes);
  const auto end1 = cubes.size();
  auto rest = isop_rec((l0 & ~r0) | (l1 & ~r1), u0 & u1, var, cubes);

  const auto x = TruthTable::nth_var(lower.num_vars(), var);
  rest = rest | (r0 & ~x) | (r1 & x);
  for (auto i = begin0; i < end0; ++i) cubes[i].neg |= 1u << var;
  for (auto i = end0; i < end1; ++i) cubes[i].pos |= 1u << var;
  return rest;
}

}  // namespace

std::vector<Cube> isop(const TruthTable& f) {
  std::vector<Cube> cubes;
  isop_rec(f, f, f.num_vars(), cubes);
  return cubes;
}

TruthTable cover_to_truth_table(std::span<const Cube> cubes, unsigned num_vars) {
  TruthTable result(num_vars);
  for (const auto& c : cubes) {
    auto term = TruthTable::constant(num_vars, true);
    for (unsigned v = 0; v < num_vars; ++v) {
      if (c.pos & (1u << v)) term = term & TruthTable::nth_var(num_vars, v);
      if (c.neg & (1u << v)) term = term & ~TruthTable::nth_var(num_vars, v);
    }
    result = result | term;
  }
  return result;
}

}  // namespace lsopt
