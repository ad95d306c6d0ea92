#include "lsopt/generators.hpp"

#include <array>
#include <random>
#include <stdexcept>

namespace lsopt {

namespace {

constexpr std::array<std::string_view, 5> kFamilyNames = {"ripple_adder", "array_multiplier", "comparator",
                                                          "mux_tree", "random_dag"};

Lit majority(AigBuilder& b, Lit x, Lit y, Lit z) {
  return b.add_or(b.add_or(b.add_and(x, y), b.add_and(x, z)), b.add_and(y, z));
}

// Adds two little-endian words; the result has max(|x|, |y|) + 1 bits.
std::vector<Lit> ripple_add(AigBuilder& b, std::vector<Lit> x, std::vector<Lit> y) {
  const auto n = std::max(x.size(), y.size());
  x.resize(n, Lit::const0());
  y.resize(n, Lit::const0());
  std::vector<Lit> sum;
  Lit carry = Lit::const0();
  for (std::size_t i = 0; i < n; ++i) {
    sum.push_back(b.add_xor(b.add_xor(x[i], y[i]), carry));
    carry = majority(b, x[i], y[i], carry);
  }
  sum.push_back(carry);
  return sum;
}

std::vector<Lit> inputs(AigBuilder& b, int count) {
  std::vector<Lit> v;
  for (int i = 0; i < count; ++i) v.push_back(b.add_input());
  return v;
}

Lit chain_and(AigBuilder& b, const std::vector<Lit>& lits) {
  Lit acc = Lit::const1();
  for (auto l : lits) acc = b.add_and(acc, l);
  return acc;
}

Lit chain_or(AigBuilder& b, const std::vector<Lit>& lits) {
  Lit acc = Lit::const0();
  for (auto l : lits) acc = b.add_or(acc, l);
  return acc;
}

void ripple_adder(AigBuilder& b, int n) {
  const auto x = inputs(b, n);
  const auto y = inputs(b, n);
  for (auto s : ripple_add(b, x, y)) b.add_output(s);
}

void array_multiplier(AigBuilder& b, int n) {
  const auto x = inputs(b, n);
  const auto y = inputs(b, n);
  std::vector<Lit> acc;
  for (int i = 0; i < n; ++i) {
    std::vector<Lit> row(static_cast<std::size_t>(i), Lit::const0());
    for (int j = 0; j < n; ++j) row.push_back(b.add_and(x[j], y[i]));
    acc = acc.empty() ? row : ripple_add(b, acc, row);
  }
  acc.resize(2 * static_cast<std::size_t>(n), Lit::const0());
  for (auto p : acc) b.add_output(p);
}

void comparator(AigBuilder& b, int n) {
  const auto x = inputs(b, n);
  const auto y = inputs(b, n);
  Lit lt = Lit::const0(), gt = Lit::const0();
  std::vector<Lit> same;
  for (int i = 0; i < n; ++i) {
    const Lit eq_i = !b.add_xor(x[i], y[i]);
    lt = b.add_or(b.add_and(!x[i], y[i]), b.add_and(eq_i, lt));
    gt = b.add_or(b.add_and(x[i], !y[i]), b.add_and(eq_i, gt));
    same.push_back(eq_i);
  }
  b.add_output(lt);
  b.add_output(chain_and(b, same));
  b.add_output(gt);
}

void mux_tree(AigBuilder& b, int k) {
  const auto data = inputs(b, 1 << k);
  const auto sel = inputs(b, k);
  std::vector<Lit> terms;
  for (int i = 0; i < (1 << k); ++i) {
    std::vector<Lit> lits;
    for (int j = 0; j < k; ++j) lits.push_back(sel[j] ^ !((i >> j) & 1));
    lits.push_back(data[i]);
    terms.push_back(chain_and(b, lits));
  }
  b.add_output(chain_or(b, terms));
}

void random_dag(AigBuilder& b, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + static_cast<std::uint64_t>(n));
  std::vector<Lit> pool = inputs(b, n);
  std::vector<int> used(pool.size(), 0);
  const int gates = 4 * n;
  for (int g = 0; g < gates; ++g) {
    // Prefer recent signals so the graph grows deep rather than wide.
    auto pick = [&]() {
      const auto size = pool.size();
      const auto window = std::min<std::size_t>(size, static_cast<std::size_t>(2 * n));
      std::size_t i = (rng() % 3 == 0) ? rng() % size : size - 1 - rng() % window;
      ++used[i];
      return pool[i] ^ static_cast<bool>(rng() & 1);
    };
    const Lit a = pick();
    const Lit c = pick();
    const Lit r = b.add_and(a, c);
    if (r.is_const()) continue;
    pool.push_back(r);
    used.push_back(0);
  }
  int outputs = 0;
  for (std::size_t i = pool.size(); i-- > static_cast<std::size_t>(n) && outputs < n;) {
    if (used[i] == 0) {
      b.add_output(pool[i]);
      ++outputs;
    }
  }
  if (outputs == 0) b.add_output(pool.back());
}

}  // namespace

std::string_view family_name(Family f) { return kFamilyNames[static_cast<int>(f)]; }

std::optional<Family> parse_family(std::string_view name) {
  for (std::size_t i = 0; i < kFamilyNames.size(); ++i) {
    if (kFamilyNames[i] == name) return static_cast<Family>(i);
  }
  return std::nullopt;
}

SizeRange family_size_range(Family f) {
  switch (f) {
    case Family::ripple_adder: return {1, 12};
    case Family::array_multiplier: return {1, 12};
    case Family::comparator: return {1, 12};
    case Family::mux_tree: return {1, 4};
    case Family::random_dag: return {2, 24};
  }
  return {0, -1};
}

std::string circuit_name(Family family, int size, std::uint64_t seed) {
  std::string name = std::string(family_name(family)) + "_" + std::to_string(size);
  if (family == Family::random_dag) name += "_s" + std::to_string(seed);
  return name;
}

Aig generate_circuit(Family family, int size, std::uint64_t seed) {
  const auto range = family_size_range(family);
  if (size < range.min || size > range.max) {
    throw std::invalid_argument(std::string(family_name(family)) + " size must be in [" +
                                std::to_string(range.min) + ", " + std::to_string(range.max) + "]");
  }
  AigBuilder b(circuit_name(family, size, seed));
  switch (family) {
    case Family::ripple_adder: ripple_adder(b, size); break;
    case Family::array_multiplier: array_multiplier(b, size); break;
    case Family::comparator: comparator(b, size); break;
    case Family::mux_tree: mux_tree(b, size); break;
    case Family::random_dag: random_dag(b, size, seed); break;
  }
  return cleanup(std::move(b).build());
}

std::vector<Aig> test_corpus() {
  std::vector<Aig> corpus;
  for (int n = 1; n <= 8; ++n) corpus.push_back(generate_circuit(Family::ripple_adder, n));
  for (int n = 1; n <= 8; ++n) corpus.push_back(generate_circuit(Family::array_multiplier, n));
  for (int n = 1; n <= 8; ++n) corpus.push_back(generate_circuit(Family::comparator, n));
  for (int k = 1; k <= 3; ++k) corpus.push_back(generate_circuit(Family::mux_tree, k));
  for (int n = 4; n <= 16; n += 2) {
    for (std::uint64_t s = 1; s <= 4; ++s) corpus.push_back(generate_circuit(Family::random_dag, n, s));
  }
  return corpus;
}

}  // namespace lsopt
