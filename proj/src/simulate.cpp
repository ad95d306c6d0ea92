#include "lsopt/simulate.hpp"

#include <random>

namespace lsopt {

namespace {

constexpr std::uint64_t kVarMasks[6] = {
    0xaaaaaaaaaaaaaaaaull, 0xccccccccccccccccull, 0xf0f0f0f0f0f0f0f0ull,
    0xff00ff00ff00ff00ull, 0xffff0000ffff0000ull, 0xffffffff00000000ull,
};

}  // namespace

std::vector<std::vector<std::uint64_t>> simulate_nodes(
    const Aig& aig, std::span<const std::vector<std::uint64_t>> input_words) {
  if (input_words.size() != aig.num_inputs()) {
    throw AigError("simulation width mismatch: expected " + std::to_string(aig.num_inputs()) +
                   " inputs, got " + std::to_string(input_words.size()));
  }
  const std::size_t words = input_words.empty() ? 1 : input_words.front().size();
  std::vector<std::vector<std::uint64_t>> value(aig.num_nodes());
  value[0].assign(words, 0);
  for (std::size_t i = 0; i < aig.num_inputs(); ++i) {
    if (input_words[i].size() != words) throw AigError("simulation inputs have unequal lengths");
    value[i + 1] = input_words[i];
  }
  for (auto n = static_cast<std::uint32_t>(aig.num_inputs() + 1); n < aig.num_nodes(); ++n) {
    const Lit f0 = aig.fanin0(n);
    const Lit f1 = aig.fanin1(n);
    const std::uint64_t m0 = f0.complemented() ? ~0ull : 0;
    const std::uint64_t m1 = f1.complemented() ? ~0ull : 0;
    const auto& v0 = value[f0.node()];
    const auto& v1 = value[f1.node()];
    auto& out = value[n];
    out.resize(words);
    for (std::size_t w = 0; w < words; ++w) out[w] = (v0[w] ^ m0) & (v1[w] ^ m1);
  }
  return value;
}

std::vector<std::vector<std::uint64_t>> simulate_outputs(
    const Aig& aig, std::span<const std::vector<std::uint64_t>> input_words) {
  const auto value = simulate_nodes(aig, input_words);
  std::vector<std::vector<std::uint64_t>> out;
  out.reserve(aig.num_outputs());
  for (Lit o : aig.outputs()) {
    auto words = value[o.node()];
    if (o.complemented()) {
      for (auto& w : words) w = ~w;
    }
    out.push_back(std::move(words));
  }
  return out;
}

BitMatrix simulate(const Aig& aig, const BitMatrix& input_vectors) {
  if (input_vectors.cols() != aig.num_inputs()) {
    throw AigError("simulation width mismatch: vectors have " + std::to_string(input_vectors.cols()) +
                   " columns, circuit has " + std::to_string(aig.num_inputs()) + " inputs");
  }
  const std::size_t rows = input_vectors.rows();
  const std::size_t words = std::max<std::size_t>(1, (rows + 63) / 64);
  std::vector<std::vector<std::uint64_t>> packed(aig.num_inputs(), std::vector<std::uint64_t>(words, 0));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < input_vectors.cols(); ++c) {
      if (input_vectors.get(r, c)) packed[c][r / 64] |= 1ull << (r % 64);
    }
  }
  const auto out = simulate_outputs(aig, packed);
  BitMatrix result(rows, aig.num_outputs());
  for (std::size_t j = 0; j < out.size(); ++j) {
    for (std::size_t r = 0; r < rows; ++r) result.set(r, j, (out[j][r / 64] >> (r % 64)) & 1u);
  }
  return result;
}

std::vector<std::vector<std::uint64_t>> exhaustive_patterns(std::size_t num_inputs) {
  const std::size_t words = num_inputs <= 6 ? 1 : (std::size_t{1} << (num_inputs - 6));
  std::vector<std::vector<std::uint64_t>> patterns(num_inputs, std::vector<std::uint64_t>(words));
  for (std::size_t i = 0; i < num_inputs; ++i) {
    for (std::size_t w = 0; w < words; ++w) {
      patterns[i][w] = i < 6 ? kVarMasks[i] : (((w >> (i - 6)) & 1u) ? ~0ull : 0ull);
    }
  }
  if (num_inputs < 6) {
    const std::uint64_t mask = (1ull << (1u << num_inputs)) - 1;
    for (auto& p : patterns) p[0] &= mask;
  }
  return patterns;
}

EquivalenceResult equivalent(const Aig& a, const Aig& b, std::size_t budget, std::uint64_t seed) {
  if (a.num_inputs() != b.num_inputs() || a.num_outputs() != b.num_outputs()) {
    throw AigError("equivalence check on circuits with different interfaces");
  }
  EquivalenceResult result;
  std::vector<std::vector<std::uint64_t>> patterns;
  std::uint64_t tail_mask = ~0ull;
  if (a.num_inputs() <= kExhaustiveInputLimit) {
    result.verdict = Verdict::exhaustive;
    patterns = exhaustive_patterns(a.num_inputs());
    if (a.num_inputs() < 6) tail_mask = (1ull << (1u << a.num_inputs())) - 1;
  } else {
    result.verdict = Verdict::sampled;
    const std::size_t words = std::max<std::size_t>(1, (budget + 63) / 64);
    if (budget % 64 != 0) tail_mask = (1ull << (budget % 64)) - 1;
    std::mt19937_64 rng(seed);
    patterns.assign(a.num_inputs(), std::vector<std::uint64_t>(words));
    for (auto& p : patterns) {
      for (auto& w : p) w = rng();
    }
  }
  const auto out_a = simulate_outputs(a, patterns);
  const auto out_b = simulate_outputs(b, patterns);
  for (std::size_t j = 0; j < out_a.size(); ++j) {
    for (std::size_t w = 0; w < out_a[j].size(); ++w) {
      const std::uint64_t mask = (w + 1 == out_a[j].size()) ? tail_mask : ~0ull;
      if ((out_a[j][w] ^ out_b[j][w]) & mask) {
        result.equal = false;
        return result;
      }
    }
  }
  result.equal = true;
  return result;
}

}  // namespace lsopt
