#include <optional>
#include <random>
#include <unordered_map>

#include "lsopt/transforms.hpp"
#include "passes.hpp"

namespace lsopt {

namespace {

constexpr std::size_t kWindowLeaves = 8;
constexpr std::uint32_t kWindowLevels = 8;
constexpr std::size_t kMaxDivisors = 64;
constexpr std::uint64_t kSignatureSeed = 0x7e5b5eedull;

struct Divisor {
  std::uint32_t node;
  std::uint64_t signature;
  TruthTable function;
};

}  // namespace

Aig resub(const Aig& aig, bool zero_cost) {
  detail::Network net(aig);
  detail::Marks marks;
  detail::Marks divisor_marks;
  const int threshold = zero_cost ? 0 : 1;
  const auto original_size = net.size();

  for (auto n = static_cast<std::uint32_t>(net.num_inputs() + 1); n < original_size; ++n) {
    if (net.is_dead(n)) continue;
    const auto leaves = detail::reconvergence_cut(net, n, kWindowLeaves, marks, kWindowLevels);
    if (leaves.empty()) continue;
    const auto cone = detail::collect_cone(net, n, leaves, marks);
    const auto cone_tt = detail::cone_functions(net, leaves, cone);
    const auto k = static_cast<unsigned>(leaves.size());

    // Random simulation signatures for the window: one 64-bit word per leaf.
    std::mt19937_64 rng(kSignatureSeed);
    std::unordered_map<std::uint32_t, std::uint64_t> signature;
    for (auto l : leaves) signature[l] = rng();
    auto sig_of = [&](Lit f) {
      const std::uint64_t s = f.node() == 0 ? 0 : signature.at(f.node());
      return f.complemented() ? ~s : s;
    };
    for (auto c : cone) signature[c] = sig_of(net.fanin0(c)) & sig_of(net.fanin1(c));
    const std::uint64_t target_sig = signature.at(n);
    const TruthTable& target = cone_tt.back();

    const auto freed = net.deref_cone(n, leaves);
    const int mffc = static_cast<int>(freed.size());

    // Divisors: window nodes that survive the removal of n, then side nodes
    // whose fanins are both divisors.
    divisor_marks.next(net.size());
    std::vector<Divisor> divisors;
    for (unsigned i = 0; i < k; ++i) {
      divisors.push_back({leaves[i], signature.at(leaves[i]), TruthTable::nth_var(k, i)});
      divisor_marks.set(leaves[i]);
    }
    for (std::size_t i = 0; i + 1 < cone.size(); ++i) {
      if (net.refs(cone[i]) == 0) continue;
      divisors.push_back({cone[i], signature.at(cone[i]), cone_tt[i]});
      divisor_marks.set(cone[i]);
    }
    for (std::size_t i = 0; i < divisors.size() && divisors.size() < kMaxDivisors; ++i) {
      for (auto f : net.fanouts(divisors[i].node)) {
        if (divisors.size() >= kMaxDivisors) break;
        if (f == n || net.is_dead(f) || divisor_marks.test(f) || net.refs(f) == 0) continue;
        if (net.level(f) > net.level(n)) continue;
        const Lit a = net.fanin0(f), b = net.fanin1(f);
        if (a.node() == 0 || !divisor_marks.test(a.node()) || !divisor_marks.test(b.node())) continue;
        auto lookup = [&](Lit x) -> const Divisor& {
          for (const auto& d : divisors) {
            if (d.node == x.node()) return d;
          }
          return divisors.front();
        };
        const auto& da = lookup(a);
        const auto& db = lookup(b);
        const std::uint64_t sa = a.complemented() ? ~da.signature : da.signature;
        const std::uint64_t sb = b.complemented() ? ~db.signature : db.signature;
        auto ta = a.complemented() ? ~da.function : da.function;
        auto tb = b.complemented() ? ~db.function : db.function;
        divisors.push_back({f, sa & sb, ta & tb});
        divisor_marks.set(f);
      }
    }

    std::optional<Lit> replacement;
    // Zero-gate resubstitution: n equals an existing divisor up to complement.
    for (const auto& d : divisors) {
      if (net.level(d.node) > net.level(n)) continue;
      if (d.signature == target_sig && d.function == target) {
        replacement = Lit::make(d.node);
      } else if (d.signature == ~target_sig && d.function == ~target) {
        replacement = Lit::make(d.node, true);
      }
      if (replacement) break;
    }
    // One-gate resubstitution: n equals an and (or an or) of two divisors.
    if (!replacement && mffc - 1 >= threshold) {
      for (std::size_t i = 0; i < divisors.size() && !replacement; ++i) {
        for (std::size_t j = i + 1; j < divisors.size() && !replacement; ++j) {
          const auto& d1 = divisors[i];
          const auto& d2 = divisors[j];
          if (1 + std::max(net.level(d1.node), net.level(d2.node)) > net.level(n)) continue;
          for (int phase = 0; phase < 4 && !replacement; ++phase) {
            const bool c1 = phase & 1, c2 = phase & 2;
            const std::uint64_t s = (c1 ? ~d1.signature : d1.signature) & (c2 ? ~d2.signature : d2.signature);
            bool out_complement;
            if (s == target_sig) {
              out_complement = false;
            } else if (s == ~target_sig) {
              out_complement = true;
            } else {
              continue;
            }
            const auto t = (c1 ? ~d1.function : d1.function) & (c2 ? ~d2.function : d2.function);
            if (t != (out_complement ? ~target : target)) continue;
            const Lit a = Lit::make(d1.node, c1), b = Lit::make(d2.node, c2);
            const auto existing = net.lookup(a, b);
            if (existing && existing->node() == n) continue;
            const int cost = (existing && net.refs(existing->node()) > 0) ? 0 : 1;
            if (mffc - cost < threshold) continue;
            net.ref_cone(n, leaves);
            replacement = net.create_and(a, b) ^ out_complement;
          }
        }
      }
      if (replacement) {
        net.replace(n, *replacement);
        continue;
      }
    }
    net.ref_cone(n, leaves);
    if (replacement && mffc >= threshold) net.replace(n, *replacement);
  }
  return net.to_aig();
}

}  // namespace lsopt
