#include "lsopt/transforms.hpp"
#include "passes.hpp"

namespace lsopt {

namespace {

constexpr std::size_t kMaxConeLeaves = 10;

}  // namespace

Aig refactor(const Aig& aig, bool zero_cost) {
  detail::Network net(aig);
  detail::Marks marks;
  const int threshold = zero_cost ? 0 : 1;
  const auto original_size = net.size();

  for (auto n = static_cast<std::uint32_t>(net.num_inputs() + 1); n < original_size; ++n) {
    if (net.is_dead(n)) continue;
    const auto leaves = detail::reconvergence_cut(net, n, kMaxConeLeaves, marks);
    if (leaves.size() < 2) continue;
    const auto cone = detail::collect_cone(net, n, leaves, marks);
    if (cone.size() < 2 && !zero_cost) continue;
    const auto function = detail::cone_functions(net, leaves, cone).back();

    std::vector<std::uint32_t> leaf_levels;
    std::vector<Lit> leaf_lits;
    for (auto l : leaves) {
      leaf_levels.push_back(net.level(l));
      leaf_lits.push_back(Lit::make(l));
    }
    const auto graph = detail::synthesize_cached(function, leaf_levels);

    const auto freed = static_cast<int>(net.deref_cone(n, leaves).size());
    const auto cost = net.evaluate(graph, leaf_lits);
    net.ref_cone(n, leaves);

    if (cost.existing && cost.existing->node() == n) continue;
    if (cost.level > net.level(n)) continue;
    if (freed - cost.added < threshold) continue;
    const Lit replacement = net.instantiate(graph, leaf_lits);
    if (replacement.node() == n) continue;
    net.replace(n, replacement);
  }
  return net.to_aig();
}

}  // namespace lsopt
