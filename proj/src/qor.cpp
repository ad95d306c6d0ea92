#include "lsopt/qor.hpp"

#include <algorithm>
#include <map>
#include <mutex>

#include "lsopt/aiger.hpp"

namespace lsopt {

QorValue qor(const Aig& aig) {
  const auto s = stats(aig);
  return {static_cast<double>(s.node_count) * static_cast<double>(s.depth)};
}

Recipe baseline_recipe() {
  return {Action::Balance, Action::Rewrite,  Action::Refactor,  Action::Balance,  Action::Rewrite,
          Action::RewriteZ, Action::Balance, Action::RefactorZ, Action::RewriteZ, Action::Balance};
}

QorValue baseline_qor(const Aig& aig) {
  static std::mutex mutex;
  static std::map<std::string, QorValue> cache;
  auto key = write_aiger_binary(aig);
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const QorValue value = qor(apply_recipe(aig, baseline_recipe()).aig);
  std::lock_guard lock(mutex);
  cache.emplace(std::move(key), value);
  return value;
}

double reward(QorValue final_qor, QorValue baseline) {
  if (baseline.adp_proxy <= 0.0) return 0.0;
  const double r = final_qor.adp_proxy < 2.0 * baseline.adp_proxy ? 1.0 - final_qor.adp_proxy / baseline.adp_proxy : -1.0;
  return std::clamp(r, -1.0, 1.0);
}

}  // namespace lsopt
