#pragma once

#include "lsopt/aig.hpp"
#include "lsopt/transforms.hpp"

namespace lsopt {

/// Area-delay proxy: and2 count times depth. Smaller is better.
struct QorValue {
  double adp_proxy = 0.0;
  auto operator<=>(const QorValue&) const = default;
};

QorValue qor(const Aig& aig);

/// b; rw; rf; b; rw; rwz; b; rfz; rwz; b
Recipe baseline_recipe();

/// QoR after the baseline recipe. Memoized per circuit structure; thread-safe.
QorValue baseline_qor(const Aig& aig);

/// Normalized reward in [-1, 1]: 1 - adp / baseline while adp < 2 * baseline,
/// -1 beyond that, and 0 when the baseline is 0.
double reward(QorValue final_qor, QorValue baseline);

}  // namespace lsopt
