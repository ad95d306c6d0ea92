#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lsopt/aig.hpp"

namespace lsopt {

enum class Family { ripple_adder, array_multiplier, comparator, mux_tree, random_dag };

std::string_view family_name(Family f);
std::optional<Family> parse_family(std::string_view name);

struct SizeRange {
  int min;
  int max;
};
/// Valid `size` values per family; every family stays within 24 inputs.
SizeRange family_size_range(Family f);

/**
 * Deterministic benchmark circuits. The structures are deliberately plain
 * (two-level xor, sum-of-products majority, linear chains) so the passes have
 * something to find.
 *
 *   ripple_adder(n)      a[0..n), b[0..n) -> s[0..n), carry
 *   array_multiplier(n)  a[0..n), b[0..n) -> p[0..2n)
 *   comparator(n)        a[0..n), b[0..n) -> lt, eq, gt
 *   mux_tree(k)          d[0..2^k), s[0..k) -> d[s]
 *   random_dag(n)        n inputs, 4n random gates, sinks as outputs
 *
 * The seed only affects random_dag. Throws std::invalid_argument when size
 * is out of range.
 */
Aig generate_circuit(Family family, int size, std::uint64_t seed = 0);

/// Name used for generated circuits, e.g. "ripple_adder_8" or "random_dag_10_s3".
std::string circuit_name(Family family, int size, std::uint64_t seed = 0);

/// The fixed sweep used by the property tests: every family over a range of
/// sizes plus seeded random graphs.
std::vector<Aig> test_corpus();

}  // namespace lsopt
