#include <doctest.h>

#include "lsopt/generators.hpp"
#include "lsopt/qor.hpp"

using namespace lsopt;

TEST_CASE("qor is node count times depth") {
  AigBuilder b;
  const Lit x = b.add_input(), y = b.add_input();
  b.add_output(b.add_and(x, y));
  CHECK(qor(std::move(b).build()).adp_proxy == 1.0);

  AigBuilder e;
  e.add_output(Lit::const0());
  CHECK(qor(std::move(e).build()).adp_proxy == 0.0);

  const Aig adder = generate_circuit(Family::ripple_adder, 8);
  const auto levels = compute_levels(adder);
  std::uint32_t depth = 0;
  for (auto o : adder.outputs()) depth = std::max(depth, levels[o.node()]);
  CHECK(qor(adder).adp_proxy == static_cast<double>(adder.num_ands() * depth));
}

TEST_CASE("baseline recipe") {
  const Recipe r = baseline_recipe();
  CHECK(r.size() == 10);
  CHECK(r.to_string() == "b;rw;rf;b;rw;rwz;b;rfz;rwz;b");
}

TEST_CASE("baseline qor") {
  AigBuilder b;
  b.add_input();
  b.add_output(Lit::const1());
  CHECK(baseline_qor(std::move(b).build()).adp_proxy == 0.0);

  for (const auto& g : test_corpus()) {
    const auto first = baseline_qor(g);
    CHECK(first <= qor(g));
    CHECK(first.adp_proxy == qor(apply_recipe(g, baseline_recipe()).aig).adp_proxy);
    CHECK(baseline_qor(g) == first);
  }
}

TEST_CASE("reward") {
  const QorValue base{120.0};
  CHECK(reward(base, base) == 0.0);
  CHECK(reward({60.0}, base) == doctest::Approx(0.5));
  CHECK(reward({300.0}, base) == -1.0);
  CHECK(reward({0.0}, base) == 1.0);
  CHECK(reward({239.0}, base) == doctest::Approx(1.0 - 239.0 / 120.0));
  CHECK(reward({240.0}, base) == -1.0);
  CHECK(reward({5.0}, QorValue{0.0}) == 0.0);

  double previous = 2.0;
  for (double adp = 0.0; adp < 2 * base.adp_proxy; adp += 0.5) {
    const double r = reward({adp}, base);
    CHECK(r >= -1.0);
    CHECK(r <= 1.0);
    CHECK(r <= previous);
    previous = r;
  }
  for (double adp : {240.0, 241.0, 1e9}) CHECK(reward({adp}, base) == -1.0);
}
