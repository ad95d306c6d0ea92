#include <algorithm>
#include <queue>
#include <tuple>

#include "lsopt/transforms.hpp"

namespace lsopt {

namespace {

class Balancer {
public:
  explicit Balancer(const Aig& aig)
      : aig_(aig), fanouts_(compute_fanouts(aig)), map_(aig.num_nodes()), done_(aig.num_nodes(), 0) {
    builder_ = AigBuilder(aig.name());
    map_[0] = Lit::const0();
    done_[0] = 1;
    for (std::size_t i = 0; i < aig.num_inputs(); ++i) {
      map_[i + 1] = builder_.add_input();
      done_[i + 1] = 1;
    }
  }

  Aig run() && {
    for (auto out : aig_.outputs()) builder_.add_output(translate(out));
    return cleanup(std::move(builder_).build());
  }

private:
  Lit translate(Lit f) { return node(f.node()) ^ f.complemented(); }

  Lit node(std::uint32_t n) {
    if (done_[n]) return map_[n];
    std::vector<Lit> leaves;
    collect(Lit::make(n), leaves, true);
    std::sort(leaves.begin(), leaves.end());
    leaves.erase(std::unique(leaves.begin(), leaves.end()), leaves.end());

    std::vector<Lit> operands;
    bool zero = false;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      if (i + 1 < leaves.size() && leaves[i + 1] == !leaves[i]) zero = true;
      operands.push_back(translate(leaves[i]));
    }
    Lit result = zero ? Lit::const0() : combine(operands);
    map_[n] = result;
    done_[n] = 1;
    return result;
  }

  // Gathers the leaves of the maximal and-tree rooted at f.
  void collect(Lit f, std::vector<Lit>& leaves, bool root) {
    const auto n = f.node();
    const bool expand = aig_.is_and(n) && (root || (!f.complemented() && fanouts_[n] == 1));
    if (!expand) {
      leaves.push_back(f);
      return;
    }
    collect(aig_.fanin0(n), leaves, false);
    collect(aig_.fanin1(n), leaves, false);
  }

  Lit combine(const std::vector<Lit>& operands) {
    using Entry = std::tuple<std::uint32_t, std::uint32_t>;  // level, literal
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    for (auto op : operands) heap.emplace(builder_.level(op), op.raw());
    while (heap.size() > 1) {
      const Lit a(std::get<1>(heap.top()));
      heap.pop();
      const Lit b(std::get<1>(heap.top()));
      heap.pop();
      const Lit r = builder_.add_and(a, b);
      heap.emplace(builder_.level(r), r.raw());
    }
    return Lit(std::get<1>(heap.top()));
  }

  const Aig& aig_;
  std::vector<std::uint32_t> fanouts_;
  std::vector<Lit> map_;
  std::vector<char> done_;
  AigBuilder builder_;
};

}  // namespace

Aig balance(const Aig& aig) { return Balancer(aig).run(); }

}  // namespace lsopt
