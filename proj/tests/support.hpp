#ifndef LATTRI_TESTS_SUPPORT_HPP
#define LATTRI_TESTS_SUPPORT_HPP

#include <algorithm>
#include <random>

#include "lattri/glauber.hpp"

namespace lattri::testing {

/// A random non-crossing constraint set: edges of a uniformly scrambled
/// triangulation, each interior one kept with probability keep.
inline std::shared_ptr<const ConstraintSet> random_constraints(GridSpec g, std::mt19937_64& rng, double keep = 0.3,
                                                              std::uint64_t scramble = 400) {
  RunOptions ro;
  ro.steps = scramble;
  const RunResult r = run(ground_state(ConstraintSet(g)).triangulation, GibbsParams(1.3), rng(), ro);
  auto c = std::make_shared<ConstraintSet>(g);
  std::bernoulli_distribution coin(keep);
  for (int slot : r.final_state.midpoint_slots()) {
    if (r.final_state.is_fixed_slot(slot)) continue;
    if (coin(rng)) c->add(r.final_state.edge_at_slot(slot));
  }
  return c;
}

/// A random state of an enumerated space.
inline std::size_t random_state(const StateSpace& s, std::mt19937_64& rng) {
  return std::uniform_int_distribution<std::size_t>(0, s.size() - 1)(rng);
}

inline std::int64_t min_total_length(const StateSpace& s) {
  std::int64_t best = s.total_length(0);
  for (std::size_t i = 1; i < s.size(); ++i) best = std::min(best, s.total_length(i));
  return best;
}

/// Every primitive non-axis edge with both endpoints in the box [0,m] x [0,n].
inline std::vector<Edge> primitive_edges(int m, int n, int max_len = 1 << 30) {
  std::vector<Edge> out;
  for (int v1 = 0; v1 <= m; ++v1)
    for (int h1 = 0; h1 <= n; ++h1)
      for (int v2 = v1; v2 <= m; ++v2)
        for (int h2 = 0; h2 <= n; ++h2) {
          if (v2 == v1 || h2 == h1) continue;
          const Edge e({v1, h1}, {v2, h2});
          if (e.is_primitive() && e.length() <= max_len) out.push_back(e);
        }
  return out;
}

}  // namespace lattri::testing

#endif  // LATTRI_TESTS_SUPPORT_HPP
