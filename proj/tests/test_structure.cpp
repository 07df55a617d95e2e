#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <deque>
#include <map>
#include <set>

#include "lattri/structure.hpp"
#include "support.hpp"

using namespace lattri;
using namespace lattri::testing;

namespace {

Triangulation with_center(const GridSpec& g, const Edge& e) {
  ConstraintSet c(g);
  c.add(e);
  return Triangulation::from_edges(ConstraintSet(g), complete(c).edges());
}

bool is_ground_edge(const GroundState& gs, const Edge& e) { return gs.is_ground(e.midpoint(), e); }

/// Edges on exactly one triangle of the list.
std::vector<Edge> outer_edges(const std::vector<Triangle>& tris) {
  std::map<Edge, int> uses;
  for (const Triangle& t : tris)
    for (const Edge& e : t.edges()) ++uses[e];
  std::vector<Edge> out;
  for (const auto& [e, k] : uses)
    if (k == 1) out.push_back(e);
  return out;
}

/// A random edge consistent with c at a free midpoint, taken from a sampled state.
std::optional<Edge> random_free_edge(const ConstraintSet& c, std::mt19937_64& rng) {
  RunOptions ro;
  ro.steps = 300;
  const RunResult r = run(ground_state(c).triangulation, GibbsParams(1.5), rng(), ro);
  std::vector<Edge> free_edges;
  for (int slot : r.final_state.midpoint_slots()) {
    const Edge& e = r.final_state.edge_at_slot(slot);
    if (!r.final_state.is_fixed_slot(slot) && !c.contains(e.midpoint())) free_edges.push_back(e);
  }
  if (free_edges.empty()) return std::nullopt;
  return free_edges[std::uniform_int_distribution<std::size_t>(0, free_edges.size() - 1)(rng)];
}

/// Distance by BFS over a triangle graph built from all pairs sharing two vertices.
int naive_distance(const std::vector<Midpoint>& A, const Edge& e, const ConstraintSet& c) {
  const InfluenceRegion region = influence_region_minimal(e, c);
  if (region.empty()) return kInfiniteDistance;
  ConstraintSet with_e = c;
  with_e.add(e);
  const auto tris = ground_state(with_e).triangulation.triangles();
  const auto gsx = ground_state(with_e).triangulation;
  const std::size_t n = tris.size();
  auto shared = [&](const Triangle& a, const Triangle& b) {
    int k = 0;
    for (const Point& p : a.vertices)
      for (const Point& q : b.vertices) k += p == q;
    return k == 2;
  };
  std::vector<int> dist(n, -1);
  std::deque<std::size_t> q;
  for (std::size_t i = 0; i < n; ++i) {
    for (const Triangle& r : region.triangles) {
      if (interiors_intersect(tris[i], r)) {
        dist[i] = 0;
        q.push_back(i);
        break;
      }
    }
  }
  while (!q.empty()) {
    const std::size_t u = q.front();
    q.pop_front();
    for (std::size_t w = 0; w < n; ++w) {
      if (dist[w] < 0 && shared(tris[u], tris[w])) {
        dist[w] = dist[u] + 1;
        q.push_back(w);
      }
    }
  }
  int best = kInfiniteDistance;
  for (const Midpoint& z : A) {
    const Edge& target = gsx.edge(z);
    for (std::size_t i = 0; i < n; ++i) {
      const auto es = tris[i].edges();
      if (std::find(es.begin(), es.end(), target) != es.end() && dist[i] >= 0) best = std::min(best, dist[i]);
    }
  }
  return best;
}

}  // namespace

TEST_CASE("ground state has no B-triangles") {
  for (auto [m, n] : {std::pair{1, 1}, {2, 3}, {4, 4}}) {
    const ConstraintSet c{GridSpec(m, n)};
    const auto d = classify(ground_state(c).triangulation, c);
    CHECK(d.b_count() == 0);
    CHECK(d.components.empty());
    CHECK(d.triangles.size() == std::size_t(2 * m * n));
    for (const Midpoint& x : midpoints(GridSpec(m, n))) CHECK(phi_x(ground_state(c).triangulation, x) == 0);
  }
}

TEST_CASE("classify the long center edge of 1x2") {
  const GridSpec g(1, 2);
  const Triangulation t = with_center(g, Edge({0, 0}, {1, 2}));
  const auto d = classify(t, ConstraintSet(g));
  CHECK(d.b_count() == 2);
  REQUIRE(d.components.size() == 1);
  const auto s = d.s_x(g, Midpoint{1, 2});
  const std::vector<Triangle> expected{Triangle({0, 0}, {0, 1}, {1, 2}), Triangle({0, 0}, {1, 1}, {1, 2})};
  CHECK(std::set<Triangle>(s.begin(), s.end()) == std::set<Triangle>(expected.begin(), expected.end()));
  CHECK(d.component_at(g, Midpoint{1, 1}) == 0);
  CHECK(d.component_at(g, Midpoint{0, 3}) == -1);
  CHECK(d.s_x(g, Midpoint{0, 3}).empty());
  CHECK(phi_x(t, Midpoint{1, 2}) == 2);
  CHECK(phi_x(t, Midpoint{0, 3}) == 0);
}

TEST_CASE("labels, components and phi on random states") {
  std::mt19937_64 rng(71);
  for (int i = 0; i < 40; ++i) {
    const GridSpec g(2 + i % 3, 3 + i % 2);
    auto c = i % 2 ? random_constraints(g, rng, 0.15) : std::make_shared<const ConstraintSet>(g);
    const GroundState gs = ground_state(*c);
    RunOptions ro;
    ro.steps = 2000;
    const Triangulation t = run(gs.triangulation, GibbsParams(1.2), rng(), ro).final_state;
    const auto d = classify(t, gs);
    for (std::size_t k = 0; k < d.triangles.size(); ++k) {
      bool all_ground = true;
      for (const Edge& e : d.triangles[k].edges()) all_ground &= is_ground_edge(gs, e);
      CHECK((d.labels[k] == TriangleLabel::G) == all_ground);
      CHECK((d.component[k] < 0) == all_ground);
    }
    for (const auto& comp : d.components) {
      std::vector<Triangle> tris;
      for (int k : comp) tris.push_back(d.triangles[k]);
      for (const Edge& e : outer_edges(tris)) CHECK(is_ground_edge(gs, e));
    }
    for (const Midpoint& x : midpoints(g)) {
      const std::int64_t phi = phi_x(t, d, gs, x);
      CHECK(phi >= 0);
      CHECK((phi == 0) == d.s_x(g, x).empty());
    }
  }
}

TEST_CASE("phi is at least the excess length at x") {
  const ConstraintSet c{GridSpec(2, 2)};
  const GroundState gs = ground_state(c);
  const StateSpace s = enumerate_triangulations(c);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Triangulation t = s.triangulation(i);
    const auto d = classify(t, gs);
    for (const Midpoint& x : midpoints(c.grid())) {
      const int k = t.edge(x).length() - gs.min_length[c.grid().index(x)];
      CHECK(phi_x(t, d, gs, x) >= k);
    }
  }
}

TEST_CASE("influence region examples") {
  const GridSpec g(1, 2);
  const ConstraintSet c(g);
  CHECK(influence_region_branching(Edge({0, 1}, {1, 1}), c).empty());
  CHECK(influence_region_minimal(Edge({0, 1}, {1, 1}), c).empty());
  CHECK(influence_region_minimal(Edge({0, 0}, {1, 1}), c).empty());  // either unit diagonal is ground
  const Edge e({0, 0}, {1, 2});
  const auto b = influence_region_branching(e, c);
  const auto m = influence_region_minimal(e, c);
  CHECK(b.triangles ==
        std::vector<Triangle>{Triangle({0, 0}, {0, 1}, {1, 2}), Triangle({0, 0}, {1, 1}, {1, 2})});
  CHECK(b.doubled_area() == 2);
  CHECK(b.same_region(m));
  CHECK(b.interior_midpoints() == std::vector<Midpoint>{Midpoint{1, 2}});

  const GridSpec big(8, 8);
  const Edge steep({0, 5}, {3, 0});
  const auto bb = influence_region_branching(steep, ConstraintSet(big));
  const auto mm = influence_region_minimal(steep, ConstraintSet(big));
  CHECK(bb.same_region(mm));
  CHECK(bb.doubled_area() > 2);
}

TEST_CASE("branching and minimal influence regions agree") {
  std::mt19937_64 rng(81);
  int compared = 0, nonempty = 0;
  for (int i = 0; i < 150; ++i) {
    const GridSpec g(1 + i % 4, 1 + (i / 4) % 4);
    auto c = i % 3 ? random_constraints(g, rng, 0.15) : std::make_shared<const ConstraintSet>(g);
    const auto e = random_free_edge(*c, rng);
    if (!e) continue;
    const GroundState gs = ground_state(*c);
    const auto b = influence_region_branching(*e, *c, gs);
    const auto m = influence_region_minimal(*e, *c, gs);
    ++compared;
    if (!b.same_region(m)) FAIL("regions differ for " << *e << " on " << g.rows << "x" << g.cols);
    CHECK(b.empty() == is_ground_edge(gs, *e));
    if (b.empty()) continue;
    ++nonempty;
    for (const Edge& side : b.boundary()) CHECK(is_ground_edge(gs, side));
    for (const Triangle& t : b.triangles) {
      bool has_excess = false;
      for (const Edge& side : t.edges()) has_excess |= !is_ground_edge(gs, side);
      CHECK(has_excess);
    }
    // the segment lies in the region
    const Point d = e->delta();
    for (int k = 1; k <= 2; ++k)
      CHECK(b.contains_thirds(3 * e->p.v + k * d.v, 3 * e->p.h + k * d.h));
  }
  CHECK(compared >= 100);
  CHECK(nonempty >= 30);
}

TEST_CASE("distance examples") {
  const GridSpec g(1, 2);
  const ConstraintSet c(g);
  CHECK(distance_d({Midpoint{1, 1}}, Edge({0, 1}, {1, 1}), c) == kInfiniteDistance);
  const Edge e({0, 0}, {1, 2});
  CHECK(distance_d({Midpoint{1, 2}}, e, c) == 0);
  CHECK(distance_d({Midpoint{1, 1}}, e, c) == 0);
  CHECK(distance_d({Midpoint{1, 0}}, e, c) == 1);
}

TEST_CASE("distance agrees with a naive triangle graph") {
  const GridSpec g(5, 5);
  const ConstraintSet c(g);
  const Edge center({1, 1}, {4, 3});
  REQUIRE(center.is_primitive());
  for (const Midpoint& corner : {Midpoint{0, 1}, Midpoint{1, 0}, Midpoint{9, 10}, Midpoint{1, 1}}) {
    CHECK(distance_d({corner}, center, c) == naive_distance({corner}, center, c));
  }
  CHECK(distance_d({Midpoint{0, 1}}, center, c) > 0);
  std::mt19937_64 rng(91);
  for (int i = 0; i < 30; ++i) {
    auto rc = random_constraints(GridSpec(4, 4), rng, 0.1);
    const auto e = random_free_edge(*rc, rng);
    if (!e) continue;
    std::vector<Midpoint> A;
    const auto all = midpoints(GridSpec(4, 4));
    for (int k = 0; k < 2; ++k) A.push_back(all[std::uniform_int_distribution<std::size_t>(0, all.size() - 1)(rng)]);
    CHECK(distance_d(A, *e, *rc) == naive_distance(A, *e, *rc));
  }
}

TEST_CASE("lattice path bijection") {
  for (int n = 1; n <= 6; ++n) {
    const StateSpace s = enumerate_triangulations(ConstraintSet(GridSpec(1, n)));
    std::set<std::vector<int>> paths;
    std::int64_t max_area = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const Triangulation t = s.triangulation(i);
      const LatticePath p = path_from_1d(t);
      CHECK(p.steps.size() == std::size_t(2 * n));
      CHECK(p.heights().back() == 0);
      CHECK(path_to_1d(p) == t);
      paths.insert(p.steps);
      if (p.non_negative()) {
        std::int64_t horizontal = 0;
        for (const Edge& e : t.edges())
          if (e.p.v != e.q.v) horizontal += std::abs(e.q.h - e.p.h);
        CHECK(p.area() == horizontal);
        max_area = std::max(max_area, p.area());
      }
    }
    CHECK(paths.size() == s.size());
    CHECK(max_area == std::int64_t(n) * n);

    const LatticePath zig = path_from_1d(ground_state(ConstraintSet(GridSpec(1, n))).triangulation);
    for (std::size_t k = 0; k < zig.steps.size(); ++k) CHECK(zig.steps[k] == (k % 2 == 0 ? 1 : -1) * zig.steps[0]);
    CHECK(zig.area() == n);
  }
  CHECK_THROWS_AS(path_from_1d(ground_state(ConstraintSet(GridSpec(2, 2))).triangulation), std::invalid_argument);
  CHECK_THROWS_AS(path_to_1d(LatticePath{{1, 1, -1}}), std::invalid_argument);
  CHECK_THROWS_AS(path_to_1d(LatticePath{{1, 1, 1, -1}}), std::invalid_argument);
}
