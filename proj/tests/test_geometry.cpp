#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <gmpxx.h>

#include <set>

#include "lattri/geometry.hpp"
#include "support.hpp"

using namespace lattri;
using lattri::testing::primitive_edges;

namespace {

int count_kind(const GridSpec& g, MidpointKind k) {
  int n = 0;
  for (const Midpoint& x : midpoints(g)) n += g.kind(x) == k;
  return n;
}

/// Lattice points within the bounding box of e at unit area from it, by scan.
std::pair<Point, Point> brute_closest(const Edge& e) {
  std::optional<Point> right, left;
  const Point d = e.delta();
  for (int v = std::min(e.p.v, e.q.v); v <= std::max(e.p.v, e.q.v); ++v) {
    for (int h = std::min(e.p.h, e.q.h); h <= std::max(e.p.h, e.q.h); ++h) {
      const std::int64_t c = cross(d, Point{v, h} - e.p);
      if (c == -1) {
        REQUIRE_FALSE(right.has_value());
        right = Point{v, h};
      } else if (c == 1) {
        REQUIRE_FALSE(left.has_value());
        left = Point{v, h};
      }
    }
  }
  REQUIRE(right.has_value());
  REQUIRE(left.has_value());
  return {*right, *left};
}

}  // namespace

TEST_CASE("midpoint counts") {
  const GridSpec g11(1, 1);
  CHECK(midpoints(g11).size() == 5);
  CHECK(count_kind(g11, MidpointKind::Boundary) == 4);
  CHECK(count_kind(g11, MidpointKind::Type2) == 1);
  CHECK(g11.kind(Midpoint{1, 1}) == MidpointKind::Type2);
  CHECK(midpoints(GridSpec(5, 7)).size() == 117);
  for (int m = 1; m <= 6; ++m)
    for (int n = 1; n <= 6; ++n) CHECK(midpoints(GridSpec(m, n)).size() == std::size_t(3 * m * n + m + n));
}

TEST_CASE("midpoints exclude lattice points and classify") {
  const GridSpec g(3, 4);
  for (const Midpoint& x : midpoints(g)) {
    CHECK((x.dv % 2 != 0 || x.dh % 2 != 0));
    if (g.kind(x) == MidpointKind::Type1) CHECK(((x.dv % 2) ^ (x.dh % 2)) == 1);
    if (g.kind(x) == MidpointKind::Type2) CHECK((x.dv % 2 == 1 && x.dh % 2 == 1));
  }
  CHECK_THROWS_AS(GridSpec(0, 3), GeometryError);
}

TEST_CASE("edge_at reflects through the midpoint") {
  const GridSpec g(1, 2);
  auto e = edge_at(g, Midpoint{1, 1}, Point{0, 0});
  REQUIRE(e);
  CHECK(*e == Edge({0, 0}, {1, 1}));
  e = edge_at(g, Midpoint{1, 2}, Point{0, 0});
  REQUIRE(e);
  CHECK(*e == Edge({0, 0}, {1, 2}));
  CHECK(e->length() == 3);
  e = edge_at(g, Midpoint{1, 2}, Point{0, 2});
  REQUIRE(e);
  CHECK(*e == Edge({0, 2}, {1, 0}));
  CHECK(e->length() == 3);
  CHECK_FALSE(edge_at(g, Midpoint{1, 1}, Point{1, 2}));     // reflection (0,-1) leaves the grid
  CHECK_FALSE(edge_at(GridSpec(2, 2), Midpoint{2, 2}, Point{0, 0}));  // (0,0)-(2,2) is not primitive
}

TEST_CASE("edges_cross examples") {
  CHECK(edges_cross(Edge({0, 0}, {1, 1}), Edge({0, 1}, {1, 0})));
  CHECK_FALSE(edges_cross(Edge({0, 0}, {1, 1}), Edge({0, 0}, {1, 2})));
  CHECK(edges_cross(Edge({0, 0}, {1, 2}), Edge({0, 2}, {1, 1})));
  CHECK_FALSE(edges_cross(Edge({0, 0}, {0, 1}), Edge({0, 1}, {0, 2})));  // collinear, touching
}

TEST_CASE("edges_cross is symmetric and irreflexive") {
  const auto edges = primitive_edges(3, 3);
  for (const Edge& a : edges) {
    CHECK_FALSE(edges_cross(a, a));
    for (const Edge& b : edges) {
      if (edges_cross(a, b) != edges_cross(b, a)) FAIL("asymmetric crossing for " << a << " and " << b);
    }
  }
}

TEST_CASE("closest points examples") {
  CHECK(closest_points(Edge({0, 0}, {1, 1})) == std::pair<Point, Point>{{0, 1}, {1, 0}});
  CHECK(closest_points(Edge({0, 0}, {1, 2})) == std::pair<Point, Point>{{0, 1}, {1, 1}});
  const Edge e({0, 0}, {2, 3});
  CHECK(closest_points(e) == brute_closest(e));
  CHECK_THROWS_AS(closest_points(Edge({0, 0}, {0, 1})), GeometryError);
  CHECK_THROWS_AS(closest_points(Edge({0, 0}, {1, 0})), GeometryError);
}

TEST_CASE("closest points sit at offsets 1/a and 1/b") {
  for (const Edge& e : primitive_edges(12, 12, 12)) {
    if (e.length() < 2) continue;
    const auto [p3, p4] = closest_points(e);
    REQUIRE(std::make_pair(p3, p4) == brute_closest(e));
    CHECK(p3 + p4 == e.p + e.q);
    const Slope s = slope(e);
    for (const Point& p : {p3, p4}) {
      // horizontal and vertical distance from p to the supporting line of e
      const mpq_class area(static_cast<long>(std::abs(cross(e.delta(), p - e.p))));
      CHECK(area / std::abs(s.a) == mpq_class(1, std::abs(s.a)));
      CHECK(area / std::abs(s.b) == mpq_class(1, std::abs(s.b)));
    }
  }
}

TEST_CASE("negative slopes mirror positive ones") {
  const int n = 9;
  for (const Edge& e : primitive_edges(n, n, 12)) {
    auto mirror = [n](Point p) { return Point{p.v, n - p.h}; };
    const Edge r(mirror(e.p), mirror(e.q));
    const auto [p3, p4] = closest_points(e);
    const auto [r3, r4] = closest_points(r);
    // mirroring swaps the sides of the edge
    CHECK(std::minmax(mirror(p3), mirror(p4)) == std::minmax(r3, r4));
  }
}

TEST_CASE("minimal parallelogram") {
  auto mp = minimal_parallelogram(Edge({0, 0}, {1, 2}));
  CHECK(mp.short_diagonal() == Edge({0, 1}, {1, 1}));
  CHECK(mp.short_diagonal().length() == 1);
  CHECK(mp.long_diagonal() == Edge({0, 0}, {1, 2}));
  mp = minimal_parallelogram(Edge({0, 0}, {1, 1}));
  CHECK(mp.short_diagonal() == Edge({0, 1}, {1, 0}));
  CHECK(mp.short_diagonal().length() == 2);
  const Edge e({0, 0}, {2, 3});
  mp = minimal_parallelogram(e);
  const auto [b3, b4] = brute_closest(e);
  CHECK(mp.short_diagonal() == Edge(b3, b4));
  CHECK(mp.short_diagonal().length() < 5);
  for (const Edge& f : primitive_edges(6, 6)) {
    const auto q = minimal_parallelogram(f);
    CHECK(q.p3 + q.p4 == f.p + f.q);
    if (!f.is_unit_diagonal()) CHECK(q.short_diagonal().length() < f.length());
  }
}

TEST_CASE("excluded region examples") {
  CHECK_FALSE(excluded_region_contains(Edge({0, 0}, {1, 2}), Point{0, 1}));
  CHECK_FALSE(excluded_region_contains(Edge({0, 0}, {1, 2}), Point{1, 1}));
  const Edge e({0, 0}, {2, 3});
  for (int v = -4; v <= 6; ++v)
    for (int h = -4; h <= 7; ++h) CHECK_FALSE(excluded_region_contains(e, Point{v, h}));
}

TEST_CASE("no lattice point lies in an excluded region") {
  for (const Edge& e : primitive_edges(6, 6)) {
    for (int v = 0; v <= 6; ++v)
      for (int h = 0; h <= 6; ++h) {
        if (excluded_region_contains(e, Point{v, h})) FAIL(e << " excludes " << Point{v, h});
      }
  }
}

TEST_CASE("parallel lines of slope (a,b) cover the lattice") {
  // Lines parallel to e through lattice points sit at horizontal offsets k/a
  // from e; every integer k is hit. A box of radius 25 holds a full period
  // of each line with |k| <= 12.
  for (const Edge& e : primitive_edges(12, 12, 12)) {
    const Slope s = slope(e);
    std::set<std::int64_t> indices;
    for (int v = -25; v <= 25; ++v)
      for (int h = -25; h <= 25; ++h) {
        const std::int64_t k = cross(e.delta(), Point{v, h});
        const mpq_class offset(static_cast<long>(k), std::abs(s.a));
        CHECK(mpq_class(offset * std::abs(s.a)).get_den() == 1);
        indices.insert(k);
      }
    for (std::int64_t k = -12; k <= 12; ++k) CHECK(indices.count(k) == 1);
  }
}

TEST_CASE("orientation") {
  CHECK(orientation(Edge({0, 0}, {1, 1})) == Orientation::Positive);
  CHECK(orientation(Edge({1, 0}, {0, 1})) == Orientation::Negative);
  CHECK(orientation(Edge({0, 0}, {0, 1})) == Orientation::None);
  CHECK(orientation(Edge({0, 0}, {1, 0})) == Orientation::None);
}

TEST_CASE("slope is reduced") {
  CHECK(slope(Edge({0, 0}, {2, 3})) == Slope{2, 3});
  CHECK(slope(Edge({0, 3}, {2, 0})) == Slope{2, -3});
}
