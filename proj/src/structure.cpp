#include "lattri/structure.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>

namespace lattri {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

Midpoint sum_midpoint(Point a, Point b) { return {a.v + b.v, a.h + b.h}; }

/// Triangle list plus, for every slot, the indices of its incident triangles.
void index_triangles(const Triangulation& t, std::vector<Triangle>& tris,
                     std::vector<std::array<int, 2>>& slot_tris) {
  const GridSpec& g = t.grid();
  tris.clear();
  slot_tris.assign(static_cast<std::size_t>(g.slot_count()), {-1, -1});
  for (int s : t.midpoint_slots()) {
    const auto& slot = t.slot(s);
    for (Point a : {slot.left, slot.right}) {
      if (a == Triangulation::kNoApex) continue;
      const int i1 = g.index(sum_midpoint(slot.edge.p, a));
      const int i2 = g.index(sum_midpoint(slot.edge.q, a));
      if (!(s < i1 && s < i2)) continue;
      const int id = static_cast<int>(tris.size());
      tris.emplace_back(slot.edge.p, slot.edge.q, a);
      for (int k : {s, i1, i2}) {
        auto& pair = slot_tris[k];
        (pair[0] < 0 ? pair[0] : pair[1]) = id;
      }
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// B/G classification

int BTriangleDecomposition::b_count() const {
  return static_cast<int>(std::count(labels.begin(), labels.end(), TriangleLabel::B));
}

int BTriangleDecomposition::component_at(const GridSpec& grid, Midpoint x) const {
  for (int id : slot_triangles[grid.index(x)]) {
    if (id >= 0 && component[id] >= 0) return component[id];
  }
  return -1;
}

std::vector<Triangle> BTriangleDecomposition::s_x(const GridSpec& grid, Midpoint x) const {
  std::vector<Triangle> out;
  const int c = component_at(grid, x);
  if (c < 0) return out;
  for (int id : components[c]) out.push_back(triangles[id]);
  std::sort(out.begin(), out.end());
  return out;
}

BTriangleDecomposition classify(const Triangulation& t, const GroundState& gs) {
  BTriangleDecomposition d;
  index_triangles(t, d.triangles, d.slot_triangles);
  const GridSpec& g = t.grid();
  const int nt = static_cast<int>(d.triangles.size());
  d.labels.assign(nt, TriangleLabel::G);
  for (int i = 0; i < nt; ++i) {
    for (const Edge& e : d.triangles[i].edges()) {
      if (!gs.is_ground_slot(g.index(e.midpoint()), e.length())) d.labels[i] = TriangleLabel::B;
    }
  }
  UnionFind uf(nt);
  for (int s : t.midpoint_slots()) {
    const auto [a, b] = d.slot_triangles[s];
    if (a >= 0 && b >= 0 && d.labels[a] == TriangleLabel::B && d.labels[b] == TriangleLabel::B) uf.unite(a, b);
  }
  d.component.assign(nt, -1);
  std::map<int, int> root_to_comp;
  for (int i = 0; i < nt; ++i) {
    if (d.labels[i] != TriangleLabel::B) continue;
    auto [it, inserted] = root_to_comp.emplace(uf.find(i), static_cast<int>(d.components.size()));
    if (inserted) d.components.emplace_back();
    d.component[i] = it->second;
    d.components[it->second].push_back(i);
  }
  return d;
}

BTriangleDecomposition classify(const Triangulation& t, const ConstraintSet& c) {
  return classify(t, ground_state(c));
}

std::int64_t phi_x(const Triangulation& t, const BTriangleDecomposition& d, const GroundState& gs, Midpoint x) {
  const int comp = d.component_at(t.grid(), x);
  if (comp < 0) return 0;
  std::int64_t phi = 0;
  for (int s : t.midpoint_slots()) {
    const auto [a, b] = d.slot_triangles[s];
    if (a >= 0 && b >= 0 && d.component[a] == comp && d.component[b] == comp) {
      phi += t.edge_at_slot(s).length() - gs.min_length[s];
    }
  }
  return phi;
}

std::int64_t phi_x(const Triangulation& t, Midpoint x) {
  const GroundState gs = ground_state(t.constraints_ptr());
  return phi_x(t, classify(t, gs), gs, x);
}

// ---------------------------------------------------------------------------
// Regions

std::vector<Edge> InfluenceRegion::boundary() const {
  std::map<Edge, int> uses;
  for (const Triangle& t : triangles) {
    for (const Edge& e : t.edges()) ++uses[e];
  }
  std::vector<Edge> out;
  for (const auto& [e, k] : uses) {
    if (k == 1) out.push_back(e);
  }
  return out;
}

std::vector<Midpoint> InfluenceRegion::interior_midpoints() const {
  std::map<Edge, int> uses;
  for (const Triangle& t : triangles) {
    for (const Edge& e : t.edges()) ++uses[e];
  }
  std::vector<Midpoint> out;
  for (const auto& [e, k] : uses) {
    if (k == 2) out.push_back(e.midpoint());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::int64_t InfluenceRegion::doubled_area() const {
  std::int64_t a = 0;
  for (const Triangle& t : triangles) a += std::abs(t.doubled_area());
  return a;
}

bool InfluenceRegion::same_region(const InfluenceRegion& other) const {
  return doubled_area() == other.doubled_area() && boundary() == other.boundary();
}

bool InfluenceRegion::contains_thirds(std::int64_t v3, std::int64_t h3) const {
  const Point pt{static_cast<int>(v3), static_cast<int>(h3)};
  for (const Triangle& t : triangles) {
    const Point a{3 * t.vertices[0].v, 3 * t.vertices[0].h};
    const Point b{3 * t.vertices[1].v, 3 * t.vertices[1].h};
    const Point c{3 * t.vertices[2].v, 3 * t.vertices[2].h};
    const std::int64_t s = orient(a, b, c) > 0 ? 1 : -1;
    if (s * orient(a, b, pt) >= 0 && s * orient(b, c, pt) >= 0 && s * orient(c, a, pt) >= 0) return true;
  }
  return false;
}

bool interiors_intersect(const Triangle& a, const Triangle& b) {
  auto separated_by = [](const Triangle& t, const Triangle& other) {
    const auto& v = t.vertices;
    for (int i = 0; i < 3; ++i) {
      const Point p = v[i];
      const Point q = v[(i + 1) % 3];
      const std::int64_t s = orient(p, q, v[(i + 2) % 3]) > 0 ? 1 : -1;
      bool all_out = true;
      for (const Point& w : other.vertices) {
        if (s * orient(p, q, w) > 0) {
          all_out = false;
          break;
        }
      }
      if (all_out) return true;
    }
    return false;
  };
  return !separated_by(a, b) && !separated_by(b, a);
}

bool interior_meets_segment(const Triangle& t, const Edge& e) {
  for (const Edge& side : t.edges()) {
    if (side != e && edges_cross(side, e)) return true;
  }
  return false;
}

InfluenceRegion influence_region_branching(const Edge& e, const ConstraintSet& c, const GroundState& gs) {
  const GridSpec& g = c.grid();
  InfluenceRegion out;
  if (gs.is_ground(e.midpoint(), e)) return out;
  std::set<Triangle> tris;
  struct Branch {
    Edge side;
    Point opposite;  // third vertex of the triangle that added this side
  };
  std::vector<Branch> stack;
  const MinimalParallelogram mp = minimal_parallelogram(e);
  for (Point r : {mp.p3, mp.p4}) {
    tris.emplace(mp.p1, mp.p2, r);
    stack.push_back({Edge(mp.p1, r), mp.p2});
    stack.push_back({Edge(r, mp.p2), mp.p1});
  }
  while (!stack.empty()) {
    const Branch b = stack.back();
    stack.pop_back();
    if (gs.is_ground_slot(g.index(b.side.midpoint()), b.side.length())) continue;
    const MinimalParallelogram smp = minimal_parallelogram(b.side);
    const bool opp_left = orient(b.side.p, b.side.q, b.opposite) > 0;
    const bool p3_left = orient(b.side.p, b.side.q, smp.p3) > 0;
    const Point r = opp_left != p3_left ? smp.p3 : smp.p4;
    if (tris.emplace(b.side.p, b.side.q, r).second) {
      stack.push_back({Edge(b.side.p, r), b.side.q});
      stack.push_back({Edge(r, b.side.q), b.side.p});
    }
  }
  out.triangles.assign(tris.begin(), tris.end());
  return out;
}

InfluenceRegion influence_region_branching(const Edge& e, const ConstraintSet& c) {
  return influence_region_branching(e, c, ground_state(c));
}

InfluenceRegion influence_region_minimal(const Edge& e, const ConstraintSet& c, const GroundState& gs) {
  InfluenceRegion out;
  if (gs.is_ground(e.midpoint(), e)) return out;
  const Triangulation& t = gs.triangulation;
  const GridSpec& g = c.grid();
  std::vector<Triangle> tris;
  std::vector<std::array<int, 2>> slot_tris;
  index_triangles(t, tris, slot_tris);

  std::vector<std::uint8_t> tie_owned(tris.size(), 0);
  for (const Midpoint& x : gs.ties) {
    for (int id : slot_tris[g.index(x)]) {
      if (id >= 0) tie_owned[id] = 1;
    }
  }
  std::set<Triangle> chosen;
  for (std::size_t i = 0; i < tris.size(); ++i) {
    if (!tie_owned[i] && interior_meets_segment(tris[i], e)) chosen.insert(tris[i]);
  }
  for (const Midpoint& x : gs.ties) {
    std::vector<Triangle> as_is;
    for (int id : slot_tris[g.index(x)]) {
      if (id >= 0 && interior_meets_segment(tris[id], e)) as_is.push_back(tris[id]);
    }
    std::vector<Triangle> flipped;
    const int s = g.index(x);
    if (const auto target = t.flip_target(s)) {
      const Edge& cur = t.edge_at_slot(s);
      for (Point v : {cur.p, cur.q}) {
        const Triangle tri(target->p, target->q, v);
        if (interior_meets_segment(tri, e)) flipped.push_back(tri);
      }
    } else {
      flipped = as_is;
    }
    const auto& best = flipped.size() < as_is.size() ? flipped : as_is;
    chosen.insert(best.begin(), best.end());
  }
  out.triangles.assign(chosen.begin(), chosen.end());
  return out;
}

InfluenceRegion influence_region_minimal(const Edge& e, const ConstraintSet& c) {
  return influence_region_minimal(e, c, ground_state(c));
}

int distance_d(const std::vector<Midpoint>& A, const Edge& e, const ConstraintSet& c) {
  const InfluenceRegion region = influence_region_branching(e, c);
  if (region.empty()) return kInfiniteDistance;
  ConstraintSet with_e = c;
  with_e.add(e);
  const GroundState gsx = ground_state(with_e);
  std::vector<Triangle> tris;
  std::vector<std::array<int, 2>> slot_tris;
  index_triangles(gsx.triangulation, tris, slot_tris);

  const GridSpec& g = c.grid();
  std::vector<int> dist(tris.size(), -1);
  std::deque<int> queue;
  for (std::size_t i = 0; i < tris.size(); ++i) {
    const auto& v = tris[i].vertices;
    if (region.contains_thirds(v[0].v + v[1].v + v[2].v, v[0].h + v[1].h + v[2].h)) {
      dist[i] = 0;
      queue.push_back(static_cast<int>(i));
    }
  }
  std::vector<std::uint8_t> target(tris.size(), 0);
  for (const Midpoint& z : A) {
    for (int id : slot_tris[g.index(z)]) {
      if (id >= 0) target[id] = 1;
    }
  }
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    if (target[u]) return dist[u];
    for (const Edge& side : tris[u].edges()) {
      for (int w : slot_tris[g.index(side.midpoint())]) {
        if (w >= 0 && dist[w] < 0) {
          dist[w] = dist[u] + 1;
          queue.push_back(w);
        }
      }
    }
  }
  return kInfiniteDistance;
}

// ---------------------------------------------------------------------------
// Lattice paths

std::vector<int> LatticePath::heights() const {
  std::vector<int> h{0};
  for (int s : steps) h.push_back(h.back() + s);
  return h;
}

std::int64_t LatticePath::area() const {
  std::int64_t a = 0;
  for (int h : heights()) a += std::abs(h);
  return a;
}

bool LatticePath::non_negative() const {
  const auto h = heights();
  return std::all_of(h.begin(), h.end(), [](int x) { return x >= 0; });
}

LatticePath path_from_1d(const Triangulation& t) {
  if (t.grid().rows != 1) throw std::invalid_argument("lattice path correspondence needs a 1 x n grid");
  const int n = t.grid().cols;
  LatticePath path;
  int prev = 0;
  for (int k = 1; k <= 2 * n; ++k) {
    const Edge& e = t.edge({1, k});
    const int height = e.q.h - e.p.h;  // p is the bottom endpoint
    path.steps.push_back(height - prev);
    prev = height;
  }
  return path;
}

Triangulation path_to_1d(const LatticePath& path) {
  const int len = static_cast<int>(path.steps.size());
  if (len == 0 || len % 2 != 0) throw std::invalid_argument("lattice path must have positive even length");
  const int n = len / 2;
  const GridSpec grid(1, n);
  std::vector<Edge> edges;
  for (int j = 0; j < n; ++j) {
    edges.emplace_back(Point{0, j}, Point{0, j + 1});
    edges.emplace_back(Point{1, j}, Point{1, j + 1});
  }
  const auto h = path.heights();
  if (h.back() != 0) throw std::invalid_argument("lattice path must return to height 0");
  for (int k = 0; k <= 2 * n; ++k) {
    if (k > 0 && std::abs(path.steps[k - 1]) != 1) throw std::invalid_argument("lattice path steps must be +-1");
    const int top = (k + h[k]) / 2;
    const int bottom = (k - h[k]) / 2;
    if (top < 0 || top > n || bottom < 0 || bottom > n) {
      throw std::invalid_argument("lattice path leaves the 1 x n strip");
    }
    edges.emplace_back(Point{0, bottom}, Point{1, top});
  }
  return Triangulation::from_edges(ConstraintSet(grid), edges);
}

}  // namespace lattri
