#include "lattri/geometry.hpp"

#include <algorithm>

namespace lattri {

std::ostream& operator<<(std::ostream& os, const Point& p) {
  return os << '(' << p.v << ',' << p.h << ')';
}

std::ostream& operator<<(std::ostream& os, const Midpoint& x) {
  return os << '[' << x.dv << '/' << 2 << ',' << x.dh << '/' << 2 << ']';
}

std::ostream& operator<<(std::ostream& os, const Edge& e) { return os << e.p << '-' << e.q; }

GridSpec::GridSpec(int m, int n) : rows(m), cols(n) {
  if (m < 1 || n < 1) throw GeometryError("grid dimensions must be positive");
  if (m > kMaxGridSide || n > kMaxGridSide) throw GeometryError("grid dimension exceeds 2^14");
}

bool GridSpec::contains(Midpoint x) const {
  if (x.dv < 0 || x.dv > 2 * rows || x.dh < 0 || x.dh > 2 * cols) return false;
  return (x.dv % 2 != 0) || (x.dh % 2 != 0);
}

MidpointKind GridSpec::kind(Midpoint x) const {
  if (x.dv == 0 || x.dv == 2 * rows || x.dh == 0 || x.dh == 2 * cols) return MidpointKind::Boundary;
  if (x.dv % 2 != 0 && x.dh % 2 != 0) return MidpointKind::Type2;
  return MidpointKind::Type1;
}

bool Edge::is_primitive() const {
  if (p == q) return false;
  return std::gcd(std::abs(q.v - p.v), std::abs(q.h - p.h)) == 1;
}

Slope slope(const Edge& e) {
  const Point d = e.delta();
  const int g = std::gcd(std::abs(d.v), std::abs(d.h));
  if (g == 0) throw GeometryError("degenerate edge has no slope");
  return {d.v / g, d.h / g};
}

std::vector<Midpoint> midpoints(const GridSpec& grid) {
  std::vector<Midpoint> out;
  out.reserve(static_cast<std::size_t>(grid.edge_count()));
  for (int dv = 0; dv <= 2 * grid.rows; ++dv) {
    for (int dh = 0; dh <= 2 * grid.cols; ++dh) {
      if (dv % 2 == 0 && dh % 2 == 0) continue;
      out.push_back({dv, dh});
    }
  }
  return out;
}

std::optional<Edge> edge_at(const GridSpec& grid, Midpoint x, Point p) {
  const Point q{x.dv - p.v, x.dh - p.h};
  if (!grid.contains(p) || !grid.contains(q) || p == q) return std::nullopt;
  Edge e(p, q);
  if (!e.is_primitive()) return std::nullopt;
  return e;
}

namespace {

int sign(std::int64_t x) { return (x > 0) - (x < 0); }

bool collinear_overlap(const Edge& a, const Edge& b) {
  // Project on the axis with the larger extent; interiors overlap iff the
  // projected intervals share more than a point.
  const bool use_h = std::abs(a.q.h - a.p.h) >= std::abs(a.q.v - a.p.v);
  auto coord = [use_h](Point p) { return use_h ? p.h : p.v; };
  const int a0 = std::min(coord(a.p), coord(a.q));
  const int a1 = std::max(coord(a.p), coord(a.q));
  const int b0 = std::min(coord(b.p), coord(b.q));
  const int b1 = std::max(coord(b.p), coord(b.q));
  return std::min(a1, b1) > std::max(a0, b0);
}

}  // namespace

bool edges_cross(const Edge& e1, const Edge& e2) {
  if (e1 == e2) return false;
  const int o1 = sign(orient(e1.p, e1.q, e2.p));
  const int o2 = sign(orient(e1.p, e1.q, e2.q));
  const int o3 = sign(orient(e2.p, e2.q, e1.p));
  const int o4 = sign(orient(e2.p, e2.q, e1.q));
  if (o1 == 0 && o2 == 0 && o3 == 0 && o4 == 0) return collinear_overlap(e1, e2);
  return o1 * o2 < 0 && o3 * o4 < 0;
}

std::pair<Point, Point> closest_points(const Edge& e) {
  if (e.is_axis()) throw GeometryError("closest points are undefined for horizontal or vertical edges");
  const Point d = e.delta();  // d.v > 0 for canonical non-axis edges
  const int h_lo = std::min(0, d.h);
  const int h_hi = std::max(0, d.h);
  // Offset r from e.p with cross(d, r) = -1, i.e. on the right at unit area.
  for (int rv = 0; rv <= d.v; ++rv) {
    const std::int64_t num = static_cast<std::int64_t>(d.h) * rv + 1;
    if (num % d.v != 0) continue;
    const auto rh = static_cast<int>(num / d.v);
    if (rh < h_lo || rh > h_hi) continue;
    const Point p3 = e.p + Point{rv, rh};
    const Point p4 = Point{e.p.v + e.q.v, e.p.h + e.q.h} - p3;
    return {p3, p4};
  }
  throw GeometryError("no closest lattice point found; edge is not primitive");
}

MinimalParallelogram minimal_parallelogram(const Edge& e) {
  const auto [p3, p4] = closest_points(e);
  return {e.q, e.p, p3, p4};
}

bool excluded_region_contains(const Edge& e, Point pt) {
  const MinimalParallelogram mp = minimal_parallelogram(e);
  const Point u = mp.p4 - mp.p1;  // lines p1p4 and p3p2
  const Point w = mp.p1 - mp.p3;  // lines p3p1 and p2p4
  const std::int64_t s1 = cross(u, pt - mp.p1);
  const std::int64_t s2 = cross(u, pt - mp.p3);
  const std::int64_t t1 = cross(w, pt - mp.p2);
  const std::int64_t t2 = cross(w, pt - mp.p3);
  return sign(s1) * sign(s2) < 0 || sign(t1) * sign(t2) < 0;
}

Orientation orientation(const Edge& e) {
  const Point d = e.delta();
  if (d.v == 0 || d.h == 0) return Orientation::None;
  return d.h > 0 ? Orientation::Positive : Orientation::Negative;
}

}  // namespace lattri
