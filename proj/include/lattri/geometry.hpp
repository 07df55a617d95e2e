#ifndef LATTRI_GEOMETRY_HPP
#define LATTRI_GEOMETRY_HPP

// Exact integer geometry on the lattice {0..m} x {0..n}.
//
// Coordinates follow the (vertical, horizontal) convention: a point (v, h)
// sits at height v and horizontal position h. Midpoints of edges are kept in
// doubled coordinates so that all arithmetic stays in integers.

#include <compare>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace lattri {

/// Largest supported grid side. Keeps every cross product well inside int64.
inline constexpr int kMaxGridSide = 1 << 14;

struct Point {
  int v = 0;
  int h = 0;

  friend constexpr auto operator<=>(const Point&, const Point&) = default;
  friend constexpr Point operator+(Point a, Point b) { return {a.v + b.v, a.h + b.h}; }
  friend constexpr Point operator-(Point a, Point b) { return {a.v - b.v, a.h - b.h}; }
};

std::ostream& operator<<(std::ostream& os, const Point& p);

/// Twice the signed area of (o, a, b); positive when b is counter-clockwise of a
/// as seen from o, with v as the vertical axis.
constexpr std::int64_t cross(Point a, Point b) {
  return static_cast<std::int64_t>(a.h) * b.v - static_cast<std::int64_t>(a.v) * b.h;
}
constexpr std::int64_t orient(Point o, Point a, Point b) { return cross(a - o, b - o); }

enum class MidpointKind { Type1, Type2, Boundary };

/// Half-integer lattice point stored as (2v, 2h).
struct Midpoint {
  int dv = 0;
  int dh = 0;

  friend constexpr auto operator<=>(const Midpoint&, const Midpoint&) = default;
};

std::ostream& operator<<(std::ostream& os, const Midpoint& x);

struct GridSpec {
  int rows = 1;  // m, vertical extent
  int cols = 1;  // n, horizontal extent

  GridSpec() = default;
  GridSpec(int m, int n);

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

  bool contains(Point p) const { return p.v >= 0 && p.v <= rows && p.h >= 0 && p.h <= cols; }
  bool contains(Midpoint x) const;

  /// 3mn + m + n: edges of every triangulation, i.e. midpoints of the grid.
  int edge_count() const { return 3 * rows * cols + rows + cols; }
  int triangle_count() const { return 2 * rows * cols; }

  /// Dense index over the doubled-coordinate box; lattice points are unused slots.
  int slot_count() const { return (2 * rows + 1) * (2 * cols + 1); }
  int index(Midpoint x) const { return x.dv * (2 * cols + 1) + x.dh; }
  Midpoint midpoint_at(int slot) const { return {slot / (2 * cols + 1), slot % (2 * cols + 1)}; }

  MidpointKind kind(Midpoint x) const;
};

/// Primitive lattice segment with endpoints in lexicographic order (p < q).
struct Edge {
  Point p;
  Point q;

  Edge() = default;
  Edge(Point a, Point b) : p(a < b ? a : b), q(a < b ? b : a) {}

  friend constexpr auto operator<=>(const Edge&, const Edge&) = default;

  Midpoint midpoint() const { return {p.v + q.v, p.h + q.h}; }
  Point delta() const { return q - p; }
  /// l1 length.
  int length() const { return std::abs(q.v - p.v) + std::abs(q.h - p.h); }
  bool is_axis() const { return p.v == q.v || p.h == q.h; }
  bool is_unit_diagonal() const { return std::abs(q.v - p.v) == 1 && std::abs(q.h - p.h) == 1; }
  bool is_primitive() const;
};

std::ostream& operator<<(std::ostream& os, const Edge& e);

/// Reduced direction (a, b) = (rise, run) of an edge.
struct Slope {
  int a = 0;
  int b = 0;
  friend constexpr auto operator<=>(const Slope&, const Slope&) = default;
};

Slope slope(const Edge& e);

/// Parallelogram p1 p3 p2 p4 whose long diagonal p1p2 is the given edge (p1 the
/// upper endpoint) and whose short diagonal p3p4 shares its midpoint. p3 lies to
/// the right of the edge.
struct MinimalParallelogram {
  Point p1, p2;
  Point p3, p4;

  Edge long_diagonal() const { return Edge(p1, p2); }
  Edge short_diagonal() const { return Edge(p3, p4); }
  /// The two sides through p3 (the triangle p1 p2 p3) and through p4.
  std::pair<Edge, Edge> sides_at_p3() const { return {Edge(p1, p3), Edge(p3, p2)}; }
  std::pair<Edge, Edge> sides_at_p4() const { return {Edge(p1, p4), Edge(p4, p2)}; }
};

enum class Orientation { Positive, Negative, None };

class GeometryError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// All midpoints of the grid, row-major in doubled coordinates.
std::vector<Midpoint> midpoints(const GridSpec& grid);

/// Edge with midpoint x and endpoint p, if the reflected endpoint 2x - p is in the
/// grid and the segment is primitive.
std::optional<Edge> edge_at(const GridSpec& grid, Midpoint x, Point p);

/// True iff the open segments intersect. Shared endpoints do not count.
bool edges_cross(const Edge& e1, const Edge& e2);

/// The closest lattice points on either side of a non-axis edge, inside its
/// bounding box. first is to the right of the edge (clockwise of p -> q).
/// Throws GeometryError for axis edges.
std::pair<Point, Point> closest_points(const Edge& e);

/// Throws GeometryError for axis edges. For unit diagonals the two diagonals
/// have equal length.
MinimalParallelogram minimal_parallelogram(const Edge& e);

/// True iff p lies strictly inside one of the two strips bounded by opposite
/// sides of the minimal parallelogram of e.
bool excluded_region_contains(const Edge& e, Point p);

Orientation orientation(const Edge& e);

}  // namespace lattri

#endif  // LATTRI_GEOMETRY_HPP
