#ifndef LATTRI_STRUCTURE_HPP
#define LATTRI_STRUCTURE_HPP

#include <limits>
#include <vector>

#include "lattri/triangulation.hpp"

namespace lattri {

enum class TriangleLabel { G, B };

/// Triangles labelled G (all three edges at minimal length) or B, with the
/// B-triangles grouped into shared-edge components.
struct BTriangleDecomposition {
  std::vector<Triangle> triangles;
  std::vector<TriangleLabel> labels;
  std::vector<int> component;  // -1 for G-triangles
  std::vector<std::vector<int>> components;
  /// Per grid slot, the indices of the (one or two) triangles on that edge.
  std::vector<std::array<int, 2>> slot_triangles;

  int b_count() const;
  /// Component id of S_x, or -1 when both triangles at x are G.
  int component_at(const GridSpec& grid, Midpoint x) const;
  /// The triangles of S_x; empty when x lies between two G-triangles.
  std::vector<Triangle> s_x(const GridSpec& grid, Midpoint x) const;
};

BTriangleDecomposition classify(const Triangulation& t, const GroundState& gs);
BTriangleDecomposition classify(const Triangulation& t, const ConstraintSet& c);

/// Excess length of S_x over its ground-state relaying: sum over the midpoints
/// interior to S_x of |sigma_z| minus the minimal length at z.
std::int64_t phi_x(const Triangulation& t, const BTriangleDecomposition& d, const GroundState& gs,
                   Midpoint x);
std::int64_t phi_x(const Triangulation& t, Midpoint x);

/// A region given as a union of interior-disjoint unimodular triangles.
struct InfluenceRegion {
  std::vector<Triangle> triangles;  // sorted

  bool empty() const { return triangles.empty(); }
  /// Edges used by exactly one triangle. Every lattice point on the boundary is
  /// a vertex, so this set determines the region independently of how it is
  /// triangulated.
  std::vector<Edge> boundary() const;
  std::int64_t doubled_area() const;
  /// Midpoints strictly inside the region (edges shared by two of its triangles).
  std::vector<Midpoint> interior_midpoints() const;
  bool same_region(const InfluenceRegion& other) const;
  /// Closed containment of a point given in thirds (3v, 3h).
  bool contains_thirds(std::int64_t v3, std::int64_t h3) const;
};

/// Branching construction: the two halves of the minimal parallelogram of e,
/// then for every side edge longer than the ground state at its midpoint, the
/// half of that edge's minimal parallelogram on the far side, and so on.
InfluenceRegion influence_region_branching(const Edge& e, const ConstraintSet& c, const GroundState& gs);
InfluenceRegion influence_region_branching(const Edge& e, const ConstraintSet& c);

/// Ground-state triangles whose interior meets the open segment e, choosing in
/// every tied unit cell the diagonal that crosses fewer triangles.
InfluenceRegion influence_region_minimal(const Edge& e, const ConstraintSet& c, const GroundState& gs);
InfluenceRegion influence_region_minimal(const Edge& e, const ConstraintSet& c);

inline constexpr int kInfiniteDistance = std::numeric_limits<int>::max();

/// Triangle-graph distance in the ground state with e added as a constraint,
/// from the triangles inside the influence region of e to the triangles on the
/// edges at A. kInfiniteDistance when the region is empty.
int distance_d(const std::vector<Midpoint>& A, const Edge& e, const ConstraintSet& c);

/// Open interiors of two triangles intersect.
bool interiors_intersect(const Triangle& a, const Triangle& b);
/// Open interior of t meets the open segment e.
bool interior_meets_segment(const Triangle& t, const Edge& e);

/// Height sequence of a +-1 walk of length 2n from 0 back to 0.
struct LatticePath {
  std::vector<int> steps;

  std::vector<int> heights() const;  // 2n + 1 values starting at 0
  /// Sum of |height|; the area under the path when it stays non-negative.
  std::int64_t area() const;
  bool non_negative() const;
  friend bool operator==(const LatticePath&, const LatticePath&) = default;
};

/// 1 x n triangulations correspond to walks: the interior edge (0,b)-(1,t) at
/// doubled horizontal position k = b + t has height t - b. Positively oriented
/// edges sit above the axis.
LatticePath path_from_1d(const Triangulation& t);
Triangulation path_to_1d(const LatticePath& path);

}  // namespace lattri

#endif  // LATTRI_STRUCTURE_HPP
