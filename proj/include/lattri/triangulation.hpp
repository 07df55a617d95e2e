#ifndef LATTRI_TRIANGULATION_HPP
#define LATTRI_TRIANGULATION_HPP

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lattri/geometry.hpp"

namespace lattri {

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StaleProposalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Fixed edges (the pair (eta, Delta)), keyed by midpoint. Boundary edges of the
/// rectangle are always implied and need not be listed.
class ConstraintSet {
 public:
  explicit ConstraintSet(GridSpec grid) : grid_(grid) {}
  ConstraintSet(GridSpec grid, std::span<const Edge> edges);

  const GridSpec& grid() const { return grid_; }

  /// Adds e under its own midpoint. Throws ValidationError if that midpoint
  /// already carries a different edge.
  void add(const Edge& e);

  bool contains(Midpoint x) const { return edges_.count(x) != 0; }
  const Edge* find(Midpoint x) const;
  std::size_t size() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }
  std::vector<Edge> edges() const;
  auto begin() const { return edges_.begin(); }
  auto end() const { return edges_.end(); }

  friend bool operator==(const ConstraintSet&, const ConstraintSet&) = default;

 private:
  GridSpec grid_;
  std::map<Midpoint, Edge> edges_;
};

/// nullopt when the set is valid; otherwise a description of the first violation
/// (non-primitive edge, edge outside the grid, or crossing pair).
std::optional<std::string> validate_constraints(const ConstraintSet& c);

struct Triangle {
  std::array<Point, 3> vertices;  // sorted

  Triangle() = default;
  Triangle(Point a, Point b, Point c);
  friend auto operator<=>(const Triangle&, const Triangle&) = default;

  /// Twice the signed area is +-1 for unimodular triangles.
  std::int64_t doubled_area() const;
  std::array<Edge, 3> edges() const;
};

std::ostream& operator<<(std::ostream& os, const Triangle& t);

/// A full triangulation of the grid: one edge per midpoint, plus for each edge
/// the third vertices of its two incident triangles. The apex pair is the
/// edge-to-triangle adjacency and is patched in O(1) per flip.
class Triangulation {
 public:
  struct Slot {
    Edge edge;
    Point left{-1, -1};   // apex counter-clockwise of p -> q
    Point right{-1, -1};  // apex clockwise of p -> q
    friend bool operator==(const Slot&, const Slot&) = default;
  };
  static constexpr Point kNoApex{-1, -1};

  /// Builds and fully validates. Throws ValidationError naming the violated
  /// invariant (edge count, crossing pair, constraint mismatch, ...).
  static Triangulation from_edges(std::shared_ptr<const ConstraintSet> constraints,
                                  std::span<const Edge> edges);
  static Triangulation from_edges(const ConstraintSet& constraints, std::span<const Edge> edges);

  /// Trusted construction for assignments known to be non-crossing (enumerated
  /// states). Skips the pairwise crossing scan but still checks local structure.
  static Triangulation from_trusted_edges(std::shared_ptr<const ConstraintSet> constraints,
                                          std::span<const Edge> edges);

  const GridSpec& grid() const { return grid_; }
  const ConstraintSet& constraints() const { return *constraints_; }
  const std::shared_ptr<const ConstraintSet>& constraints_ptr() const { return constraints_; }

  const Edge& edge(Midpoint x) const { return slots_[grid_.index(x)].edge; }
  const Edge& edge_at_slot(int slot) const { return slots_[slot].edge; }
  const Slot& slot(int s) const { return slots_[s]; }
  /// Boundary or constraint midpoint; never flippable.
  bool is_fixed(Midpoint x) const { return fixed_[grid_.index(x)] != 0; }
  bool is_fixed_slot(int s) const { return fixed_[s] != 0; }

  std::int64_t total_length() const { return total_length_; }

  /// Slots of all midpoints in row-major doubled-coordinate order.
  const std::vector<int>& midpoint_slots() const { return *midpoint_slots_; }
  /// Edges in midpoint order.
  std::vector<Edge> edges() const;
  std::vector<Triangle> triangles() const;
  /// Incident triangles of the edge at x; the second is empty on the boundary.
  std::array<std::optional<Triangle>, 2> incident_triangles(Midpoint x) const;

  /// Opposite diagonal if the edge at slot is the diagonal of a parallelogram
  /// and the midpoint is not fixed.
  std::optional<Edge> flip_target(int slot) const {
    if (fixed_[slot]) return std::nullopt;
    const Slot& s = slots_[slot];
    if (s.left == kNoApex || s.right == kNoApex) return std::nullopt;
    if (s.left + s.right != s.edge.p + s.edge.q) return std::nullopt;
    return Edge(s.left, s.right);
  }
  bool is_flippable_slot(int slot) const {
    const Slot& s = slots_[slot];
    return !fixed_[slot] && s.left != kNoApex && s.right != kNoApex &&
           s.left + s.right == s.edge.p + s.edge.q;
  }

  /// Replaces the edge at slot by its opposite diagonal. Requires
  /// is_flippable_slot(slot).
  void flip_slot(int slot);

  /// Checks every structural invariant from scratch; nullopt when valid.
  std::optional<std::string> check_invariants() const;

  friend bool operator==(const Triangulation& a, const Triangulation& b);

 private:
  Triangulation(std::shared_ptr<const ConstraintSet> constraints, std::span<const Edge> edges,
                bool check_crossings);

  void replace_apex(int slot, Point old_apex, Point new_apex);
  std::optional<Point> find_apex(const Edge& e, int side) const;
  std::optional<std::string> check_structure() const;

  std::shared_ptr<const ConstraintSet> constraints_;
  GridSpec grid_;
  std::shared_ptr<const std::vector<int>> midpoint_slots_;
  std::vector<Slot> slots_;
  std::vector<std::uint8_t> fixed_;
  std::int64_t total_length_ = 0;
};

/// All primitive in-grid edges with midpoint x that cross no constraint, sorted
/// by length then lexicographically. For a fixed midpoint, the fixed edge.
std::vector<Edge> candidate_configs(Midpoint x, const ConstraintSet& c);

struct GroundState {
  Triangulation triangulation;
  /// Midpoints where both unit diagonals are consistent; the NW-SE one is used.
  std::vector<Midpoint> ties;
  /// Minimal consistent length per midpoint slot (0 on lattice-point slots).
  std::vector<int> min_length;

  bool is_ground(Midpoint x, const Edge& e) const {
    return e.length() == min_length[triangulation.grid().index(x)];
  }
  bool is_ground_slot(int slot, int length) const { return length == min_length[slot]; }
};

/// Places every non-constraint edge in its minimal-length consistent
/// configuration. Throws ValidationError if the constraints are invalid.
GroundState ground_state(const ConstraintSet& c);
GroundState ground_state(std::shared_ptr<const ConstraintSet> c);

/// True iff some constraint crosses the short diagonal of e's minimal
/// parallelogram. e must be non-axis.
bool is_spanned(const Edge& e, const ConstraintSet& c);

struct FlipProposal {
  Midpoint x;
  Edge current;
  Edge proposed;
  double accept_probability = 0.5;
};

/// Heat-bath probability lambda^new / (lambda^new + lambda^cur), evaluated as
/// 1 / (1 + lambda^(cur - new)).
double heat_bath_prob(double lambda, int cur_len, int new_len);

std::optional<FlipProposal> flippable(const Triangulation& t, Midpoint x, double lambda = 1.0);

/// Throws StaleProposalError if t no longer matches the proposal.
Triangulation apply_flip(const Triangulation& t, const FlipProposal& proposal);
void apply_flip_in_place(Triangulation& t, const FlipProposal& proposal);

/// Some triangulation extending c, filled greedily in row-major midpoint order
/// with the shortest candidate compatible with the edges placed so far.
Triangulation complete(const ConstraintSet& c);

}  // namespace lattri

#endif  // LATTRI_TRIANGULATION_HPP
