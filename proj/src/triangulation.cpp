#include "lattri/triangulation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lattri {

// ---------------------------------------------------------------------------
// ConstraintSet

ConstraintSet::ConstraintSet(GridSpec grid, std::span<const Edge> edges) : grid_(grid) {
  for (const Edge& e : edges) add(e);
}

void ConstraintSet::add(const Edge& e) {
  const Midpoint x = e.midpoint();
  auto [it, inserted] = edges_.emplace(x, e);
  if (!inserted && it->second != e) {
    std::ostringstream msg;
    msg << "constraints " << it->second << " and " << e << " share midpoint " << x;
    throw ValidationError(msg.str());
  }
}

const Edge* ConstraintSet::find(Midpoint x) const {
  auto it = edges_.find(x);
  return it == edges_.end() ? nullptr : &it->second;
}

std::vector<Edge> ConstraintSet::edges() const {
  std::vector<Edge> out;
  out.reserve(edges_.size());
  for (const auto& [x, e] : edges_) out.push_back(e);
  return out;
}

std::optional<std::string> validate_constraints(const ConstraintSet& c) {
  const GridSpec& grid = c.grid();
  std::vector<Edge> all;
  for (const auto& [x, e] : c) {
    std::ostringstream msg;
    if (!grid.contains(e.p) || !grid.contains(e.q)) {
      msg << "constraint " << e << " lies outside the " << grid.rows << "x" << grid.cols << " grid";
      return msg.str();
    }
    if (!e.is_primitive()) {
      msg << "constraint " << e << " is not primitive";
      return msg.str();
    }
    if (e.midpoint() != x) {
      msg << "constraint " << e << " stored under wrong midpoint " << x;
      return msg.str();
    }
    all.push_back(e);
  }
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      if (edges_cross(all[i], all[j])) {
        std::ostringstream msg;
        msg << "constraints " << all[i] << " and " << all[j] << " cross";
        return msg.str();
      }
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Triangle

Triangle::Triangle(Point a, Point b, Point c) : vertices{a, b, c} {
  std::sort(vertices.begin(), vertices.end());
}

std::int64_t Triangle::doubled_area() const { return orient(vertices[0], vertices[1], vertices[2]); }

std::array<Edge, 3> Triangle::edges() const {
  return {Edge(vertices[0], vertices[1]), Edge(vertices[1], vertices[2]), Edge(vertices[0], vertices[2])};
}

std::ostream& operator<<(std::ostream& os, const Triangle& t) {
  return os << '{' << t.vertices[0] << ',' << t.vertices[1] << ',' << t.vertices[2] << '}';
}

// ---------------------------------------------------------------------------
// Triangulation

namespace {

std::shared_ptr<const std::vector<int>> make_midpoint_slots(const GridSpec& grid) {
  auto out = std::make_shared<std::vector<int>>();
  for (const Midpoint& x : midpoints(grid)) out->push_back(grid.index(x));
  return out;
}

Midpoint sum_midpoint(Point a, Point b) { return {a.v + b.v, a.h + b.h}; }

}  // namespace

Triangulation::Triangulation(std::shared_ptr<const ConstraintSet> constraints,
                             std::span<const Edge> edges, bool check_crossings)
    : constraints_(std::move(constraints)), grid_(constraints_->grid()) {
  const int expected = grid_.edge_count();
  if (static_cast<int>(edges.size()) != expected) {
    std::ostringstream msg;
    msg << (static_cast<int>(edges.size()) < expected ? "not maximal" : "too many edges")
        << ": expected 3mn+m+n = " << expected << " edges, found " << edges.size();
    throw ValidationError(msg.str());
  }
  midpoint_slots_ = make_midpoint_slots(grid_);
  slots_.assign(static_cast<std::size_t>(grid_.slot_count()), Slot{});
  fixed_.assign(static_cast<std::size_t>(grid_.slot_count()), 0);
  std::vector<std::uint8_t> assigned(static_cast<std::size_t>(grid_.slot_count()), 0);

  for (const Edge& e : edges) {
    std::ostringstream msg;
    if (!grid_.contains(e.p) || !grid_.contains(e.q)) {
      msg << "edge " << e << " lies outside the grid";
      throw ValidationError(msg.str());
    }
    if (!e.is_primitive()) {
      msg << "edge " << e << " is not primitive";
      throw ValidationError(msg.str());
    }
    const int s = grid_.index(e.midpoint());
    if (assigned[s]) {
      msg << "edges " << slots_[s].edge << " and " << e << " share midpoint " << e.midpoint();
      throw ValidationError(msg.str());
    }
    assigned[s] = 1;
    slots_[s].edge = e;
    total_length_ += e.length();
  }

  for (int s : *midpoint_slots_) {
    if (grid_.kind(grid_.midpoint_at(s)) == MidpointKind::Boundary) fixed_[s] = 1;
  }
  for (const auto& [x, e] : *constraints_) {
    const int s = grid_.index(x);
    if (slots_[s].edge != e) {
      std::ostringstream msg;
      msg << "inconsistent with constraint " << e << ": midpoint carries " << slots_[s].edge;
      throw ValidationError(msg.str());
    }
    fixed_[s] = 1;
  }

  for (int s : *midpoint_slots_) {
    Slot& slot = slots_[s];
    slot.left = find_apex(slot.edge, +1).value_or(kNoApex);
    slot.right = find_apex(slot.edge, -1).value_or(kNoApex);
  }
  if (auto err = check_structure()) throw ValidationError(*err);

  if (check_crossings) {
    std::vector<Edge> sorted(edges.begin(), edges.end());
    auto lo = [](const Edge& e) { return std::min(e.p.h, e.q.h); };
    auto hi = [](const Edge& e) { return std::max(e.p.h, e.q.h); };
    std::sort(sorted.begin(), sorted.end(), [&](const Edge& a, const Edge& b) { return lo(a) < lo(b); });
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      for (std::size_t j = i + 1; j < sorted.size() && lo(sorted[j]) <= hi(sorted[i]); ++j) {
        if (edges_cross(sorted[i], sorted[j])) {
          std::ostringstream msg;
          msg << "edges " << sorted[i] << " and " << sorted[j] << " cross";
          throw ValidationError(msg.str());
        }
      }
    }
  }
}

Triangulation Triangulation::from_edges(std::shared_ptr<const ConstraintSet> constraints,
                                        std::span<const Edge> edges) {
  if (auto err = validate_constraints(*constraints)) throw ValidationError(*err);
  return Triangulation(std::move(constraints), edges, true);
}

Triangulation Triangulation::from_edges(const ConstraintSet& constraints, std::span<const Edge> edges) {
  return from_edges(std::make_shared<const ConstraintSet>(constraints), edges);
}

Triangulation Triangulation::from_trusted_edges(std::shared_ptr<const ConstraintSet> constraints,
                                                std::span<const Edge> edges) {
  return Triangulation(std::move(constraints), edges, false);
}

std::optional<Point> Triangulation::find_apex(const Edge& e, int side) const {
  const Point d = e.delta();
  auto matches = [&](Point r) {
    if (!grid_.contains(r)) return false;
    const Midpoint a = sum_midpoint(e.p, r);
    const Midpoint b = sum_midpoint(e.q, r);
    if (!grid_.contains(a) || !grid_.contains(b)) return false;
    return slots_[grid_.index(a)].edge == Edge(e.p, r) && slots_[grid_.index(b)].edge == Edge(e.q, r);
  };
  if (d.v == 0) {
    // cross(d, t) = d.h * t.v, with d.h = 1 for canonical horizontal edges.
    const int rv = e.p.v + side * d.h;
    if (rv < 0 || rv > grid_.rows) return std::nullopt;
    for (int rh = 0; rh <= grid_.cols; ++rh) {
      if (matches({rv, rh})) return Point{rv, rh};
    }
    return std::nullopt;
  }
  for (int rv = 0; rv <= grid_.rows; ++rv) {
    const std::int64_t tv = rv - e.p.v;
    const std::int64_t num = d.h * tv - side;
    if (num % d.v != 0) continue;
    const Point r{rv, e.p.h + static_cast<int>(num / d.v)};
    if (matches(r)) return r;
  }
  return std::nullopt;
}

std::optional<std::string> Triangulation::check_structure() const {
  long apexes = 0;
  for (int s : *midpoint_slots_) {
    const Slot& slot = slots_[s];
    const bool boundary = grid_.kind(grid_.midpoint_at(s)) == MidpointKind::Boundary;
    const int count = (slot.left != kNoApex) + (slot.right != kNoApex);
    apexes += count;
    if (count != (boundary ? 1 : 2)) {
      std::ostringstream msg;
      msg << "edge " << slot.edge << " lies in " << count << " unimodular triangle(s), expected "
          << (boundary ? 1 : 2);
      return msg.str();
    }
  }
  if (apexes != 3L * grid_.triangle_count()) {
    std::ostringstream msg;
    msg << "expected 2mn = " << grid_.triangle_count() << " triangles, found " << apexes / 3;
    return msg.str();
  }
  return std::nullopt;
}

std::optional<std::string> Triangulation::check_invariants() const {
  try {
    Triangulation fresh(constraints_, edges(), true);
    if (fresh.slots_ != slots_) return std::string("adjacency out of sync with edge assignment");
    if (fresh.total_length_ != total_length_) return std::string("cached total length out of sync");
    if (fresh.fixed_ != fixed_) return std::string("fixed-midpoint mask out of sync");
  } catch (const ValidationError& e) {
    return std::string(e.what());
  }
  return std::nullopt;
}

void Triangulation::replace_apex(int slot, Point old_apex, Point new_apex) {
  Slot& s = slots_[slot];
  if (s.left == old_apex) {
    s.left = new_apex;
  } else {
    s.right = new_apex;
  }
}

void Triangulation::flip_slot(int slot) {
  const Slot old = slots_[slot];
  const Point p = old.edge.p;
  const Point q = old.edge.q;
  const Point a = old.left;
  const Point b = old.right;
  replace_apex(grid_.index(sum_midpoint(p, a)), q, b);
  replace_apex(grid_.index(sum_midpoint(a, q)), p, b);
  replace_apex(grid_.index(sum_midpoint(q, b)), p, a);
  replace_apex(grid_.index(sum_midpoint(b, p)), q, a);
  Slot& s = slots_[slot];
  s.edge = Edge(a, b);
  const bool p_left = orient(s.edge.p, s.edge.q, p) > 0;
  s.left = p_left ? p : q;
  s.right = p_left ? q : p;
  total_length_ += s.edge.length() - old.edge.length();
}

std::vector<Edge> Triangulation::edges() const {
  std::vector<Edge> out;
  out.reserve(midpoint_slots_->size());
  for (int s : *midpoint_slots_) out.push_back(slots_[s].edge);
  return out;
}

std::vector<Triangle> Triangulation::triangles() const {
  std::vector<Triangle> out;
  out.reserve(static_cast<std::size_t>(grid_.triangle_count()));
  for (int s : *midpoint_slots_) {
    const Slot& slot = slots_[s];
    for (Point a : {slot.left, slot.right}) {
      if (a == kNoApex) continue;
      const int i1 = grid_.index(sum_midpoint(slot.edge.p, a));
      const int i2 = grid_.index(sum_midpoint(slot.edge.q, a));
      if (s < i1 && s < i2) out.emplace_back(slot.edge.p, slot.edge.q, a);
    }
  }
  return out;
}

std::array<std::optional<Triangle>, 2> Triangulation::incident_triangles(Midpoint x) const {
  const Slot& slot = slots_[grid_.index(x)];
  std::array<std::optional<Triangle>, 2> out;
  int k = 0;
  for (Point a : {slot.left, slot.right}) {
    if (a != kNoApex) out[k++] = Triangle(slot.edge.p, slot.edge.q, a);
  }
  return out;
}

bool operator==(const Triangulation& a, const Triangulation& b) {
  return a.grid_ == b.grid_ && *a.constraints_ == *b.constraints_ && a.slots_ == b.slots_ &&
         a.fixed_ == b.fixed_ && a.total_length_ == b.total_length_;
}

// ---------------------------------------------------------------------------
// Configurations and ground states

std::vector<Edge> candidate_configs(Midpoint x, const ConstraintSet& c) {
  if (const Edge* fixed = c.find(x)) return {*fixed};
  const GridSpec& grid = c.grid();
  std::vector<Edge> out;
  for (int pv = 0; pv <= grid.rows; ++pv) {
    for (int ph = 0; ph <= grid.cols; ++ph) {
      const Point p{pv, ph};
      const Point q{x.dv - pv, x.dh - ph};
      if (!(p < q) || !grid.contains(q)) continue;
      const Edge e(p, q);
      if (!e.is_primitive()) continue;
      bool ok = true;
      for (const auto& [cx, ce] : c) {
        if (edges_cross(e, ce)) {
          ok = false;
          break;
        }
      }
      if (ok) out.push_back(e);
    }
  }
  std::sort(out.begin(), out.end(), [](const Edge& a, const Edge& b) {
    if (a.length() != b.length()) return a.length() < b.length();
    return a < b;
  });
  return out;
}

GroundState ground_state(std::shared_ptr<const ConstraintSet> c) {
  if (auto err = validate_constraints(*c)) throw ValidationError(*err);
  const GridSpec& grid = c->grid();
  std::vector<Edge> edges;
  std::vector<Midpoint> ties;
  std::vector<int> min_length(static_cast<std::size_t>(grid.slot_count()), 0);
  for (const Midpoint& x : midpoints(grid)) {
    const std::vector<Edge> cands = candidate_configs(x, *c);
    Edge best = cands.front();
    if (cands.size() > 1 && cands[1].length() == best.length()) {
      // Only the two unit diagonals can tie; take the NW-SE one.
      ties.push_back(x);
      if (orientation(best) != Orientation::Negative) best = cands[1];
    }
    min_length[grid.index(x)] = best.length();
    edges.push_back(best);
  }
  Triangulation t = Triangulation::from_edges(std::move(c), edges);
  return GroundState{std::move(t), std::move(ties), std::move(min_length)};
}

GroundState ground_state(const ConstraintSet& c) {
  return ground_state(std::make_shared<const ConstraintSet>(c));
}

bool is_spanned(const Edge& e, const ConstraintSet& c) {
  const Edge diag = minimal_parallelogram(e).short_diagonal();
  for (const auto& [x, ce] : c) {
    if (edges_cross(ce, diag)) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Flips

double heat_bath_prob(double lambda, int cur_len, int new_len) {
  return 1.0 / (1.0 + std::pow(lambda, cur_len - new_len));
}

std::optional<FlipProposal> flippable(const Triangulation& t, Midpoint x, double lambda) {
  const int s = t.grid().index(x);
  const auto target = t.flip_target(s);
  if (!target) return std::nullopt;
  const Edge& cur = t.edge_at_slot(s);
  return FlipProposal{x, cur, *target, heat_bath_prob(lambda, cur.length(), target->length())};
}

void apply_flip_in_place(Triangulation& t, const FlipProposal& proposal) {
  const int s = t.grid().index(proposal.x);
  const auto target = t.flip_target(s);
  if (t.edge_at_slot(s) != proposal.current || !target || *target != proposal.proposed) {
    std::ostringstream msg;
    msg << "stale flip proposal at " << proposal.x << ": expected " << proposal.current << " -> "
        << proposal.proposed << ", triangulation has " << t.edge_at_slot(s);
    throw StaleProposalError(msg.str());
  }
  t.flip_slot(s);
}

Triangulation apply_flip(const Triangulation& t, const FlipProposal& proposal) {
  Triangulation out = t;
  apply_flip_in_place(out, proposal);
  return out;
}

Triangulation complete(const ConstraintSet& c) {
  if (auto err = validate_constraints(c)) throw ValidationError(*err);
  const GridSpec& grid = c.grid();
  std::vector<Edge> placed;
  std::vector<Midpoint> open;
  for (const Midpoint& x : midpoints(grid)) {
    if (const Edge* fixed = c.find(x)) {
      placed.push_back(*fixed);
    } else if (grid.kind(x) == MidpointKind::Boundary) {
      placed.push_back(candidate_configs(x, c).front());
    } else {
      open.push_back(x);
    }
  }
  // Every non-crossing edge set extends to a full triangulation, so a compatible
  // candidate always exists and no backtracking is needed.
  for (const Midpoint& x : open) {
    bool done = false;
    for (const Edge& e : candidate_configs(x, c)) {
      const bool ok = std::none_of(placed.begin(), placed.end(),
                                   [&](const Edge& other) { return edges_cross(e, other); });
      if (ok) {
        placed.push_back(e);
        done = true;
        break;
      }
    }
    if (!done) throw std::logic_error("completion got stuck; constraint set is inconsistent");
  }
  return Triangulation::from_edges(c, placed);
}

}  // namespace lattri
