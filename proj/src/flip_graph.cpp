#include "lattri/flip_graph.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <unordered_set>

namespace lattri {

CapExceeded::CapExceeded(std::uint64_t partial, std::uint64_t cap)
    : std::runtime_error("state count exceeds cap of " + std::to_string(cap) + " (partial count " +
                         std::to_string(partial) + ")"),
      partial_(partial) {}

// ---------------------------------------------------------------------------
// StateSpace

StateSpace::StateSpace(std::shared_ptr<const ConstraintSet> c) : constraints_(std::move(c)) {
  if (auto err = validate_constraints(*constraints_)) throw ValidationError(*err);
  const GridSpec& g = grid();
  slot_site_.assign(static_cast<std::size_t>(g.slot_count()), -1);
  fixed_edges_.resize(static_cast<std::size_t>(g.slot_count()));
  for (const Midpoint& x : midpoints(g)) {
    const int slot = g.index(x);
    std::vector<Edge> cands = candidate_configs(x, *constraints_);
    if (constraints_->contains(x) || g.kind(x) == MidpointKind::Boundary) {
      fixed_edges_[slot] = cands.front();
      continue;
    }
    if (cands.size() > 255) throw std::length_error("too many configurations at one midpoint");
    slot_site_[slot] = static_cast<int>(site_slots_.size());
    site_slots_.push_back(slot);
    candidates_.push_back(std::move(cands));
  }
}

int StateSpace::candidate_index(int site, const Edge& e) const {
  const auto& c = candidates_[site];
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (c[k] == e) return static_cast<int>(k);
  }
  return -1;
}

namespace {

std::string key_of(std::span<const std::uint8_t> code) {
  return std::string(reinterpret_cast<const char*>(code.data()), code.size());
}

}  // namespace

void StateSpace::add_state(std::span<const std::uint8_t> code) {
  const std::size_t id = lengths_.size();
  auto [it, inserted] = index_.emplace(key_of(code), id);
  if (!inserted) throw std::logic_error("enumeration produced a duplicate state");
  codes_.insert(codes_.end(), code.begin(), code.end());
  std::int64_t len = 0;
  for (const Midpoint& x : midpoints(grid())) {
    const int slot = grid().index(x);
    const int s = slot_site_[slot];
    len += (s < 0 ? fixed_edges_[slot] : candidates_[s][code[s]]).length();
  }
  lengths_.push_back(len);
}

std::vector<Edge> StateSpace::edges(std::size_t state) const {
  const auto c = code(state);
  std::vector<Edge> out;
  out.reserve(static_cast<std::size_t>(grid().edge_count()));
  for (const Midpoint& x : midpoints(grid())) {
    const int slot = grid().index(x);
    const int s = slot_site_[slot];
    out.push_back(s < 0 ? fixed_edges_[slot] : candidates_[s][c[s]]);
  }
  return out;
}

Triangulation StateSpace::triangulation(std::size_t state) const {
  const std::vector<Edge> e = edges(state);
  return Triangulation::from_trusted_edges(constraints_, e);
}

std::optional<std::size_t> StateSpace::find_code(std::span<const std::uint8_t> code) const {
  auto it = index_.find(key_of(code));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> StateSpace::find(const Triangulation& t) const {
  if (t.grid() != grid()) return std::nullopt;
  std::vector<std::uint8_t> code(site_slots_.size());
  for (std::size_t s = 0; s < site_slots_.size(); ++s) {
    const int k = candidate_index(static_cast<int>(s), t.edge_at_slot(site_slots_[s]));
    if (k < 0) return std::nullopt;
    code[s] = static_cast<std::uint8_t>(k);
  }
  return find_code(code);
}

// ---------------------------------------------------------------------------
// Enumeration

namespace {

class Enumerator {
 public:
  Enumerator(const std::vector<std::vector<Edge>>& cands, const EnumerationOptions& opts)
      : cands_(cands), opts_(opts) {
    const int n = static_cast<int>(cands.size());
    order_.resize(n);
    for (int i = 0; i < n; ++i) order_[i] = opts.reverse_order ? n - 1 - i : i;
    for (int s = 0; s < n; ++s) {
      offset_.push_back(total_);
      total_ += static_cast<int>(cands[s].size());
    }
    std::vector<Edge> flat;
    for (const auto& c : cands) flat.insert(flat.end(), c.begin(), c.end());
    conflict_.assign(static_cast<std::size_t>(total_) * total_, 0);
    for (int i = 0; i < total_; ++i) {
      for (int j = i + 1; j < total_; ++j) {
        const std::uint8_t x = edges_cross(flat[i], flat[j]) ? 1 : 0;
        conflict_[static_cast<std::size_t>(i) * total_ + j] = x;
        conflict_[static_cast<std::size_t>(j) * total_ + i] = x;
      }
    }
    chosen_.resize(n);
    code_.resize(n);
  }

  template <class Emit>
  void run(Emit&& emit) {
    dfs(0, emit);
  }

  std::uint64_t count() const { return count_; }
  const EnumerationStats& stats() const { return stats_; }

 private:
  template <class Emit>
  void dfs(int depth, Emit& emit) {
    if (depth == static_cast<int>(order_.size())) {
      if (++count_ > opts_.cap) throw CapExceeded(count_ - 1, opts_.cap);
      emit(std::span<const std::uint8_t>(code_));
      return;
    }
    const int site = order_[depth];
    int choices = 0;
    for (int k = 0; k < static_cast<int>(cands_[site].size()); ++k) {
      const int g = offset_[site] + k;
      const std::uint8_t* row = conflict_.data() + static_cast<std::size_t>(g) * total_;
      bool ok = true;
      for (int d = 0; d < depth; ++d) {
        if (row[chosen_[d]]) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      ++choices;
      chosen_[depth] = g;
      code_[site] = static_cast<std::uint8_t>(k);
      dfs(depth + 1, emit);
    }
    stats_.max_branching = std::max(stats_.max_branching, choices);
    if (choices == 0) ++stats_.dead_ends;
  }

  const std::vector<std::vector<Edge>>& cands_;
  EnumerationOptions opts_;
  std::vector<int> order_;
  std::vector<int> offset_;
  int total_ = 0;
  std::vector<std::uint8_t> conflict_;
  std::vector<int> chosen_;
  std::vector<std::uint8_t> code_;
  std::uint64_t count_ = 0;
  EnumerationStats stats_;
};

}  // namespace

StateSpace enumerate_triangulations(std::shared_ptr<const ConstraintSet> c, const EnumerationOptions& opts) {
  StateSpace space(std::move(c));
  Enumerator en(space.candidates_, opts);
  en.run([&](std::span<const std::uint8_t> code) { space.add_state(code); });
  space.stats_ = en.stats();
  return space;
}

StateSpace enumerate_triangulations(const ConstraintSet& c, const EnumerationOptions& opts) {
  return enumerate_triangulations(std::make_shared<const ConstraintSet>(c), opts);
}

std::uint64_t count_triangulations(const ConstraintSet& c, const EnumerationOptions& opts,
                                   EnumerationStats* stats) {
  if (auto err = validate_constraints(c)) throw ValidationError(*err);
  std::vector<std::vector<Edge>> cands;
  for (const Midpoint& x : midpoints(c.grid())) {
    if (c.contains(x) || c.grid().kind(x) == MidpointKind::Boundary) continue;
    cands.push_back(candidate_configs(x, c));
  }
  Enumerator en(cands, opts);
  en.run([](std::span<const std::uint8_t>) {});
  if (stats) *stats = en.stats();
  return en.count();
}

// ---------------------------------------------------------------------------
// FlipGraph

FlipGraph::FlipGraph(const StateSpace& space) : space_(&space), adjacency_(space.size()) {
  std::vector<std::uint8_t> code(static_cast<std::size_t>(space.site_count()));
  for (std::size_t i = 0; i < space.size(); ++i) {
    const Triangulation t = space.triangulation(i);
    const auto base = space.code(i);
    for (int s = 0; s < space.site_count(); ++s) {
      const auto target = t.flip_target(space.site_slots()[s]);
      if (!target) continue;
      const int k = space.candidate_index(s, *target);
      if (k < 0) throw std::logic_error("flip leaves the candidate set");
      std::copy(base.begin(), base.end(), code.begin());
      code[s] = static_cast<std::uint8_t>(k);
      const auto j = space.find_code(code);
      if (!j) throw std::logic_error("state space is not closed under flips");
      adjacency_[i].push_back({static_cast<std::uint32_t>(*j), static_cast<std::uint32_t>(s)});
      if (*j > i) ++edges_;
    }
  }
}

std::vector<int> FlipGraph::bfs(std::size_t source) const {
  std::vector<int> dist(size(), -1);
  std::deque<std::size_t> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (const Arc& a : adjacency_[u]) {
      if (dist[a.target] < 0) {
        dist[a.target] = dist[u] + 1;
        queue.push_back(a.target);
      }
    }
  }
  return dist;
}

bool FlipGraph::is_connected() const {
  if (size() == 0) return true;
  const auto d = bfs(0);
  return std::none_of(d.begin(), d.end(), [](int x) { return x < 0; });
}

int FlipGraph::diameter() const {
  int best = 0;
  for (std::size_t s = 0; s < size(); ++s) {
    for (int d : bfs(s)) best = std::max(best, d);
  }
  return best;
}

int bfs_distance(const FlipGraph& g, std::size_t s, std::size_t t) {
  if (s == t) return 0;
  return g.bfs(s)[t];
}

// ---------------------------------------------------------------------------
// Edge trees

std::optional<int> EdgeTree::index_of(const Edge& e) const {
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (nodes[k] == e) return static_cast<int>(k);
  }
  return std::nullopt;
}

EdgeTree edge_tree(Midpoint x, const ConstraintSet& c) {
  EdgeTree tree;
  tree.x = x;
  tree.nodes = candidate_configs(x, c);
  const int n = static_cast<int>(tree.nodes.size());
  tree.parent.assign(n, -1);
  tree.depth.assign(n, 0);
  const int min_len = tree.nodes.front().length();
  // Candidates are sorted by length, so parents are resolved before children.
  for (int k = 0; k < n; ++k) {
    const Edge& e = tree.nodes[k];
    if (e.length() == min_len) {
      tree.roots.push_back(k);
      continue;
    }
    const auto p = tree.index_of(minimal_parallelogram(e).short_diagonal());
    if (!p) {
      std::ostringstream msg;
      msg << "shortening flip of " << e << " is not a configuration at " << x;
      throw std::logic_error(msg.str());
    }
    tree.parent[k] = *p;
    tree.depth[k] = tree.depth[*p] + 1;
  }
  return tree;
}

int kappa(const EdgeTree& tree, const Edge& e1, const Edge& e2) {
  const auto a = tree.index_of(e1);
  const auto b = tree.index_of(e2);
  if (!a || !b) {
    std::ostringstream msg;
    msg << "edge " << (!a ? e1 : e2) << " is not a configuration at " << tree.x;
    throw std::invalid_argument(msg.str());
  }
  std::unordered_map<int, int> up;  // ancestor -> distance from a
  for (int k = *a, d = 0; k >= 0; k = tree.parent[k], ++d) up.emplace(k, d);
  for (int k = *b, d = 0; k >= 0; k = tree.parent[k], ++d) {
    auto it = up.find(k);
    if (it != up.end()) return it->second + d;
  }
  // Different roots: the two unit diagonals are one flip apart.
  return tree.depth[*a] + tree.depth[*b] + 1;
}

FlipDistance::FlipDistance(std::shared_ptr<const ConstraintSet> c) : constraints_(std::move(c)) {}

const EdgeTree& FlipDistance::tree(Midpoint x) {
  const int key = constraints_->grid().index(x);
  auto it = trees_.find(key);
  if (it == trees_.end()) it = trees_.emplace(key, edge_tree(x, *constraints_)).first;
  return it->second;
}

int FlipDistance::operator()(const Triangulation& a, const Triangulation& b) {
  if (a.grid() != b.grid() || a.constraints() != b.constraints()) {
    throw std::invalid_argument("flip distance needs a common grid and constraint set");
  }
  int total = 0;
  for (int slot : a.midpoint_slots()) {
    const Edge& ea = a.edge_at_slot(slot);
    const Edge& eb = b.edge_at_slot(slot);
    if (ea == eb) continue;
    total += kappa(tree(a.grid().midpoint_at(slot)), ea, eb);
  }
  return total;
}

int flip_distance(const Triangulation& a, const Triangulation& b) {
  FlipDistance d(a.constraints_ptr());
  return d(a, b);
}

}  // namespace lattri
