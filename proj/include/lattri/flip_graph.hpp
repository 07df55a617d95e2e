#ifndef LATTRI_FLIP_GRAPH_HPP
#define LATTRI_FLIP_GRAPH_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "lattri/triangulation.hpp"

namespace lattri {

class CapExceeded : public std::runtime_error {
 public:
  CapExceeded(std::uint64_t partial, std::uint64_t cap);
  std::uint64_t partial_count() const { return partial_; }

 private:
  std::uint64_t partial_;
};

struct EnumerationOptions {
  std::uint64_t cap = 5'000'000;
  /// Visit midpoints in reverse lexicographic order instead of forward.
  bool reverse_order = false;
};

struct EnumerationStats {
  /// Largest number of consistent choices seen at any search node.
  int max_branching = 0;
  std::uint64_t dead_ends = 0;
};

/// Every triangulation consistent with a constraint set. States are stored as
/// one candidate index per free midpoint ("site").
class StateSpace {
 public:
  const GridSpec& grid() const { return constraints_->grid(); }
  const ConstraintSet& constraints() const { return *constraints_; }
  const std::shared_ptr<const ConstraintSet>& constraints_ptr() const { return constraints_; }

  std::size_t size() const { return lengths_.size(); }
  int site_count() const { return static_cast<int>(site_slots_.size()); }
  /// Grid slot of each site, in midpoint order.
  const std::vector<int>& site_slots() const { return site_slots_; }
  /// Site index of a grid slot, or -1 for fixed midpoints.
  int site_of_slot(int slot) const { return slot_site_[slot]; }
  const std::vector<Edge>& candidates(int site) const { return candidates_[site]; }
  /// Edge at a boundary or constraint slot.
  const Edge& fixed_edge(int slot) const { return fixed_edges_[slot]; }
  int candidate_index(int site, const Edge& e) const;

  std::span<const std::uint8_t> code(std::size_t state) const {
    return {codes_.data() + state * site_slots_.size(), site_slots_.size()};
  }
  const Edge& edge(std::size_t state, int site) const { return candidates_[site][code(state)[site]]; }
  /// Full edge list in midpoint order.
  std::vector<Edge> edges(std::size_t state) const;
  Triangulation triangulation(std::size_t state) const;
  std::int64_t total_length(std::size_t state) const { return lengths_[state]; }

  std::optional<std::size_t> find(const Triangulation& t) const;
  std::optional<std::size_t> find_code(std::span<const std::uint8_t> code) const;

  const EnumerationStats& stats() const { return stats_; }

  friend StateSpace enumerate_triangulations(std::shared_ptr<const ConstraintSet> c,
                                             const EnumerationOptions& opts);

 private:
  explicit StateSpace(std::shared_ptr<const ConstraintSet> c);
  void add_state(std::span<const std::uint8_t> code);

  std::shared_ptr<const ConstraintSet> constraints_;
  std::vector<int> site_slots_;
  std::vector<int> slot_site_;
  std::vector<std::vector<Edge>> candidates_;
  std::vector<Edge> fixed_edges_;  // indexed by slot; unused for sites
  std::vector<std::uint8_t> codes_;
  std::vector<std::int64_t> lengths_;
  std::unordered_map<std::string, std::size_t> index_;
  EnumerationStats stats_;
};

/// Backtracking enumeration of all triangulations extending c. Throws
/// CapExceeded when more than opts.cap states exist.
StateSpace enumerate_triangulations(std::shared_ptr<const ConstraintSet> c,
                                    const EnumerationOptions& opts = {});
StateSpace enumerate_triangulations(const ConstraintSet& c, const EnumerationOptions& opts = {});

/// Streaming count without storing states.
std::uint64_t count_triangulations(const ConstraintSet& c, const EnumerationOptions& opts = {},
                                   EnumerationStats* stats = nullptr);

class FlipGraph {
 public:
  struct Arc {
    std::uint32_t target;
    std::uint32_t site;
  };

  explicit FlipGraph(const StateSpace& space);

  const StateSpace& space() const { return *space_; }
  std::size_t size() const { return adjacency_.size(); }
  std::span<const Arc> neighbors(std::size_t state) const { return adjacency_[state]; }
  std::size_t edge_count() const { return edges_; }

  /// Hop distances from source; -1 for unreachable states.
  std::vector<int> bfs(std::size_t source) const;
  bool is_connected() const;
  int diameter() const;

 private:
  const StateSpace* space_;
  std::vector<std::vector<Arc>> adjacency_;
  std::size_t edges_ = 0;
};

int bfs_distance(const FlipGraph& g, std::size_t s, std::size_t t);

/// The configurations at one midpoint as a tree: each non-minimal edge points
/// to the short diagonal of its minimal parallelogram.
struct EdgeTree {
  Midpoint x;
  std::vector<Edge> nodes;
  std::vector<int> parent;  // -1 at roots
  std::vector<int> depth;
  std::vector<int> roots;   // one, or two adjacent unit diagonals

  std::optional<int> index_of(const Edge& e) const;
};

EdgeTree edge_tree(Midpoint x, const ConstraintSet& c);

/// Number of flips needed to move the edge at x from e1 to e2. Throws
/// std::invalid_argument if either is not a configuration in the tree.
int kappa(const EdgeTree& tree, const Edge& e1, const Edge& e2);

/// Sum of kappa over all midpoints. Trees are built lazily and cached.
class FlipDistance {
 public:
  explicit FlipDistance(std::shared_ptr<const ConstraintSet> c);
  int operator()(const Triangulation& a, const Triangulation& b);
  const EdgeTree& tree(Midpoint x);

 private:
  std::shared_ptr<const ConstraintSet> constraints_;
  std::unordered_map<int, EdgeTree> trees_;
};

int flip_distance(const Triangulation& a, const Triangulation& b);

}  // namespace lattri

#endif  // LATTRI_FLIP_GRAPH_HPP
