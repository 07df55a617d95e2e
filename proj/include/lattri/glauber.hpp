#ifndef LATTRI_GLAUBER_HPP
#define LATTRI_GLAUBER_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "lattri/gibbs.hpp"

namespace lattri {

inline constexpr const char* kRngName = "mt19937_64/seed_seq(seed,stream)";

/// Independent generator for replica `stream` of a run seeded with `seed`.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0);

/// Proposal sites and precomputed heat-bath probabilities for one chain.
class HeatBathKernel {
 public:
  HeatBathKernel(const Triangulation& t, GibbsParams params, MidpointPolicy policy);

  const std::vector<int>& sites() const { return sites_; }
  int active() const { return static_cast<int>(sites_.size()); }
  double lambda() const { return params_.lambda; }
  MidpointPolicy policy() const { return policy_; }

  /// lambda^a / (lambda^a + lambda^b).
  double choose_prob(int len_a, int len_b) const { return table_[len_b - len_a + offset_]; }

  /// Shared-uniform heat-bath decision between the current edge and its flip.
  /// The two options are ordered shorter first (ties lexicographically) and the
  /// first is kept iff u < its probability. Returns true to move to target.
  bool moves(const Edge& current, const Edge& target, double u) const {
    const int lc = current.length();
    const int lt = target.length();
    const bool current_first = lc < lt || (lc == lt && current < target);
    const bool pick_first = current_first ? u < choose_prob(lc, lt) : u < choose_prob(lt, lc);
    return pick_first != current_first;
  }

 private:
  GibbsParams params_;
  MidpointPolicy policy_;
  std::vector<int> sites_;
  std::vector<double> table_;
  int offset_ = 0;
};

struct ChainState {
  Triangulation triangulation;
  std::mt19937_64 rng;
  std::uint64_t steps = 0;
  std::uint64_t proposals = 0;  // steps that drew a flippable site
  std::uint64_t flips = 0;

  ChainState(Triangulation t, std::uint64_t seed, std::uint64_t stream = 0)
      : triangulation(std::move(t)), rng(make_rng(seed, stream)) {}

  double acceptance_rate() const { return proposals ? static_cast<double>(flips) / proposals : 0.0; }
};

/// One heat-bath update. Returns true when an edge was flipped.
inline bool step(ChainState& c, const HeatBathKernel& k) {
  std::uniform_int_distribution<int> pick(0, k.active() - 1);
  const int slot = k.sites()[pick(c.rng)];
  ++c.steps;
  Triangulation& t = c.triangulation;
  if (!t.is_flippable_slot(slot)) return false;
  ++c.proposals;
  const auto& s = t.slot(slot);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(c.rng);
  if (!k.moves(s.edge, Edge(s.left, s.right), u)) return false;
  t.flip_slot(slot);
  ++c.flips;
  return true;
}

struct TracePoint {
  std::uint64_t step = 0;
  std::int64_t total_length = 0;
  double acceptance_rate = 0.0;
  int b_triangles = -1;  // -1 when not tracked
};

struct RunOptions {
  std::uint64_t steps = 0;
  std::uint64_t record_every = 0;  // 0: no trace
  bool track_b_triangles = false;
  MidpointPolicy policy = MidpointPolicy::FullLambda;
};

struct RunResult {
  Triangulation final_state;
  std::vector<TracePoint> trace;
  std::uint64_t steps = 0;
  std::uint64_t proposals = 0;
  std::uint64_t flips = 0;
  double seconds = 0.0;
};

/// Deterministic given the seed. The observer sees the chain at every record point.
RunResult run(const Triangulation& start, GibbsParams g, std::uint64_t seed, const RunOptions& opts,
              const std::function<void(const ChainState&)>& observer = {});

/// One coupled update: same site and same uniform for both chains. Returns the
/// slot that was updated.
int coupled_step(Triangulation& a, Triangulation& b, std::mt19937_64& rng, const HeatBathKernel& k);

/// Steps until coupled chains from a and b agree; nullopt when cap is reached.
std::optional<std::uint64_t> coalescence_time(const Triangulation& a, const Triangulation& b, GibbsParams g,
                                              std::uint64_t seed, std::uint64_t cap,
                                              MidpointPolicy policy = MidpointPolicy::FullLambda);

/// Starts from a triangulation containing the edge (0,0)-(1,n), then runs the
/// unconstrained chain until the edge at (1/2, n/2) is not positively oriented.
/// nullopt when cap is reached.
std::optional<std::uint64_t> hitting_time_experiment(GridSpec grid, GibbsParams g, std::uint64_t seed,
                                                     std::uint64_t cap,
                                                     MidpointPolicy policy = MidpointPolicy::FullLambda);

/// Initial state of the hitting-time experiment.
Triangulation long_edge_start(GridSpec grid);

enum class CouplingMetric {
  L1,          // |alpha^|s| - alpha^|t||, alpha^2 - 1 for opposite unit diagonals
  Horizontal,  // 1 x n: alpha^(l+1) (1 - alpha^-2) for horizontal lengths l-1, l+1
};

template <class Scalar>
struct CouplingPair {
  std::size_t a = 0;
  std::size_t b = 0;
  int site = 0;
  Scalar distance;  // Delta(a, b)
  Scalar expected;  // E[Delta(a', b')] after one coupled step
};

template <class Scalar>
struct CouplingReportT {
  int active = 0;
  std::vector<CouplingPair<Scalar>> pairs;
  Scalar max_ratio;  // max over pairs of expected / distance
  Scalar bound;      // 1 - 1 / (2 |active|)
  std::size_t worst = 0;
  bool contracts_to_bound = false;
};

using CouplingReport = CouplingReportT<double>;

/// Exact expected coupled one-step distance for every flip-adjacent pair, with
/// Delta extended to non-adjacent pairs by weighted shortest paths.
template <class Scalar>
CouplingReportT<Scalar> path_coupling_check(const FlipGraph& g, const Scalar& lambda, const Scalar& alpha,
                                            MidpointPolicy policy, CouplingMetric metric = CouplingMetric::L1);

CouplingReport path_coupling_check(const FlipGraph& g, GibbsParams params, double alpha,
                                   MidpointPolicy policy = MidpointPolicy::FullLambda);

struct OneDimCouplingReport {
  CouplingReport report;
  double delta = 0.0;      // n (1 - max ratio)
  double criterion = 0.0;  // max{2 a l^2 / (1 + l^2), 2 / (a (1 + l^2))}
  bool criterion_below_one = false;
  bool contraction_confirmed = false;  // max ratio < 1
  /// Pairs where one edge at the discrepancy is vertical (horizontal lengths 0
  /// and 2). Their unit-diagonal neighbours flip with probability 1/2 in one
  /// chain only, which cancels the gain at the discrepancy exactly.
  std::size_t vertical_pairs = 0;
  double max_ratio_vertical = 0.0;
  double max_ratio_other = 0.0;
  double delta_other = 0.0;  // n (1 - max_ratio_other)
};

/// 1 x n check under the horizontal-length metric.
OneDimCouplingReport path_coupling_check_1d(const FlipGraph& g, GibbsParams params, double alpha,
                                            MidpointPolicy policy = MidpointPolicy::FullLambda);

double one_dim_criterion(double lambda, double alpha);

}  // namespace lattri

#endif  // LATTRI_GLAUBER_HPP
