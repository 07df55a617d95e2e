#include "lattri/glauber.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <chrono>
#include <queue>
#include <unordered_map>

namespace lattri {

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

namespace {

std::vector<int> proposal_sites(const Triangulation& t, MidpointPolicy policy) {
  std::vector<int> out;
  const GridSpec& g = t.grid();
  for (int slot : t.midpoint_slots()) {
    const Midpoint x = g.midpoint_at(slot);
    if (t.constraints().contains(x)) continue;
    if (policy == MidpointPolicy::InteriorOnly && g.kind(x) == MidpointKind::Boundary) continue;
    out.push_back(slot);
  }
  return out;
}

}  // namespace

HeatBathKernel::HeatBathKernel(const Triangulation& t, GibbsParams params, MidpointPolicy policy)
    : params_(params), policy_(policy), sites_(proposal_sites(t, policy)) {
  if (sites_.empty()) throw std::invalid_argument("no midpoints to propose under this policy");
  offset_ = t.grid().rows + t.grid().cols;
  table_.resize(2 * offset_ + 1);
  for (int d = -offset_; d <= offset_; ++d) table_[d + offset_] = 1.0 / (1.0 + std::pow(params.lambda, d));
}

RunResult run(const Triangulation& start, GibbsParams g, std::uint64_t seed, const RunOptions& opts,
              const std::function<void(const ChainState&)>& observer) {
  const auto t0 = std::chrono::steady_clock::now();
  ChainState c(start, seed);
  const HeatBathKernel k(start, g, opts.policy);
  std::optional<GroundState> gs;
  if (opts.track_b_triangles) gs = ground_state(start.constraints_ptr());

  RunResult out{start, {}, 0, 0, 0, 0.0};
  auto record = [&] {
    TracePoint p{c.steps, c.triangulation.total_length(), c.acceptance_rate(), -1};
    if (gs) p.b_triangles = classify(c.triangulation, *gs).b_count();
    out.trace.push_back(p);
    if (observer) observer(c);
  };
  if (opts.record_every == 0) {
    for (std::uint64_t i = 0; i < opts.steps; ++i) step(c, k);
  } else {
    std::uint64_t done = 0;
    while (done < opts.steps) {
      const std::uint64_t chunk = std::min(opts.record_every, opts.steps - done);
      for (std::uint64_t i = 0; i < chunk; ++i) step(c, k);
      done += chunk;
      if (chunk == opts.record_every) record();
    }
  }
  out.final_state = std::move(c.triangulation);
  out.steps = c.steps;
  out.proposals = c.proposals;
  out.flips = c.flips;
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

int coupled_step(Triangulation& a, Triangulation& b, std::mt19937_64& rng, const HeatBathKernel& k) {
  std::uniform_int_distribution<int> pick(0, k.active() - 1);
  const int slot = k.sites()[pick(rng)];
  const bool fa = a.is_flippable_slot(slot);
  const bool fb = b.is_flippable_slot(slot);
  if (!fa && !fb) return slot;
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  for (auto [t, f] : {std::pair<Triangulation*, bool>{&a, fa}, {&b, fb}}) {
    if (!f) continue;
    const auto& s = t->slot(slot);
    if (k.moves(s.edge, Edge(s.left, s.right), u)) t->flip_slot(slot);
  }
  return slot;
}

std::optional<std::uint64_t> coalescence_time(const Triangulation& a0, const Triangulation& b0, GibbsParams g,
                                              std::uint64_t seed, std::uint64_t cap, MidpointPolicy policy) {
  if (a0.grid() != b0.grid() || a0.constraints() != b0.constraints()) {
    throw std::invalid_argument("coupled chains need a common grid and constraint set");
  }
  Triangulation a = a0;
  Triangulation b = b0;
  long diff = 0;
  for (int slot : a.midpoint_slots()) diff += a.edge_at_slot(slot) != b.edge_at_slot(slot);
  if (diff == 0) return 0;
  const HeatBathKernel k(a, g, policy);
  auto rng = make_rng(seed);
  for (std::uint64_t t = 1; t <= cap; ++t) {
    std::uniform_int_distribution<int> pick(0, k.active() - 1);
    const int slot = k.sites()[pick(rng)];
    const bool before = a.edge_at_slot(slot) != b.edge_at_slot(slot);
    const bool fa = a.is_flippable_slot(slot);
    const bool fb = b.is_flippable_slot(slot);
    if (fa || fb) {
      const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      if (fa && k.moves(a.edge_at_slot(slot), *a.flip_target(slot), u)) a.flip_slot(slot);
      if (fb && k.moves(b.edge_at_slot(slot), *b.flip_target(slot), u)) b.flip_slot(slot);
    }
    const bool after = a.edge_at_slot(slot) != b.edge_at_slot(slot);
    diff += static_cast<long>(after) - static_cast<long>(before);
    if (diff == 0) return t;
  }
  return std::nullopt;
}

Triangulation long_edge_start(GridSpec grid) {
  ConstraintSet c(grid);
  c.add(Edge({0, 0}, {1, grid.cols}));
  const Triangulation seeded = complete(c);
  return Triangulation::from_edges(ConstraintSet(grid), seeded.edges());
}

std::optional<std::uint64_t> hitting_time_experiment(GridSpec grid, GibbsParams g, std::uint64_t seed,
                                                     std::uint64_t cap, MidpointPolicy policy) {
  ChainState c(long_edge_start(grid), seed);
  const HeatBathKernel k(c.triangulation, g, policy);
  const int x = grid.index(Midpoint{1, grid.cols});
  auto done = [&] { return orientation(c.triangulation.edge_at_slot(x)) != Orientation::Positive; };
  if (done()) return 0;
  while (c.steps < cap) {
    if (step(c, k) && done()) return c.steps;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Path coupling

namespace {

template <class Scalar>
class CouplingChecker {
 public:
  CouplingChecker(const FlipGraph& g, const Scalar& lambda, const Scalar& alpha, MidpointPolicy policy,
                  CouplingMetric metric)
      : g_(g), s_(g.space()), lambda_(lambda), alpha_(alpha), metric_(metric) {
    for (const Midpoint& x : midpoints(s_.grid())) {
      if (s_.constraints().contains(x)) continue;
      if (policy == MidpointPolicy::InteriorOnly && s_.grid().kind(x) == MidpointKind::Boundary) continue;
      active_sites_.push_back(s_.site_of_slot(s_.grid().index(x)));
    }
  }

  CouplingReportT<Scalar> run() {
    CouplingReportT<Scalar> r{static_cast<int>(active_sites_.size()), {}, Scalar(0), Scalar(0), 0, false};
    const Scalar n(static_cast<long>(active_sites_.size()));
    r.bound = Scalar(1) - Scalar(1) / (Scalar(2) * n);
    for (std::size_t i = 0; i < s_.size(); ++i) {
      for (const auto& arc : g_.neighbors(i)) {
        if (arc.target < i) continue;
        CouplingPair<Scalar> p;
        p.a = i;
        p.b = arc.target;
        p.site = static_cast<int>(arc.site);
        p.distance = weight(i, arc.target, p.site);
        p.expected = expected_after_step(i, arc.target) / n;
        const Scalar ratio = p.expected / p.distance;
        if (r.pairs.empty() || ratio > r.max_ratio) {
          r.max_ratio = ratio;
          r.worst = r.pairs.size();
        }
        r.pairs.push_back(std::move(p));
      }
    }
    r.contracts_to_bound = r.max_ratio <= r.bound;
    return r;
  }

 private:
  int metric_length(std::size_t state, int site) const {
    const Edge& e = s_.edge(state, site);
    return metric_ == CouplingMetric::L1 ? e.length() : std::abs(e.q.h - e.p.h);
  }

  Scalar weight(std::size_t a, std::size_t b, int site) const {
    using std::abs;
    const int la = metric_length(a, site);
    const int lb = metric_length(b, site);
    if (la == lb) return alpha_ * alpha_ - Scalar(1);
    if (metric_ == CouplingMetric::L1) return abs(Scalar(pow_int(alpha_, la) - pow_int(alpha_, lb)));
    return pow_int(alpha_, std::max(la, lb)) * (Scalar(1) - pow_int(alpha_, -2));
  }

  const std::vector<Scalar>& dijkstra(std::size_t src) {
    auto it = cache_.find(src);
    if (it != cache_.end()) return it->second;
    std::vector<Scalar> dist(s_.size());
    std::vector<char> seen(s_.size(), 0), done(s_.size(), 0);
    using Item = std::pair<Scalar, std::size_t>;
    auto cmp = [](const Item& x, const Item& y) { return y.first < x.first; };
    std::priority_queue<Item, std::vector<Item>, decltype(cmp)> pq(cmp);
    dist[src] = Scalar(0);
    seen[src] = 1;
    pq.emplace(Scalar(0), src);
    while (!pq.empty()) {
      const auto [d, u] = pq.top();
      pq.pop();
      if (done[u]) continue;
      done[u] = 1;
      for (const auto& arc : g_.neighbors(u)) {
        const Scalar nd = d + weight(u, arc.target, static_cast<int>(arc.site));
        if (!seen[arc.target] || nd < dist[arc.target]) {
          seen[arc.target] = 1;
          dist[arc.target] = nd;
          pq.emplace(nd, arc.target);
        }
      }
    }
    return cache_.emplace(src, std::move(dist)).first->second;
  }

  Scalar distance(std::size_t a, std::size_t b) {
    if (a == b) return Scalar(0);
    return dijkstra(a)[b];
  }

  std::optional<std::size_t> neighbor(std::size_t state, int site) const {
    for (const auto& arc : g_.neighbors(state)) {
      if (static_cast<int>(arc.site) == site) return arc.target;
    }
    return std::nullopt;
  }

  struct Move {
    std::optional<std::size_t> target;
    Scalar p_first;
    bool current_first = true;
  };

  Move move_at(std::size_t state, int site) const {
    Move m;
    m.target = neighbor(state, site);
    if (!m.target) return m;
    const Edge& cur = s_.edge(state, site);
    const Edge& nxt = s_.edge(*m.target, site);
    const int lc = cur.length();
    const int ln = nxt.length();
    m.current_first = lc < ln || (lc == ln && cur < nxt);
    const int d = m.current_first ? ln - lc : lc - ln;
    m.p_first = Scalar(1) / (Scalar(1) + pow_int(lambda_, d));
    return m;
  }

  std::size_t outcome(std::size_t state, const Move& m, const Scalar& hi) const {
    if (!m.target) return state;
    const bool pick_first = hi <= m.p_first;  // u in [lo, hi) lies below p_first
    return pick_first != m.current_first ? *m.target : state;
  }

  Scalar expected_after_step(std::size_t a, std::size_t b) {
    Scalar total(0);
    const Scalar base = distance(a, b);
    for (int site : active_sites_) {
      if (site < 0) {
        total += base;
        continue;
      }
      const Move ma = move_at(a, site);
      const Move mb = move_at(b, site);
      if (!ma.target && !mb.target) {
        total += base;
        continue;
      }
      std::vector<Scalar> cuts{Scalar(0), Scalar(1)};
      if (ma.target) cuts.push_back(ma.p_first);
      if (mb.target) cuts.push_back(mb.p_first);
      std::sort(cuts.begin(), cuts.end());
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const Scalar width = cuts[k + 1] - cuts[k];
        if (!(width > Scalar(0))) continue;
        total += width * distance(outcome(a, ma, cuts[k + 1]), outcome(b, mb, cuts[k + 1]));
      }
    }
    return total;
  }

  const FlipGraph& g_;
  const StateSpace& s_;
  Scalar lambda_;
  Scalar alpha_;
  CouplingMetric metric_;
  std::vector<int> active_sites_;  // site index, or -1 for fixed midpoints
  std::unordered_map<std::size_t, std::vector<Scalar>> cache_;
};

}  // namespace

template <class Scalar>
CouplingReportT<Scalar> path_coupling_check(const FlipGraph& g, const Scalar& lambda, const Scalar& alpha,
                                            MidpointPolicy policy, CouplingMetric metric) {
  if (!(alpha > Scalar(1))) throw std::invalid_argument("coupling metric needs alpha > 1");
  CouplingChecker<Scalar> checker(g, lambda, alpha, policy, metric);
  return checker.run();
}

template CouplingReportT<double> path_coupling_check<double>(const FlipGraph&, const double&, const double&,
                                                             MidpointPolicy, CouplingMetric);
template CouplingReportT<mpq_class> path_coupling_check<mpq_class>(const FlipGraph&, const mpq_class&,
                                                                   const mpq_class&, MidpointPolicy,
                                                                   CouplingMetric);

CouplingReport path_coupling_check(const FlipGraph& g, GibbsParams params, double alpha, MidpointPolicy policy) {
  return path_coupling_check<double>(g, params.lambda, alpha, policy, CouplingMetric::L1);
}

double one_dim_criterion(double lambda, double alpha) {
  const double l2 = lambda * lambda;
  return std::max(2.0 * alpha * l2 / (1.0 + l2), 2.0 / (alpha * (1.0 + l2)));
}

OneDimCouplingReport path_coupling_check_1d(const FlipGraph& g, GibbsParams params, double alpha,
                                            MidpointPolicy policy) {
  if (g.space().grid().rows != 1) throw std::invalid_argument("one-dimensional coupling check needs a 1 x n grid");
  OneDimCouplingReport out;
  out.report = path_coupling_check<double>(g, params.lambda, alpha, policy, CouplingMetric::Horizontal);
  const StateSpace& s = g.space();
  const int n = s.grid().cols;
  out.delta = n * (1.0 - out.report.max_ratio);
  for (const auto& p : out.report.pairs) {
    const Edge& ea = s.edge(p.a, p.site);
    const Edge& eb = s.edge(p.b, p.site);
    const double ratio = p.expected / p.distance;
    if (ea.p.h == ea.q.h || eb.p.h == eb.q.h) {
      ++out.vertical_pairs;
      out.max_ratio_vertical = std::max(out.max_ratio_vertical, ratio);
    } else {
      out.max_ratio_other = std::max(out.max_ratio_other, ratio);
    }
  }
  out.delta_other = n * (1.0 - out.max_ratio_other);
  out.criterion = one_dim_criterion(params.lambda, alpha);
  out.criterion_below_one = out.criterion < 1.0;
  out.contraction_confirmed = out.report.max_ratio < 1.0;
  return out;
}

}  // namespace lattri
