#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <gmpxx.h>

#include <algorithm>
#include <cmath>

#include "lattri/glauber.hpp"
#include "support.hpp"

using namespace lattri;
using namespace lattri::testing;

namespace {

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

/// Median coalescence time from the two unit-diagonal ground states; a capped run counts as infinite.
double median_coalescence(GridSpec g, double lambda, int runs, std::uint64_t cap) {
  const Triangulation a = ground_state(ConstraintSet(g)).triangulation;
  Triangulation b = a;
  for (const Midpoint& x : ground_state(ConstraintSet(g)).ties) b.flip_slot(g.index(x));
  std::vector<double> times;
  for (int s = 0; s < runs; ++s) {
    const auto t = coalescence_time(a, b, GibbsParams(lambda), 1000 + s, cap);
    times.push_back(t ? double(*t) : INFINITY);
  }
  return median(times);
}

}  // namespace

TEST_CASE("single steps") {
  const GridSpec g(1, 1);
  const Triangulation t0 = ground_state(ConstraintSet(g)).triangulation;
  const HeatBathKernel k(t0, GibbsParams(1.0), MidpointPolicy::FullLambda);
  CHECK(k.active() == 5);
  CHECK(k.choose_prob(2, 2) == 0.5);
  CHECK(k.choose_prob(1, 3) == doctest::Approx(0.5));
  const HeatBathKernel cold(t0, GibbsParams(0.5), MidpointPolicy::FullLambda);
  CHECK(cold.choose_prob(1, 3) == doctest::Approx(0.8));  // 1 / (1 + lambda^2)
  CHECK(cold.choose_prob(3, 1) == doctest::Approx(0.2));

  ChainState c(t0, 7);
  int unchanged = 0;
  for (int i = 0; i < 200; ++i) {
    const Triangulation before = c.triangulation;
    const auto steps_before = c.steps;
    const bool flipped = step(c, k);
    CHECK(c.steps == steps_before + 1);
    if (!flipped) {
      CHECK(c.triangulation == before);
      ++unchanged;
    }
    CHECK_FALSE(c.triangulation.check_invariants());
  }
  CHECK(unchanged > 0);
  CHECK(c.proposals <= c.steps);
  CHECK(c.flips <= c.proposals);
}

TEST_CASE("acceptance is one half at lambda 1") {
  const GridSpec g(6, 6);
  const Triangulation t0 = ground_state(ConstraintSet(g)).triangulation;
  const RunResult r = run(t0, GibbsParams(1.0), 3, RunOptions{200'000});
  const double rate = double(r.flips) / r.proposals;
  CHECK(rate == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("1x1 frequencies") {
  const GridSpec g(1, 1);
  const Triangulation t0 = ground_state(ConstraintSet(g)).triangulation;
  const HeatBathKernel k(t0, GibbsParams(0.3), MidpointPolicy::FullLambda);
  ChainState c(t0, 11);
  long in_start = 0;
  const long n = 100'000;
  for (long i = 0; i < n; ++i) {
    step(c, k);
    in_start += c.triangulation == t0;
  }
  CHECK(double(in_start) / n == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("run is deterministic and steps=0 is the identity") {
  const GridSpec g(4, 5);
  const Triangulation t0 = ground_state(ConstraintSet(g)).triangulation;
  const RunResult zero = run(t0, GibbsParams(2.0), 1, RunOptions{0});
  CHECK(zero.final_state == t0);
  CHECK(zero.steps == 0);

  RunOptions ro;
  ro.steps = 50'000;
  ro.record_every = 1000;
  ro.track_b_triangles = true;
  const RunResult a = run(t0, GibbsParams(1.3), 42, ro);
  const RunResult b = run(t0, GibbsParams(1.3), 42, ro);
  const RunResult c = run(t0, GibbsParams(1.3), 43, ro);
  CHECK(a.final_state == b.final_state);
  CHECK(a.flips == b.flips);
  REQUIRE(a.trace.size() == 50);
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].step == (i + 1) * 1000);
    CHECK(a.trace[i].total_length == b.trace[i].total_length);
    CHECK(a.trace[i].b_triangles == b.trace[i].b_triangles);
    CHECK(a.trace[i].b_triangles >= 0);
  }
  CHECK(a.trace.back().total_length == a.final_state.total_length());
  CHECK_FALSE(a.final_state == c.final_state);

  int observed = 0;
  (void)run(t0, GibbsParams(1.3), 42, ro, [&](const ChainState& s) {
    ++observed;
    CHECK(s.steps == std::uint64_t(observed) * 1000);
  });
  CHECK(observed == 50);
}

TEST_CASE("independent streams") {
  auto a = make_rng(5, 0);
  auto b = make_rng(5, 1);
  auto c = make_rng(5, 0);
  const auto x = a();
  CHECK(x != b());
  CHECK(x == c());
}

TEST_CASE("sampler matches the exact distribution on 2x2") {
  const ConstraintSet c{GridSpec(2, 2)};
  const StateSpace s = enumerate_triangulations(c);
  const ExactDistribution d(s, GibbsParams(0.5));
  for (std::uint64_t seed : {1, 2, 3}) {
    std::vector<double> counts(s.size(), 0.0);
    RunOptions ro;
    ro.steps = 20'000'000;
    ro.record_every = 100;
    double total = 0;
    (void)run(ground_state(c).triangulation, GibbsParams(0.5), seed, ro, [&](const ChainState& st) {
      counts[*s.find(st.triangulation)] += 1;
      total += 1;
    });
    double tv = 0;
    for (std::size_t i = 0; i < s.size(); ++i) tv += std::abs(counts[i] / total - d.prob(i));
    CHECK(tv / 2 <= 0.02);
  }
}

TEST_CASE("one-step frequencies match the transition matrix on 1x2") {
  const StateSpace s = enumerate_triangulations(ConstraintSet(GridSpec(1, 2)));
  const FlipGraph g(s);
  const GibbsParams params(0.6);
  const TransitionMatrix P = transition_matrix(g, params, MidpointPolicy::FullLambda);
  for (std::size_t start = 0; start < s.size(); start += 5) {
    const Triangulation t0 = s.triangulation(start);
    const HeatBathKernel k(t0, params, MidpointPolicy::FullLambda);
    ChainState c(t0, 17 + start);
    std::vector<double> counts(s.size(), 0.0);
    const int trials = 1'000'000;
    for (int i = 0; i < trials; ++i) {
      c.triangulation = t0;
      step(c, k);
      counts[*s.find(c.triangulation)] += 1;
    }
    for (std::size_t j = 0; j < s.size(); ++j) {
      const double p = P.P.coeff(start, j);
      const double se = std::sqrt(std::max(p * (1 - p), 1e-12) / trials);
      CHECK(std::abs(counts[j] / trials - p) <= 3 * se + 1e-9);
    }
  }
}

TEST_CASE("coupled steps") {
  const GridSpec g(3, 3);
  std::mt19937_64 rng(5);
  const Triangulation t0 = ground_state(ConstraintSet(g)).triangulation;
  const HeatBathKernel k(t0, GibbsParams(0.8), MidpointPolicy::FullLambda);
  {
    Triangulation a = t0, b = t0;
    for (int i = 0; i < 5000; ++i) {
      coupled_step(a, b, rng, k);
      REQUIRE(a == b);
    }
  }
  // once together, always together
  {
    Triangulation a = t0;
    Triangulation b = run(t0, GibbsParams(1.0), 9, RunOptions{3000}).final_state;
    bool met = false;
    for (int i = 0; i < 300'000; ++i) {
      coupled_step(a, b, rng, k);
      if (met) REQUIRE(a == b);
      met |= a == b;
    }
    CHECK(met);
  }
  // each coupled chain moves by the heat-bath kernel on its own
  {
    const StateSpace s = enumerate_triangulations(ConstraintSet(GridSpec(1, 2)));
    const GibbsParams params(0.6);
    const TransitionMatrix P = transition_matrix(FlipGraph(s), params, MidpointPolicy::FullLambda);
    const Triangulation a0 = s.triangulation(1);
    const Triangulation b0 = s.triangulation(4);
    const HeatBathKernel k12(a0, params, MidpointPolicy::FullLambda);
    std::vector<double> ca(s.size(), 0.0), cb(s.size(), 0.0);
    const int trials = 400'000;
    for (int i = 0; i < trials; ++i) {
      Triangulation a = a0, b = b0;
      const int slot = coupled_step(a, b, rng, k12);
      CHECK(std::find(k12.sites().begin(), k12.sites().end(), slot) != k12.sites().end());
      ca[*s.find(a)] += 1;
      cb[*s.find(b)] += 1;
    }
    for (std::size_t j = 0; j < s.size(); ++j) {
      for (auto [row, counts] : {std::pair<std::size_t, const std::vector<double>*>{1, &ca}, {4, &cb}}) {
        const double p = P.P.coeff(row, j);
        const double se = std::sqrt(std::max(p * (1 - p), 1e-12) / trials);
        CHECK(std::abs((*counts)[j] / trials - p) <= 4 * se + 1e-9);
      }
    }
  }
}

TEST_CASE("coupled distance on 1x1") {
  const StateSpace s = enumerate_triangulations(ConstraintSet(GridSpec(1, 1)));
  const FlipGraph g(s);
  for (double l : {0.125, 1.0, 3.0}) {
    const auto r = path_coupling_check(g, GibbsParams(l), 8.0);
    REQUIRE(r.pairs.size() == 1);
    CHECK(r.pairs[0].distance == doctest::Approx(63.0));
    CHECK(r.pairs[0].expected == doctest::Approx(63.0 * (1 - 1.0 / 5)));
  }
}

TEST_CASE("path coupling contracts at alpha 8 and lambda 1/8") {
  const mpq_class lambda(1, 8), alpha(8);
  auto check_space = [&](std::shared_ptr<const ConstraintSet> c) {
    const StateSpace s = enumerate_triangulations(c);
    const FlipGraph g(s);
    const auto r = path_coupling_check<mpq_class>(g, lambda, alpha, MidpointPolicy::FullLambda);
    CHECK(r.bound == mpq_class(1) - mpq_class(1, 2 * r.active));
    CHECK(r.max_ratio <= r.bound);
    CHECK(r.contracts_to_bound);
    for (const auto& p : r.pairs) {
      const Edge ea = s.edge(p.a, p.site);
      const Edge eb = s.edge(p.b, p.site);
      if (ea.is_unit_diagonal() && eb.is_unit_diagonal()) CHECK(p.distance == 63);
      CHECK(p.expected <= p.distance * r.bound);
    }
    return r;
  };
  const auto r22 = check_space(std::make_shared<ConstraintSet>(GridSpec(2, 2)));
  CHECK(r22.max_ratio == mpq_class(991, 1040));
  const auto r14 = check_space(std::make_shared<ConstraintSet>(GridSpec(1, 4)));
  CHECK(r14.max_ratio == mpq_class(1056, 1105));
  std::mt19937_64 rng(111);
  int nontrivial = 0;
  while (nontrivial < 20) nontrivial += !check_space(random_constraints(GridSpec(2, 2), rng, 0.3)).pairs.empty();

  const auto approx = path_coupling_check(FlipGraph(enumerate_triangulations(ConstraintSet(GridSpec(2, 2)))),
                                          GibbsParams(0.125), 8.0);
  CHECK(approx.max_ratio == doctest::Approx(991.0 / 1040));
}

TEST_CASE("one-dimensional criterion") {
  CHECK(one_dim_criterion(0.9, 1.111111) < 1);
  for (double a = 1.01; a < 20; a *= 1.05) CHECK(one_dim_criterion(1.0, a) >= 1);
  const double a = 1.3;
  CHECK(one_dim_criterion(0.5, a) == doctest::Approx(std::max(2 * a * 0.25 / 1.25, 2 / (a * 1.25))));
}

TEST_CASE("one-dimensional coupling: vertical discrepancies do not contract") {
  const StateSpace s = enumerate_triangulations(ConstraintSet(GridSpec(1, 4)));
  const FlipGraph g(s);
  const auto r = path_coupling_check_1d(g, GibbsParams(0.9), 1.111111);
  CHECK(r.criterion_below_one);
  CHECK(r.vertical_pairs > 0);
  // pairs with a vertical edge at the discrepancy keep their expected distance
  CHECK(r.max_ratio_vertical == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.max_ratio_other < 1);
  CHECK(r.delta_other > 0);
  CHECK_FALSE(r.contraction_confirmed);

  const auto flat = path_coupling_check_1d(g, GibbsParams(1.0), 1.111111);
  CHECK_FALSE(flat.criterion_below_one);

  // the metric at a unit discrepancy coincides with the unit-diagonal case
  const auto exact = path_coupling_check<mpq_class>(g, mpq_class(9, 10), mpq_class(3, 2), MidpointPolicy::FullLambda,
                                                    CouplingMetric::Horizontal);
  for (const auto& p : exact.pairs) {
    const Edge ea = s.edge(p.a, p.site);
    const Edge eb = s.edge(p.b, p.site);
    if (ea.is_unit_diagonal() && eb.is_unit_diagonal()) CHECK(p.distance == mpq_class(9, 4) - 1);
  }
}

TEST_CASE("coalescence") {
  const GridSpec g(2, 2);
  const Triangulation t0 = ground_state(ConstraintSet(g)).triangulation;
  CHECK(coalescence_time(t0, t0, GibbsParams(0.5), 1, 10) == std::optional<std::uint64_t>(0));
  CHECK(median_coalescence(g, 0.125, 100, 100'000) <= 1e4);
  const double hot = median_coalescence(GridSpec(4, 4), 2.0, 21, 400'000);
  const double cold = median_coalescence(GridSpec(4, 4), 0.125, 21, 400'000);
  MESSAGE("4x4 median coalescence: lambda 2 " << hot << ", lambda 1/8 " << cold);
  CHECK(hot > cold);
}

TEST_CASE("hitting time") {
  const GridSpec g(1, 4);
  const Triangulation start = long_edge_start(g);
  CHECK(start.edge(Midpoint{1, 4}) == Edge({0, 0}, {1, 4}));
  CHECK(orientation(start.edge(Midpoint{1, 4})) == Orientation::Positive);

  // lower bound: flips needed to reach any target state
  const StateSpace s = enumerate_triangulations(ConstraintSet(g));
  int nearest = INT32_MAX;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Triangulation t = s.triangulation(i);
    if (orientation(t.edge(Midpoint{1, 4})) != Orientation::Positive) nearest = std::min(nearest, flip_distance(start, t));
  }
  CHECK(nearest >= 1);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto h = hitting_time_experiment(g, GibbsParams(1.0), seed, 10'000'000);
    REQUIRE(h);
    CHECK(*h >= std::uint64_t(nearest));
  }

  std::vector<double> medians;
  for (int m = 1; m <= 3; ++m) {
    std::vector<double> times;
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
      const auto h = hitting_time_experiment(GridSpec(m, 8), GibbsParams(1.0), seed, 50'000'000);
      times.push_back(h ? double(*h) : INFINITY);
    }
    medians.push_back(median(times));
    MESSAGE("m=" << m << " n=8 median hitting time " << medians.back());
  }
  CHECK(medians[1] > medians[0]);
  CHECK(medians[2] > medians[1]);

  CHECK_FALSE(hitting_time_experiment(GridSpec(2, 8), GibbsParams(2.0), 1, 20'000).has_value());
}

#ifdef NDEBUG
TEST_CASE("throughput on 50x50") {
  const Triangulation t0 = ground_state(ConstraintSet(GridSpec(50, 50))).triangulation;
  const RunResult warm = run(t0, GibbsParams(1.0), 1, RunOptions{2'000'000});
  const RunResult r = run(warm.final_state, GibbsParams(1.0), 2, RunOptions{20'000'000});
  const double rate = double(r.steps) / r.seconds;
  MESSAGE("attempted flips per second: " << rate);
  CHECK(rate >= 1e7);
}
#endif
