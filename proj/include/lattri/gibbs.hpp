#ifndef LATTRI_GIBBS_HPP
#define LATTRI_GIBBS_HPP

#include <Eigen/Sparse>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lattri/flip_graph.hpp"
#include "lattri/structure.hpp"

namespace lattri {

struct GibbsParams {
  double lambda = 1.0;

  explicit GibbsParams(double l = 1.0);
};

/// Exact Gibbs measure mu(sigma) proportional to lambda^|sigma| over an
/// enumerated state space. The space must outlive the distribution.
class ExactDistribution {
 public:
  ExactDistribution(const StateSpace& space, GibbsParams params);

  const StateSpace& space() const { return *space_; }
  std::size_t size() const { return probs_.size(); }
  double prob(std::size_t state) const { return probs_[state]; }
  const std::vector<double>& probabilities() const { return probs_; }
  /// log Z relative to lambda^(min |sigma|).
  double log_partition() const { return log_z_; }
  const GibbsParams& params() const { return params_; }

  /// Restriction to states with the given edge at x, renormalised.
  /// Throws std::domain_error when no state in the support has that edge.
  ExactDistribution conditional(Midpoint x, const Edge& e) const;

 private:
  ExactDistribution(const StateSpace& space, GibbsParams params, std::vector<double> probs)
      : space_(&space), params_(params), probs_(std::move(probs)) {}

  const StateSpace* space_;
  GibbsParams params_;
  std::vector<double> probs_;
  double log_z_ = 0.0;
};

ExactDistribution exact_distribution(const StateSpace& s, GibbsParams g);
ExactDistribution conditional(const ExactDistribution& d, Midpoint x, const Edge& e);

/// Neumaier-compensated log-sum-exp.
double log_sum_exp(const std::vector<double>& xs);

/// Total variation distance between the joint laws of the edges at A.
double tv_marginal(const ExactDistribution& d1, const ExactDistribution& d2, const std::vector<Midpoint>& A);

struct TailEntry {
  double length_excess = 0.0;  // mu(|sigma_x| = |ground_x| + k)
  double phi = 0.0;            // mu(phi_x = k)
};

std::map<int, TailEntry> tail_laws(const ExactDistribution& d, Midpoint x);

/// mu(V is covered by B-triangles), V a set of ground-state triangles.
double set_inclusion_prob(const ExactDistribution& d, const std::vector<Triangle>& V);

enum class MidpointPolicy { FullLambda, InteriorOnly };

std::string to_string(MidpointPolicy p);
MidpointPolicy parse_policy(const std::string& s);

/// Number of midpoints proposed by the chain: every non-constraint midpoint
/// (boundary included) or only the free interior ones.
int active_count(const ConstraintSet& c, MidpointPolicy policy);

struct TransitionMatrix {
  Eigen::SparseMatrix<double, Eigen::RowMajor> P;
  int active = 0;
  MidpointPolicy policy = MidpointPolicy::FullLambda;
};

TransitionMatrix transition_matrix(const FlipGraph& g, GibbsParams params, MidpointPolicy policy);

template <class Scalar>
Scalar pow_int(const Scalar& base, int k) {
  Scalar out(1);
  Scalar b(base);
  int e = k < 0 ? -k : k;
  while (e > 0) {
    if (e & 1) out *= b;
    b *= b;
    e >>= 1;
  }
  if (k < 0) out = Scalar(1) / out;
  return out;
}

template <class Scalar>
struct ChainResiduals {
  Scalar detailed_balance;  // max |mu(s)P(s,t) - mu(t)P(t,s)|
  Scalar stationarity;      // max |(mu P)(t) - mu(t)|
  Scalar row_sum;           // max |sum_t P(s,t) - 1|
  Scalar total_mass;        // |sum mu - 1|
};

/// Reversibility and stationarity residuals of the heat-bath chain computed in
/// Scalar arithmetic. With a rational Scalar every residual is exactly zero.
template <class Scalar>
ChainResiduals<Scalar> chain_residuals(const FlipGraph& g, const Scalar& lambda, int active) {
  using std::abs;
  const StateSpace& s = g.space();
  const std::size_t n = s.size();
  std::int64_t min_len = s.total_length(0);
  for (std::size_t i = 1; i < n; ++i) min_len = std::min(min_len, s.total_length(i));

  std::vector<Scalar> mu(n);
  Scalar z(0);
  for (std::size_t i = 0; i < n; ++i) {
    mu[i] = pow_int(lambda, static_cast<int>(s.total_length(i) - min_len));
    z += mu[i];
  }
  for (auto& m : mu) m /= z;

  const Scalar inv_active = Scalar(1) / Scalar(active);
  auto heat = [&](int cur, int next) -> Scalar { return Scalar(1) / (Scalar(1) + pow_int(lambda, cur - next)) * inv_active; };

  ChainResiduals<Scalar> r{Scalar(0), Scalar(0), Scalar(0), Scalar(0)};
  Scalar mass(0);
  std::vector<Scalar> flow(n, Scalar(0));
  for (std::size_t i = 0; i < n; ++i) {
    mass += mu[i];
    Scalar off(0);
    for (const auto& a : g.neighbors(i)) {
      const int li = s.edge(i, static_cast<int>(a.site)).length();
      const int lj = s.edge(a.target, static_cast<int>(a.site)).length();
      const Scalar pij = heat(li, lj);
      const Scalar pji = heat(lj, li);
      off += pij;
      flow[a.target] += mu[i] * pij;
      Scalar db = abs(Scalar(mu[i] * pij - mu[a.target] * pji));
      if (db > r.detailed_balance) r.detailed_balance = db;
    }
    const Scalar diag = Scalar(1) - off;
    flow[i] += mu[i] * diag;
    Scalar rs = abs(Scalar(diag + off - Scalar(1)));
    if (rs > r.row_sum) r.row_sum = rs;
  }
  for (std::size_t j = 0; j < n; ++j) {
    Scalar st = abs(Scalar(flow[j] - mu[j]));
    if (st > r.stationarity) r.stationarity = st;
  }
  r.total_mass = abs(Scalar(mass - Scalar(1)));
  return r;
}

struct MixingReport {
  /// Least t with worst-start TV at most 1/4; -1 when not reached by max_steps.
  long t_mix = -1;
  /// Worst-start TV at t = 0, 1, ..., t_mix.
  std::vector<double> worst_tv;
  std::size_t worst_start = 0;
  MidpointPolicy policy = MidpointPolicy::FullLambda;
  /// 1 / spectral gap, for state spaces small enough to diagonalise.
  std::optional<double> relaxation_time;
};

MixingReport mixing_time_exact(const TransitionMatrix& P, const ExactDistribution& d, long max_steps = 10'000'000);

/// Alternating-orientation layers: at every internal midpoint with
/// half-integer height v, the edge is not positively oriented when v + 1/2 is
/// odd and not negatively oriented when it is even. An epsilon restricts the
/// rule to midpoints with horizontal coordinate in [eps n, (1 - eps) n].
struct HerringboneSet {
  GridSpec grid;
  std::optional<double> epsilon;

  bool applies_at(Midpoint x) const;
  bool allows(Midpoint x, const Edge& e) const;
  bool contains(const Triangulation& t) const;
};

using StatePredicate = std::function<bool(const Triangulation&)>;

struct BottleneckReport {
  std::string description;
  std::size_t size_a = 0;
  std::size_t size_boundary = 0;
  double log_z_a = 0.0;         // log-domain, shared offset with log_z_boundary
  double log_z_boundary = 0.0;  // -inf when the boundary is empty
  double ratio = 0.0;           // Z(boundary) / Z(A)
  double mu_a = 0.0;
  bool mu_a_at_most_half = false;
};

/// Exact Z(A), Z(boundary A) and mu(A); boundary states are members of A with
/// a flip leading out of A. Throws std::domain_error when A is empty.
BottleneckReport conductance_ratio(const StateSpace& s, GibbsParams g, const StatePredicate& in_a,
                                   std::string description = "A");

}  // namespace lattri

#endif  // LATTRI_GIBBS_HPP
