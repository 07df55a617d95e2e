#include "lattri/gibbs.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <limits>
#include <sstream>

namespace lattri {

GibbsParams::GibbsParams(double l) : lambda(l) {
  if (!(l > 0.0) || !std::isfinite(l)) throw std::invalid_argument("lambda must be positive and finite");
}

double log_sum_exp(const std::vector<double>& xs) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : xs) hi = std::max(hi, x);
  if (!std::isfinite(hi)) return hi;
  double sum = 0.0;
  double comp = 0.0;
  for (double x : xs) {
    const double term = std::exp(x - hi);
    const double t = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return hi + std::log(sum + comp);
}

ExactDistribution::ExactDistribution(const StateSpace& space, GibbsParams params)
    : space_(&space), params_(params) {
  const std::size_t n = space.size();
  std::int64_t min_len = n ? space.total_length(0) : 0;
  for (std::size_t i = 1; i < n; ++i) min_len = std::min(min_len, space.total_length(i));
  const double log_l = std::log(params.lambda);
  std::vector<double> logw(n);
  for (std::size_t i = 0; i < n; ++i) logw[i] = static_cast<double>(space.total_length(i) - min_len) * log_l;
  log_z_ = log_sum_exp(logw);
  probs_.resize(n);
  for (std::size_t i = 0; i < n; ++i) probs_[i] = std::exp(logw[i] - log_z_);
}

ExactDistribution ExactDistribution::conditional(Midpoint x, const Edge& e) const {
  const int slot = space_->grid().index(x);
  const int site = space_->site_of_slot(slot);
  std::vector<double> p(probs_.size(), 0.0);
  std::vector<double> kept;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    const bool match = site < 0 ? space_->fixed_edge(slot) == e : space_->edge(i, site) == e;
    if (match && probs_[i] > 0.0) {
      p[i] = probs_[i];
      kept.push_back(std::log(probs_[i]));
    }
  }
  if (kept.empty()) {
    std::ostringstream msg;
    msg << "no state in the support has edge " << e << " at " << x;
    throw std::domain_error(msg.str());
  }
  const double log_mass = log_sum_exp(kept);
  for (double& v : p) {
    if (v > 0.0) v = std::exp(std::log(v) - log_mass);
  }
  ExactDistribution out(*space_, params_, std::move(p));
  out.log_z_ = log_z_ + log_mass;
  return out;
}

ExactDistribution exact_distribution(const StateSpace& s, GibbsParams g) { return ExactDistribution(s, g); }

ExactDistribution conditional(const ExactDistribution& d, Midpoint x, const Edge& e) {
  return d.conditional(x, e);
}

double tv_marginal(const ExactDistribution& d1, const ExactDistribution& d2, const std::vector<Midpoint>& A) {
  if (&d1.space() != &d2.space()) throw std::invalid_argument("distributions live on different state spaces");
  const StateSpace& s = d1.space();
  std::vector<int> sites;
  for (const Midpoint& x : A) {
    const int site = s.site_of_slot(s.grid().index(x));
    if (site >= 0) sites.push_back(site);  // fixed midpoints carry no information
  }
  std::map<std::string, double> diff;
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::string key;
    const auto code = s.code(i);
    for (int site : sites) key.push_back(static_cast<char>(code[site]));
    diff[key] += d1.prob(i) - d2.prob(i);
  }
  double tv = 0.0;
  for (const auto& [k, v] : diff) tv += std::abs(v);
  return tv / 2.0;
}

std::map<int, TailEntry> tail_laws(const ExactDistribution& d, Midpoint x) {
  const StateSpace& s = d.space();
  const GroundState gs = ground_state(s.constraints_ptr());
  const int min_len = gs.min_length[s.grid().index(x)];
  std::map<int, TailEntry> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (d.prob(i) == 0.0) continue;
    const Triangulation t = s.triangulation(i);
    out[t.edge(x).length() - min_len].length_excess += d.prob(i);
    const auto dec = classify(t, gs);
    out[static_cast<int>(phi_x(t, dec, gs, x))].phi += d.prob(i);
  }
  return out;
}

double set_inclusion_prob(const ExactDistribution& d, const std::vector<Triangle>& V) {
  if (V.empty()) return 1.0;
  const StateSpace& s = d.space();
  const GroundState gs = ground_state(s.constraints_ptr());
  double p = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (d.prob(i) == 0.0) continue;
    const auto dec = classify(s.triangulation(i), gs);
    bool covered = true;
    for (std::size_t k = 0; k < dec.triangles.size() && covered; ++k) {
      if (dec.labels[k] != TriangleLabel::G) continue;
      for (const Triangle& v : V) {
        if (interiors_intersect(dec.triangles[k], v)) {
          covered = false;
          break;
        }
      }
    }
    if (covered) p += d.prob(i);
  }
  return p;
}

std::string to_string(MidpointPolicy p) { return p == MidpointPolicy::FullLambda ? "full" : "interior"; }

MidpointPolicy parse_policy(const std::string& s) {
  if (s == "full") return MidpointPolicy::FullLambda;
  if (s == "interior") return MidpointPolicy::InteriorOnly;
  throw std::invalid_argument("unknown midpoint policy '" + s + "' (expected full or interior)");
}

int active_count(const ConstraintSet& c, MidpointPolicy policy) {
  int count = 0;
  for (const Midpoint& x : midpoints(c.grid())) {
    if (c.contains(x)) continue;
    if (policy == MidpointPolicy::InteriorOnly && c.grid().kind(x) == MidpointKind::Boundary) continue;
    ++count;
  }
  return count;
}

TransitionMatrix transition_matrix(const FlipGraph& g, GibbsParams params, MidpointPolicy policy) {
  const StateSpace& s = g.space();
  TransitionMatrix out;
  out.policy = policy;
  out.active = active_count(s.constraints(), policy);
  const double inv = 1.0 / out.active;
  std::vector<Eigen::Triplet<double>> trips;
  for (std::size_t i = 0; i < s.size(); ++i) {
    double off = 0.0;
    for (const auto& a : g.neighbors(i)) {
      const int li = s.edge(i, static_cast<int>(a.site)).length();
      const int lj = s.edge(a.target, static_cast<int>(a.site)).length();
      const double p = heat_bath_prob(params.lambda, li, lj) * inv;
      off += p;
      trips.emplace_back(static_cast<int>(i), static_cast<int>(a.target), p);
    }
    trips.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0 - off);
  }
  const auto n = static_cast<Eigen::Index>(s.size());
  out.P.resize(n, n);
  out.P.setFromTriplets(trips.begin(), trips.end());
  out.P.makeCompressed();
  return out;
}

MixingReport mixing_time_exact(const TransitionMatrix& P, const ExactDistribution& d, long max_steps) {
  MixingReport report;
  report.policy = P.policy;
  const Eigen::Index n = P.P.rows();
  const Eigen::Map<const Eigen::RowVectorXd> mu(d.probabilities().data(), n);
  Eigen::MatrixXd D = Eigen::MatrixXd::Identity(n, n);  // one row per start
  auto worst = [&](std::size_t& arg) {
    const Eigen::VectorXd tv = 0.5 * (D.rowwise() - mu).cwiseAbs().rowwise().sum();
    Eigen::Index k = 0;
    const double w = tv.maxCoeff(&k);
    arg = static_cast<std::size_t>(k);
    return w;
  };
  std::size_t arg = 0;
  double w = worst(arg);
  report.worst_tv.push_back(w);
  long t = 0;
  while (w > 0.25 && t < max_steps) {
    D = D * P.P;
    ++t;
    w = worst(arg);
    report.worst_tv.push_back(w);
  }
  report.worst_start = arg;
  if (w <= 0.25) report.t_mix = t;

  if (n >= 2 && n <= 2000) {
    // Symmetrise with D^(1/2) P D^(-1/2); reversibility makes it self-adjoint.
    const Eigen::VectorXd sq = mu.transpose().cwiseSqrt();
    Eigen::MatrixXd S = Eigen::MatrixXd(P.P);
    S = sq.asDiagonal() * S * sq.cwiseInverse().asDiagonal();
    S = 0.5 * (S + S.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = es.eigenvalues();  // ascending; ev(n-1) = 1
    const double second = std::max(std::abs(ev(0)), std::abs(ev(n - 2)));
    if (second < 1.0) report.relaxation_time = 1.0 / (1.0 - second);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Herringbone set and conductance

bool HerringboneSet::applies_at(Midpoint x) const {
  if (x.dv % 2 == 0 || grid.kind(x) == MidpointKind::Boundary) return false;
  if (epsilon) {
    const double h = x.dh / 2.0;
    if (h < *epsilon * grid.cols || h > (1.0 - *epsilon) * grid.cols) return false;
  }
  return true;
}

bool HerringboneSet::allows(Midpoint x, const Edge& e) const {
  if (!applies_at(x)) return true;
  const bool odd_layer = ((x.dv + 1) / 2) % 2 == 1;
  const Orientation o = orientation(e);
  return odd_layer ? o != Orientation::Positive : o != Orientation::Negative;
}

bool HerringboneSet::contains(const Triangulation& t) const {
  for (int s : t.midpoint_slots()) {
    const Midpoint x = grid.midpoint_at(s);
    if (!allows(x, t.edge_at_slot(s))) return false;
  }
  return true;
}

BottleneckReport conductance_ratio(const StateSpace& s, GibbsParams g, const StatePredicate& in_a,
                                   std::string description) {
  BottleneckReport r;
  r.description = std::move(description);
  std::int64_t min_len = s.total_length(0);
  for (std::size_t i = 1; i < s.size(); ++i) min_len = std::min(min_len, s.total_length(i));
  const double log_l = std::log(g.lambda);
  std::vector<double> all, in, boundary;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double lw = static_cast<double>(s.total_length(i) - min_len) * log_l;
    all.push_back(lw);
    Triangulation t = s.triangulation(i);
    if (!in_a(t)) continue;
    in.push_back(lw);
    bool exits = false;
    for (int site = 0; site < s.site_count() && !exits; ++site) {
      const int slot = s.site_slots()[site];
      if (!t.is_flippable_slot(slot)) continue;
      t.flip_slot(slot);
      exits = !in_a(t);
      t.flip_slot(slot);
    }
    if (exits) boundary.push_back(lw);
  }
  if (in.empty()) throw std::domain_error("set " + r.description + " is empty");
  r.size_a = in.size();
  r.size_boundary = boundary.size();
  r.log_z_a = log_sum_exp(in);
  r.log_z_boundary = log_sum_exp(boundary);
  r.ratio = boundary.empty() ? 0.0 : std::exp(r.log_z_boundary - r.log_z_a);
  r.mu_a = std::exp(r.log_z_a - log_sum_exp(all));
  r.mu_a_at_most_half = r.mu_a <= 0.5;
  return r;
}

}  // namespace lattri
