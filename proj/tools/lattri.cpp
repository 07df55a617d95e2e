// lattri: command-line driver for the lattice triangulation library.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "lattri/io.hpp"

using namespace lattri;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kUsage = 1, kValidation = 2, kCap = 3 };

struct Common {
  std::string grid = "2x2";
  std::string constraints;
  double lambda = 1.0;
  double alpha = 8.0;
  std::uint64_t seed = 1;
  std::uint64_t steps = 0;
  std::string policy = "full";
  std::string out;
  std::string svg;
  std::optional<double> epsilon;
  std::string manifest = "lattri_manifest.json";
};

struct Context {
  Common opt;
  io::RunManifest manifest;
  std::vector<std::string> outputs;

  GridSpec grid() const { return io::parse_grid(opt.grid); }
  GibbsParams params() const { return GibbsParams(opt.lambda); }
  MidpointPolicy policy() const { return parse_policy(opt.policy); }

  std::shared_ptr<const ConstraintSet> constraints() const {
    if (opt.constraints.empty()) return std::make_shared<const ConstraintSet>(grid());
    auto c = std::make_shared<const ConstraintSet>(io::load_constraints(opt.constraints));
    if (c->grid() != grid()) throw ValidationError("constraint file grid does not match --grid " + opt.grid);
    return c;
  }

  void emit(const std::string& path, std::string_view text) {
    io::write_text(path, text);
    outputs.push_back(path);
  }
  void emit_json(const std::string& path, const io::json& j) { emit(path, j.dump(2) + "\n"); }
};

Midpoint parse_midpoint(const std::string& s) {
  std::istringstream in(s);
  double v = 0, h = 0;
  char comma = 0;
  if (!(in >> v >> comma >> h) || comma != ',' || std::floor(2 * v) != 2 * v || std::floor(2 * h) != 2 * h) {
    throw std::invalid_argument("midpoint must look like V,H with half-integer coordinates, got '" + s + "'");
  }
  return Midpoint{static_cast<int>(2 * v), static_cast<int>(2 * h)};
}

std::vector<Midpoint> parse_midpoints(const std::string& s) {
  std::vector<Midpoint> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ';')) {
    if (!item.empty()) out.push_back(parse_midpoint(item));
  }
  return out;
}

Edge parse_edge(const std::string& s) {
  int a = 0, b = 0, c = 0, d = 0;
  char x1 = 0, x2 = 0, x3 = 0;
  std::istringstream in(s);
  if (!(in >> a >> x1 >> b >> x2 >> c >> x3 >> d) || x1 != ',' || x2 != ':' || x3 != ',') {
    throw std::invalid_argument("edge must look like V,H:V,H, got '" + s + "'");
  }
  return Edge({a, b}, {c, d});
}

void check_midpoint(const GridSpec& g, Midpoint x) {
  if (!g.contains(x) || (x.dv % 2 == 0 && x.dh % 2 == 0)) {
    std::ostringstream msg;
    msg << "midpoint " << x << " is not an edge midpoint of the grid";
    throw ValidationError(msg.str());
  }
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

// ---------------------------------------------------------------------------
// Subcommands

struct EnumerateArgs {
  bool count_only = false;
  bool reverse = false;
  std::uint64_t cap = 5'000'000;
};

int cmd_enumerate(Context& ctx, const EnumerateArgs& a) {
  auto c = ctx.constraints();
  EnumerationOptions opts{a.cap, a.reverse};
  if (a.count_only) {
    const auto n = count_triangulations(*c, opts);
    std::cout << n << "\n";
    ctx.manifest.results["count"] = n;
    return kOk;
  }
  const StateSpace s = enumerate_triangulations(c, opts);
  const FlipGraph g(s);
  std::cout << "states " << s.size() << "\n";
  std::cout << "flip_edges " << g.edge_count() << "\n";
  std::cout << "connected " << (g.is_connected() ? "yes" : "no") << "\n";
  std::cout << "max_branching " << s.stats().max_branching << "\n";
  ctx.manifest.results = {{"count", s.size()}, {"flip_edges", g.edge_count()}, {"connected", g.is_connected()}};
  if (!ctx.opt.out.empty()) ctx.emit_json(ctx.opt.out, io::snapshot_list_to_json(s));
  return kOk;
}

int cmd_ground_state(Context& ctx) {
  const GroundState gs = ground_state(ctx.constraints());
  std::cout << "total_length " << gs.triangulation.total_length() << "\n";
  std::cout << "ties " << gs.ties.size() << "\n";
  ctx.manifest.results = {{"total_length", gs.triangulation.total_length()}, {"ties", gs.ties.size()}};
  if (!ctx.opt.out.empty()) ctx.emit_json(ctx.opt.out, io::snapshot_to_json(gs.triangulation));
  if (!ctx.opt.svg.empty()) ctx.emit(ctx.opt.svg, io::render_svg(gs.triangulation));
  return kOk;
}

struct FlipDistArgs {
  std::string from;
  std::string to;
  bool bfs = false;
};

int cmd_flip_dist(Context& ctx, const FlipDistArgs& a) {
  const Triangulation s = io::load_snapshot(a.from);
  const Triangulation t = io::load_snapshot(a.to);
  if (s.grid() != t.grid() || s.constraints() != t.constraints()) {
    throw ValidationError("snapshots differ in grid or constraints");
  }
  ctx.manifest.grid = s.grid();
  const int d = flip_distance(s, t);
  std::cout << "flip_distance " << d << "\n";
  ctx.manifest.results["flip_distance"] = d;
  if (a.bfs) {
    const StateSpace space = enumerate_triangulations(s.constraints_ptr());
    const FlipGraph g(space);
    const int b = bfs_distance(g, *space.find(s), *space.find(t));
    std::cout << "bfs_distance " << b << "\n";
    ctx.manifest.results["bfs_distance"] = b;
  }
  return kOk;
}

struct SampleArgs {
  std::string start;
  std::string csv;
  std::uint64_t record_every = 0;
  bool track_b = false;
  bool slope_colors = true;
};

int cmd_sample(Context& ctx, const SampleArgs& a) {
  Triangulation start = a.start.empty() ? ground_state(ctx.constraints()).triangulation : io::load_snapshot(a.start);
  if (start.grid() != ctx.grid()) throw ValidationError("start snapshot grid does not match --grid " + ctx.opt.grid);
  RunOptions ro;
  ro.steps = ctx.opt.steps;
  ro.record_every = a.record_every ? a.record_every : std::max<std::uint64_t>(1, ctx.opt.steps / 1000);
  ro.track_b_triangles = a.track_b;
  ro.policy = ctx.policy();
  const RunResult r = run(start, ctx.params(), ctx.opt.seed, ro);

  const double edges = start.grid().edge_count();
  double late_sum = 0.0;
  std::size_t late_n = 0;
  for (std::size_t i = r.trace.size() / 2; i < r.trace.size(); ++i, ++late_n) late_sum += r.trace[i].total_length;
  const double final_mean = r.final_state.total_length() / edges;
  const double late_mean = late_n ? late_sum / late_n / edges : final_mean;
  const double rate = r.seconds > 0 ? r.steps / r.seconds : 0.0;

  std::cout << "steps " << r.steps << "\n";
  std::cout << "flips " << r.flips << "\n";
  std::cout << "acceptance_rate " << (r.proposals ? double(r.flips) / r.proposals : 0.0) << "\n";
  std::cout << "final_total_length " << r.final_state.total_length() << "\n";
  std::cout << "final_mean_edge_length " << final_mean << "\n";
  std::cout << "mean_edge_length_second_half " << late_mean << "\n";
  std::cout << "steps_per_second " << std::setprecision(4) << rate << "\n";
  ctx.manifest.results = {{"flips", r.flips},
                          {"proposals", r.proposals},
                          {"final_total_length", r.final_state.total_length()},
                          {"final_mean_edge_length", final_mean},
                          {"mean_edge_length_second_half", late_mean},
                          {"seconds", r.seconds}};
  if (!ctx.opt.out.empty()) ctx.emit_json(ctx.opt.out, io::snapshot_to_json(r.final_state));
  if (!a.csv.empty()) ctx.emit(a.csv, io::trace_csv(r.trace));
  if (!ctx.opt.svg.empty()) {
    io::SvgOptions so;
    so.slope_colors = a.slope_colors;
    so.cell = std::clamp(800.0 / std::max(start.grid().rows, start.grid().cols), 4.0, 48.0);
    ctx.emit(ctx.opt.svg, io::render_svg(r.final_state, so));
  }
  return kOk;
}

int cmd_mix_exact(Context& ctx, std::uint64_t cap) {
  const StateSpace s = enumerate_triangulations(ctx.constraints(), {cap, false});
  const FlipGraph g(s);
  const ExactDistribution d(s, ctx.params());
  const TransitionMatrix P = transition_matrix(g, ctx.params(), ctx.policy());
  const MixingReport m = mixing_time_exact(P, d);
  std::cout << "T_mix=" << m.t_mix << " policy=" << to_string(m.policy) << " active=" << P.active << "\n";
  if (m.relaxation_time) std::cout << "relaxation_time " << *m.relaxation_time << "\n";
  std::cout << "states " << s.size() << "\n";
  ctx.manifest.results = {{"t_mix", m.t_mix}, {"active", P.active}, {"states", s.size()}};
  if (m.relaxation_time) ctx.manifest.results["relaxation_time"] = *m.relaxation_time;
  if (!ctx.opt.out.empty()) {
    std::ostringstream csv;
    csv << "t,worst_tv\n" << std::setprecision(12);
    for (std::size_t t = 0; t < m.worst_tv.size(); ++t) csv << t << ',' << m.worst_tv[t] << "\n";
    ctx.emit(ctx.opt.out, csv.str());
  }
  return kOk;
}

struct CouplingArgs {
  bool exact = false;
  bool one_dim = false;
};

int cmd_coupling_check(Context& ctx, const CouplingArgs& a) {
  const StateSpace s = enumerate_triangulations(ctx.constraints());
  const FlipGraph g(s);
  ctx.manifest.alpha = ctx.opt.alpha;
  if (a.one_dim) {
    const auto r = path_coupling_check_1d(g, ctx.params(), ctx.opt.alpha, ctx.policy());
    std::cout << "pairs " << r.report.pairs.size() << "\n";
    std::cout << "max_ratio " << std::setprecision(10) << r.report.max_ratio << "\n";
    std::cout << "delta " << r.delta << "\n";
    std::cout << "criterion " << r.criterion << (r.criterion_below_one ? " (< 1)" : " (>= 1, no contraction claimed)")
              << "\n";
    std::cout << "contraction " << (r.contraction_confirmed ? "confirmed" : "not confirmed") << "\n";
    std::cout << "vertical_pairs " << r.vertical_pairs << " max_ratio " << r.max_ratio_vertical << "\n";
    std::cout << "other_pairs max_ratio " << r.max_ratio_other << " delta " << r.delta_other << "\n";
    ctx.manifest.results = {{"max_ratio", r.report.max_ratio},
                            {"max_ratio_vertical", r.max_ratio_vertical},
                            {"max_ratio_other", r.max_ratio_other},
                            {"delta", r.delta},
                            {"criterion", r.criterion},
                            {"contraction_confirmed", r.contraction_confirmed}};
    return kOk;
  }
  if (a.exact) {
    const mpq_class lambda(ctx.opt.lambda);
    const mpq_class alpha(ctx.opt.alpha);
    const auto r = path_coupling_check<mpq_class>(g, lambda, alpha, ctx.policy());
    std::cout << "pairs " << r.pairs.size() << "\n";
    std::cout << "max_ratio " << r.max_ratio.get_str() << " (" << r.max_ratio.get_d() << ")\n";
    std::cout << "bound " << r.bound.get_str() << "\n";
    std::cout << "contracts " << (r.contracts_to_bound ? "yes" : "no") << "\n";
    ctx.manifest.results = {{"max_ratio", r.max_ratio.get_str()},
                            {"bound", r.bound.get_str()},
                            {"contracts", r.contracts_to_bound}};
    return kOk;
  }
  const CouplingReport r = path_coupling_check(g, ctx.params(), ctx.opt.alpha, ctx.policy());
  std::cout << "pairs " << r.pairs.size() << "\n";
  std::cout << "max_ratio " << std::setprecision(12) << r.max_ratio << "\n";
  std::cout << "bound " << r.bound << "\n";
  std::cout << "contracts " << (r.contracts_to_bound ? "yes" : "no") << "\n";
  ctx.manifest.results = {{"max_ratio", r.max_ratio}, {"bound", r.bound}, {"contracts", r.contracts_to_bound}};
  return kOk;
}

struct SpatialArgs {
  std::string at;
  std::string set;
};

int cmd_spatial(Context& ctx, const SpatialArgs& a) {
  auto c = ctx.constraints();
  const Midpoint x = parse_midpoint(a.at);
  check_midpoint(c->grid(), x);
  const std::vector<Midpoint> A = parse_midpoints(a.set);
  for (const Midpoint& y : A) check_midpoint(c->grid(), y);
  const StateSpace s = enumerate_triangulations(c);
  const ExactDistribution mu(s, ctx.params());
  const GroundState gs = ground_state(c);
  const Edge ground = gs.triangulation.edge(x);
  const ExactDistribution base = mu.conditional(x, ground);

  std::ostringstream csv;
  csv << "edge,length,distance_d,tv\n" << std::setprecision(12);
  std::cout << "edge length distance_d tv\n";
  io::json rows = io::json::array();
  for (const Edge& e : candidate_configs(x, *c)) {
    double tv = 0.0;
    try {
      tv = tv_marginal(mu.conditional(x, e), base, A);
    } catch (const std::domain_error&) {
      continue;
    }
    const int d = e == ground ? 0 : distance_d(A, e, *c);
    std::ostringstream es;
    es << e;
    const std::string dstr = d == kInfiniteDistance ? "inf" : std::to_string(d);
    std::cout << es.str() << ' ' << e.length() << ' ' << dstr << ' ' << tv << "\n";
    csv << '"' << es.str() << "\"," << e.length() << ',' << dstr << ',' << tv << "\n";
    rows.push_back({{"edge", es.str()}, {"distance_d", dstr}, {"tv", tv}});
  }
  ctx.manifest.results["rows"] = rows;
  if (!ctx.opt.out.empty()) ctx.emit(ctx.opt.out, csv.str());
  return kOk;
}

int cmd_tails(Context& ctx, const std::string& at) {
  auto c = ctx.constraints();
  const Midpoint x = parse_midpoint(at);
  check_midpoint(c->grid(), x);
  const StateSpace s = enumerate_triangulations(c);
  const ExactDistribution mu(s, ctx.params());
  const auto tails = tail_laws(mu, x);
  std::ostringstream csv;
  csv << "k,length_excess,phi\n" << std::setprecision(12);
  std::cout << "k length_excess phi\n" << std::setprecision(6);
  for (const auto& [k, e] : tails) {
    std::cout << k << ' ' << e.length_excess << ' ' << e.phi << "\n";
    csv << k << ',' << e.length_excess << ',' << e.phi << "\n";
    ctx.manifest.results[std::to_string(k)] = {{"length_excess", e.length_excess}, {"phi", e.phi}};
  }
  if (!ctx.opt.out.empty()) ctx.emit(ctx.opt.out, csv.str());
  return kOk;
}

int cmd_bottleneck(Context& ctx) {
  auto c = ctx.constraints();
  const StateSpace s = enumerate_triangulations(c);
  const HerringboneSet hb{c->grid(), ctx.opt.epsilon};
  const BottleneckReport r =
      conductance_ratio(s, ctx.params(), [&](const Triangulation& t) { return hb.contains(t); }, "herringbone");
  std::cout << "states " << s.size() << "\n";
  std::cout << "size_A " << r.size_a << "\n";
  std::cout << "size_boundary " << r.size_boundary << "\n";
  std::cout << "ratio " << std::setprecision(10) << r.ratio << "\n";
  std::cout << "log_ratio " << (r.ratio > 0 ? std::log(r.ratio) : -INFINITY) << "\n";
  std::cout << "mu_A " << r.mu_a << (r.mu_a_at_most_half ? "" : " (exceeds 1/2)") << "\n";
  ctx.manifest.results = {{"size_a", r.size_a},
                          {"size_boundary", r.size_boundary},
                          {"ratio", r.ratio},
                          {"mu_a", r.mu_a}};
  return kOk;
}

struct HittingArgs {
  std::uint64_t cap = 10'000'000;
  int runs = 1;
};

int cmd_hitting(Context& ctx, const HittingArgs& a) {
  if (!ctx.opt.constraints.empty()) throw ValidationError("hitting runs without constraints");
  std::vector<double> hit;
  int capped = 0;
  io::json times = io::json::array();
  for (int i = 0; i < a.runs; ++i) {
    const auto t = hitting_time_experiment(ctx.grid(), ctx.params(), ctx.opt.seed + i, a.cap, ctx.policy());
    if (t) {
      hit.push_back(static_cast<double>(*t));
      times.push_back(*t);
      std::cout << "seed " << ctx.opt.seed + i << " hitting_time " << *t << "\n";
    } else {
      ++capped;
      times.push_back(nullptr);
      std::cout << "seed " << ctx.opt.seed + i << " cap_exceeded " << a.cap << "\n";
    }
  }
  if (!hit.empty()) std::cout << "median " << median(hit) << "\n";
  std::cout << "cap_exceeded " << capped << "/" << a.runs << "\n";
  ctx.manifest.results = {{"times", times}, {"cap", a.cap}, {"cap_exceeded", capped}};
  return kOk;
}

struct RenderArgs {
  std::string in;
  bool b_shading = false;
  bool slope_colors = false;
  bool no_bold = false;
  std::string region;
  double cell = 16.0;
};

int cmd_render(Context& ctx, const RenderArgs& a) {
  const Triangulation t = io::load_snapshot(a.in);
  ctx.manifest.grid = t.grid();
  io::SvgOptions so;
  so.b_shading = a.b_shading;
  so.slope_colors = a.slope_colors;
  so.bold_constraints = !a.no_bold;
  so.cell = a.cell;
  if (!a.region.empty()) so.region = influence_region_branching(parse_edge(a.region), t.constraints());
  if (ctx.opt.svg.empty()) throw std::invalid_argument("render needs --svg");
  ctx.emit(ctx.opt.svg, io::render_svg(t, so));
  return kOk;
}

int dispatch(std::vector<std::string> args);

int cmd_replay(const std::string& path) {
  const io::RunManifest m = io::manifest_from_json(io::read_json(path));
  if (m.command == "replay") throw ValidationError("cannot replay a replay manifest");
  std::vector<std::string> argv;
  for (std::size_t i = 0; i < m.argv.size(); ++i) {
    if (m.argv[i] == "--manifest") {
      ++i;
      continue;
    }
    if (m.argv[i].rfind("--manifest=", 0) == 0) continue;
    argv.push_back(m.argv[i]);
  }
  const fs::path tmp = fs::temp_directory_path() / ("lattri_replay_" + std::to_string(io::fnv1a(path)) + ".json");
  argv.push_back("--manifest");
  argv.push_back(tmp.string());
  const int code = dispatch(argv);
  fs::remove(tmp);
  if (code != kOk) return code;
  int mismatches = 0;
  for (const auto& [file, hash] : m.outputs) {
    const std::string now = fs::exists(file) ? io::file_hash(file) : "missing";
    const bool same = now == hash;
    mismatches += !same;
    std::cout << (same ? "match " : "MISMATCH ") << file << " " << hash << " " << now << "\n";
  }
  std::cout << (mismatches ? "replay differs" : "replay identical") << "\n";
  return mismatches ? kValidation : kOk;
}

// ---------------------------------------------------------------------------

void add_common(CLI::App* sub, Common& c, bool sampling) {
  sub->add_option("--grid", c.grid, "grid size MxN")->capture_default_str();
  sub->add_option("--constraints", c.constraints, "constraint file (JSON)")->check(CLI::ExistingFile);
  sub->add_option("--lambda", c.lambda, "Gibbs parameter")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--policy", c.policy, "proposal midpoints")->check(CLI::IsMember({"full", "interior"}))
      ->capture_default_str();
  sub->add_option("--out", c.out, "output file");
  sub->add_option("--manifest", c.manifest, "run manifest path")->capture_default_str();
  if (sampling) {
    sub->add_option("--seed", c.seed, "RNG seed")->capture_default_str();
    sub->add_option("--steps", c.steps, "attempted flips")->capture_default_str();
  }
}

int dispatch(std::vector<std::string> args) {
  CLI::App app{"Lattice triangulations: enumeration, exact Gibbs measures and heat-bath sampling", "lattri"};
  app.require_subcommand(1);
  app.set_version_flag("--version", LATTRI_VERSION);

  Common c;
  EnumerateArgs en;
  FlipDistArgs fd;
  SampleArgs sa;
  CouplingArgs ca;
  SpatialArgs sp;
  HittingArgs hi;
  RenderArgs re;
  std::string tails_at;
  std::string replay_path;
  std::uint64_t mix_cap = 200'000;

  auto* enumerate = app.add_subcommand("enumerate", "count or list all triangulations");
  add_common(enumerate, c, false);
  enumerate->add_flag("--count-only", en.count_only, "print the count only");
  enumerate->add_flag("--reverse", en.reverse, "reverse midpoint order");
  enumerate->add_option("--cap", en.cap, "maximum number of states")->capture_default_str();

  auto* gs = app.add_subcommand("ground-state", "minimum-length triangulation");
  add_common(gs, c, false);
  gs->add_option("--svg", c.svg, "SVG render");

  auto* flipd = app.add_subcommand("flip-dist", "flip distance between two snapshots");
  add_common(flipd, c, false);
  flipd->add_option("--from", fd.from, "snapshot")->required()->check(CLI::ExistingFile);
  flipd->add_option("--to", fd.to, "snapshot")->required()->check(CLI::ExistingFile);
  flipd->add_flag("--bfs", fd.bfs, "cross-check with BFS on the enumerated flip graph");

  auto* sample = app.add_subcommand("sample", "run the heat-bath chain");
  add_common(sample, c, true);
  sample->add_option("--svg", c.svg, "SVG render of the final state");
  sample->add_option("--start", sa.start, "start snapshot (default: ground state)")->check(CLI::ExistingFile);
  sample->add_option("--csv", sa.csv, "trajectory CSV");
  sample->add_option("--record-every", sa.record_every, "trace interval (default steps/1000)");
  sample->add_flag("--track-b", sa.track_b, "count B-triangles at record points");

  auto* mix = app.add_subcommand("mix-exact", "exact mixing time from the transition matrix");
  add_common(mix, c, false);
  mix->add_option("--cap", mix_cap, "maximum number of states")->capture_default_str();

  auto* coup = app.add_subcommand("coupling-check", "exact one-step path-coupling contraction");
  add_common(coup, c, false);
  coup->add_option("--alpha", c.alpha, "metric base")->check(CLI::Range(1.0, 1e6))->capture_default_str();
  coup->add_flag("--exact", ca.exact, "rational arithmetic");
  auto* one_dim = coup->add_flag("--one-dim", ca.one_dim, "1 x n horizontal-length metric");
  one_dim->excludes(coup->get_option("--exact"));

  auto* spatial = app.add_subcommand("spatial", "TV influence of the edge at a midpoint on a set");
  add_common(spatial, c, false);
  spatial->add_option("--at", sp.at, "midpoint V,H")->required();
  spatial->add_option("--set", sp.set, "midpoints V,H;V,H;...")->required();

  auto* tails = app.add_subcommand("tails", "exact tail laws at a midpoint");
  add_common(tails, c, false);
  tails->add_option("--at", tails_at, "midpoint V,H")->required();

  auto* bottleneck = app.add_subcommand("bottleneck", "conductance ratio of the herringbone set");
  add_common(bottleneck, c, false);
  bottleneck->add_option("--epsilon", c.epsilon, "restrict to the window [eps n, (1-eps) n]")
      ->check(CLI::Range(0.0, 0.5));

  auto* hitting = app.add_subcommand("hitting", "hitting time from the long-edge start");
  add_common(hitting, c, true);
  hitting->add_option("--cap", hi.cap, "step cap per run")->capture_default_str();
  hitting->add_option("--runs", hi.runs, "independent seeds")->check(CLI::PositiveNumber)->capture_default_str();

  auto* render = app.add_subcommand("render", "SVG render of a snapshot");
  render->add_option("--in", re.in, "snapshot")->required()->check(CLI::ExistingFile);
  render->add_option("--svg", c.svg, "output SVG")->required();
  render->add_option("--manifest", c.manifest, "run manifest path")->capture_default_str();
  render->add_option("--cell", re.cell, "pixels per lattice unit")->check(CLI::PositiveNumber);
  render->add_flag("--b-shading", re.b_shading, "shade B-triangles");
  render->add_flag("--slope-colors", re.slope_colors, "colour edges by slope sign");
  render->add_flag("--no-bold", re.no_bold, "draw constraints like other edges");
  render->add_option("--region", re.region, "overlay the influence region of edge V,H:V,H");

  auto* replay = app.add_subcommand("replay", "re-run a manifest and compare output hashes");
  replay->add_option("manifest", replay_path, "manifest file")->required()->check(CLI::ExistingFile);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kUsage;
  }

  if (replay->parsed()) return cmd_replay(replay_path);

  Context ctx{c, {}, {}};
  CLI::App* sub = app.get_subcommands().front();
  ctx.manifest.command = sub->get_name();
  ctx.manifest.argv = args;
  ctx.manifest.version = LATTRI_VERSION;
  ctx.manifest.started = io::timestamp_now();

  int code = kOk;
  if (sub != render) {
    ctx.manifest.grid = ctx.grid();
    ctx.manifest.lambda = c.lambda;
    ctx.manifest.policy = c.policy;
    if (sub == sample || sub == hitting) {
      ctx.manifest.seed = c.seed;
      ctx.manifest.steps = c.steps;
    }
    ctx.manifest.epsilon = c.epsilon;
  }
  if (sub == enumerate) code = cmd_enumerate(ctx, en);
  else if (sub == gs) code = cmd_ground_state(ctx);
  else if (sub == flipd) code = cmd_flip_dist(ctx, fd);
  else if (sub == sample) code = cmd_sample(ctx, sa);
  else if (sub == mix) code = cmd_mix_exact(ctx, mix_cap);
  else if (sub == coup) code = cmd_coupling_check(ctx, ca);
  else if (sub == spatial) code = cmd_spatial(ctx, sp);
  else if (sub == tails) code = cmd_tails(ctx, tails_at);
  else if (sub == bottleneck) code = cmd_bottleneck(ctx);
  else if (sub == hitting) code = cmd_hitting(ctx, hi);
  else if (sub == render) code = cmd_render(ctx, re);

  ctx.manifest.finished = io::timestamp_now();
  for (const auto& f : ctx.outputs) ctx.manifest.outputs[f] = io::file_hash(f);
  io::write_json(c.manifest, io::manifest_to_json(ctx.manifest));
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return dispatch(args);
  } catch (const CapExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCap;
  } catch (const io::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const GeometryError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  }
}
