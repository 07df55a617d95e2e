#include "lattri/io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace lattri::io {

namespace {

const json& field(const json& j, const char* name, const std::string& where) {
  if (!j.is_object()) throw FormatError(where + ": expected an object");
  auto it = j.find(name);
  if (it == j.end()) throw FormatError(where + ": missing field '" + name + "'");
  return *it;
}

int int_field(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw FormatError(where + ": expected an integer");
  return j.get<int>();
}

void check_header(const json& j, const char* format) {
  const json& f = field(j, "format", "document");
  if (!f.is_string() || f.get<std::string>() != format) {
    throw FormatError("unexpected format tag " + f.dump() + " (expected \"" + format + "\")");
  }
  const json& v = field(j, "version", "document");
  if (!v.is_number_integer() || v.get<int>() != kFormatVersion) {
    throw FormatError("unsupported " + std::string(format) + " version " + v.dump());
  }
  if (auto it = j.find("convention"); it != j.end() && *it != kConvention) {
    throw FormatError("unsupported coordinate convention " + it->dump());
  }
}

json header(const char* format) {
  return json{{"format", format}, {"version", kFormatVersion}, {"convention", kConvention}};
}

json grid_to_json(const GridSpec& g) { return json{{"rows", g.rows}, {"cols", g.cols}}; }

GridSpec grid_from_json(const json& j) {
  const json& g = field(j, "grid", "document");
  try {
    return GridSpec(int_field(field(g, "rows", "grid"), "grid.rows"), int_field(field(g, "cols", "grid"), "grid.cols"));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("grid: ") + e.what());
  }
}

std::vector<Edge> edge_list(const json& j, const std::string& where) {
  if (!j.is_array()) throw FormatError(where + ": expected an array");
  std::vector<Edge> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(edge_from_json(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

ConstraintSet constraint_set(const GridSpec& grid, const std::vector<Edge>& edges) {
  ConstraintSet c(grid);
  for (const Edge& e : edges) c.add(e);
  if (auto err = validate_constraints(c)) throw ValidationError(*err);
  return c;
}

}  // namespace

json to_json(const Point& p) { return json::array({p.v, p.h}); }

json to_json(const Edge& e) { return json::array({to_json(e.p), to_json(e.q)}); }

Edge edge_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw FormatError(where + ": expected [[v, h], [v, h]]");
  Point pts[2];
  for (int k = 0; k < 2; ++k) {
    const json& p = j[k];
    if (!p.is_array() || p.size() != 2) throw FormatError(where + ": expected [[v, h], [v, h]]");
    pts[k] = {int_field(p[0], where), int_field(p[1], where)};
  }
  if (pts[0] == pts[1]) throw FormatError(where + ": degenerate edge");
  return Edge(pts[0], pts[1]);
}

json constraints_to_json(const ConstraintSet& c) {
  json j = header(kConstraintsFormat);
  j["grid"] = grid_to_json(c.grid());
  j["edges"] = json::array();
  for (const Edge& e : c.edges()) j["edges"].push_back(to_json(e));
  return j;
}

ConstraintSet constraints_from_json(const json& j) {
  check_header(j, kConstraintsFormat);
  const GridSpec grid = grid_from_json(j);
  return constraint_set(grid, edge_list(field(j, "edges", "document"), "edges"));
}

json snapshot_to_json(const Triangulation& t) {
  json j = header(kSnapshotFormat);
  j["grid"] = grid_to_json(t.grid());
  j["constraints"] = json::array();
  for (const Edge& e : t.constraints().edges()) j["constraints"].push_back(to_json(e));
  j["edges"] = json::array();
  for (const Edge& e : t.edges()) j["edges"].push_back(to_json(e));
  j["total_length"] = t.total_length();
  return j;
}

Triangulation snapshot_from_json(const json& j) {
  check_header(j, kSnapshotFormat);
  const GridSpec grid = grid_from_json(j);
  std::vector<Edge> cons;
  if (j.contains("constraints")) cons = edge_list(j["constraints"], "constraints");
  const ConstraintSet c = constraint_set(grid, cons);
  return Triangulation::from_edges(c, edge_list(field(j, "edges", "document"), "edges"));
}

json snapshot_list_to_json(const StateSpace& s) {
  json j = header(kSnapshotListFormat);
  j["grid"] = grid_to_json(s.grid());
  j["constraints"] = json::array();
  for (const Edge& e : s.constraints().edges()) j["constraints"].push_back(to_json(e));
  j["count"] = s.size();
  json states = json::array();
  for (std::size_t i = 0; i < s.size(); ++i) {
    json edges = json::array();
    for (const Edge& e : s.edges(i)) edges.push_back(to_json(e));
    states.push_back(json{{"total_length", s.total_length(i)}, {"edges", std::move(edges)}});
  }
  j["states"] = std::move(states);
  return j;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

void save_snapshot(const std::filesystem::path& path, const Triangulation& t) { write_json(path, snapshot_to_json(t)); }

Triangulation load_snapshot(const std::filesystem::path& path) { return snapshot_from_json(read_json(path)); }

void save_constraints(const std::filesystem::path& path, const ConstraintSet& c) {
  write_json(path, constraints_to_json(c));
}

ConstraintSet load_constraints(const std::filesystem::path& path) { return constraints_from_json(read_json(path)); }

GridSpec parse_grid(const std::string& s) {
  int m = 0, n = 0;
  char x = 0, extra = 0;
  if (std::sscanf(s.c_str(), "%d%c%d%c", &m, &x, &n, &extra) != 3 || (x != 'x' && x != 'X')) {
    throw std::invalid_argument("grid must look like MxN, got '" + s + "'");
  }
  return GridSpec(m, n);
}

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << fnv1a(ss.str());
  return out.str();
}

json manifest_to_json(const RunManifest& m) {
  json j = header(kManifestFormat);
  j["command"] = m.command;
  j["argv"] = m.argv;
  j["grid"] = grid_to_json(m.grid);
  j["lambda"] = m.lambda ? json(*m.lambda) : json(nullptr);
  j["alpha"] = m.alpha ? json(*m.alpha) : json(nullptr);
  j["epsilon"] = m.epsilon ? json(*m.epsilon) : json(nullptr);
  j["seed"] = m.seed ? json(*m.seed) : json(nullptr);
  j["steps"] = m.steps ? json(*m.steps) : json(nullptr);
  j["policy"] = m.policy;
  j["code_version"] = m.version;
  j["rng"] = m.rng;
  j["started"] = m.started;
  j["finished"] = m.finished;
  j["outputs"] = m.outputs;
  j["results"] = m.results;
  return j;
}

RunManifest manifest_from_json(const json& j) {
  check_header(j, kManifestFormat);
  RunManifest m;
  try {
    m.command = field(j, "command", "manifest").get<std::string>();
    m.argv = field(j, "argv", "manifest").get<std::vector<std::string>>();
    m.grid = grid_from_json(j);
    auto opt = [&](const char* name, auto& dst) {
      auto it = j.find(name);
      if (it != j.end() && !it->is_null()) dst = it->get<typename std::decay_t<decltype(dst)>::value_type>();
    };
    opt("lambda", m.lambda);
    opt("alpha", m.alpha);
    opt("epsilon", m.epsilon);
    opt("seed", m.seed);
    opt("steps", m.steps);
    m.policy = j.value("policy", "");
    m.version = j.value("code_version", "");
    m.rng = j.value("rng", "");
    m.started = j.value("started", "");
    m.finished = j.value("finished", "");
    m.outputs = j.value("outputs", std::map<std::string, std::string>{});
    m.results = j.value("results", json::object());
  } catch (const json::exception& e) {
    throw FormatError(std::string("manifest: ") + e.what());
  }
  return m;
}

std::string timestamp_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string trace_csv(const std::vector<TracePoint>& trace) {
  std::ostringstream out;
  out << "step,total_length,acceptance_rate,b_triangle_count\n";
  out << std::setprecision(10);
  for (const TracePoint& p : trace) {
    out << p.step << ',' << p.total_length << ',' << p.acceptance_rate << ',';
    if (p.b_triangles >= 0) out << p.b_triangles;
    out << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// SVG

namespace {

struct Canvas {
  double cell;
  double margin;
  int rows;
  double x(const Point& p) const { return margin + p.h * cell; }
  double y(const Point& p) const { return margin + (rows - p.v) * cell; }
};

void polygon(std::ostringstream& out, const Canvas& c, const Triangle& t, const char* fill, double opacity) {
  out << "  <polygon points=\"";
  for (int k = 0; k < 3; ++k) {
    out << (k ? " " : "") << c.x(t.vertices[k]) << ',' << c.y(t.vertices[k]);
  }
  out << "\" fill=\"" << fill << "\" fill-opacity=\"" << opacity << "\" stroke=\"none\"/>\n";
}

const char* slope_color(const Edge& e) {
  switch (orientation(e)) {
    case Orientation::Positive: return "#c0392b";
    case Orientation::Negative: return "#2c6fbb";
    case Orientation::None: return "#555555";
  }
  return "#000000";
}

}  // namespace

std::string render_svg(const Triangulation& t, const SvgOptions& opts) {
  const GridSpec& g = t.grid();
  const Canvas c{opts.cell, opts.cell, g.rows};
  const double w = g.cols * opts.cell + 2 * opts.cell;
  const double h = g.rows * opts.cell + 2 * opts.cell;
  const double stroke = std::max(0.3, opts.cell / 16.0);

  std::ostringstream out;
  out << std::setprecision(6);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 "
      << w << ' ' << h << "\">\n";
  out << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (opts.b_shading) {
    const auto dec = classify(t, t.constraints());
    for (std::size_t k = 0; k < dec.triangles.size(); ++k) {
      if (dec.labels[k] == TriangleLabel::B) polygon(out, c, dec.triangles[k], "#f2b134", 0.55);
    }
  }
  if (opts.region) {
    for (const Triangle& tri : opts.region->triangles) polygon(out, c, tri, "#4caf50", 0.4);
  }
  for (const Edge& e : t.edges()) {
    const bool fixed = t.is_fixed(e.midpoint());
    const bool constraint = t.constraints().contains(e.midpoint());
    const char* color = opts.slope_colors ? slope_color(e) : "#222222";
    double sw = stroke;
    if (opts.bold_constraints && constraint) {
      sw = 3 * stroke;
      color = "#000000";
    } else if (fixed) {
      sw = 1.5 * stroke;
    }
    out << "  <line x1=\"" << c.x(e.p) << "\" y1=\"" << c.y(e.p) << "\" x2=\"" << c.x(e.q) << "\" y2=\"" << c.y(e.q)
        << "\" stroke=\"" << color << "\" stroke-width=\"" << sw << "\" stroke-linecap=\"round\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace lattri::io
