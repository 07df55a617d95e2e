#ifndef LATTRI_IO_HPP
#define LATTRI_IO_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "lattri/glauber.hpp"

namespace lattri::io {

using nlohmann::json;

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kConvention = "(vertical,horizontal)";
inline constexpr const char* kSnapshotFormat = "lattri-snapshot";
inline constexpr const char* kSnapshotListFormat = "lattri-snapshot-list";
inline constexpr const char* kConstraintsFormat = "lattri-constraints";
inline constexpr const char* kManifestFormat = "lattri-manifest";

/// Malformed file: bad JSON, missing or mistyped field, unknown format or version.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json to_json(const Point& p);
json to_json(const Edge& e);
Edge edge_from_json(const json& j, const std::string& where);

json constraints_to_json(const ConstraintSet& c);
/// Rejects crossing or non-primitive constraints with ValidationError.
ConstraintSet constraints_from_json(const json& j);

/// Grid, constraint list and every edge in midpoint order.
json snapshot_to_json(const Triangulation& t);
/// Re-validates the full triangulation.
Triangulation snapshot_from_json(const json& j);

json snapshot_list_to_json(const StateSpace& s);

json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);
void write_json(const std::filesystem::path& path, const json& j);

void save_snapshot(const std::filesystem::path& path, const Triangulation& t);
Triangulation load_snapshot(const std::filesystem::path& path);
void save_constraints(const std::filesystem::path& path, const ConstraintSet& c);
ConstraintSet load_constraints(const std::filesystem::path& path);

/// "MxN".
GridSpec parse_grid(const std::string& s);

std::uint64_t fnv1a(std::string_view data);
/// 16 hex digits of the FNV-1a hash of the file contents.
std::string file_hash(const std::filesystem::path& path);

struct RunManifest {
  std::string command;
  std::vector<std::string> argv;  // full invocation, program name excluded
  GridSpec grid;
  std::optional<double> lambda;
  std::optional<double> alpha;
  std::optional<double> epsilon;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> steps;
  std::string policy;
  std::string version;
  std::string rng = kRngName;
  std::string started;
  std::string finished;
  std::map<std::string, std::string> outputs;  // path -> hash
  json results = json::object();
};

json manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const json& j);
/// ISO 8601 UTC.
std::string timestamp_now();

std::string trace_csv(const std::vector<TracePoint>& trace);

struct SvgOptions {
  double cell = 16.0;  // pixels per lattice unit
  bool b_shading = false;
  bool bold_constraints = true;
  bool slope_colors = false;
  std::optional<InfluenceRegion> region;
};

/// One <line> per edge; shading and regions are drawn as polygons underneath.
std::string render_svg(const Triangulation& t, const SvgOptions& opts = {});

}  // namespace lattri::io

#endif  // LATTRI_IO_HPP
