#include "terra/topo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "json.hpp"
#include "terra/error.hpp"

namespace terra {

const char* to_string(CritKind kind) {
  switch (kind) {
    case CritKind::minimum: return "minimum";
    case CritKind::saddle: return "saddle";
    case CritKind::maximum: return "maximum";
  }
  return "?";
}

CritKind crit_kind_from_string(const std::string& s) {
  if (s == "minimum") return CritKind::minimum;
  if (s == "saddle") return CritKind::saddle;
  if (s == "maximum") return CritKind::maximum;
  throw DataError("unknown critical point kind '" + s + "'");
}

int MorseIncidenceGraph::count(CritKind kind, bool include_boundary) const {
  int n = 0;
  for (const CriticalPoint& p : nodes)
    if (p.kind == kind && (include_boundary || !p.boundary)) ++n;
  return n;
}

int MorseIncidenceGraph::alternating_sum() const {
  return count(CritKind::minimum) - count(CritKind::saddle) + count(CritKind::maximum);
}

namespace {

// reconnection path: (t -> e) + reverse(s -> e) + (s -> e2)
std::vector<std::array<double, 2>> concat_polylines(const std::vector<std::array<double, 2>>& te,
                                                    const std::vector<std::array<double, 2>>& se,
                                                    const std::vector<std::array<double, 2>>& se2) {
  std::vector<std::array<double, 2>> out = te;
  out.insert(out.end(), se.rbegin(), se.rend());
  out.insert(out.end(), se2.begin(), se2.end());
  return out;
}

}  // namespace

MorseIncidenceGraph simplify_mig(const MorseIncidenceGraph& mig, double threshold) {
  MorseIncidenceGraph g = mig;
  std::vector<bool> node_alive(g.nodes.size(), true);
  std::vector<bool> arc_alive(g.arcs.size(), true);

  // The twin of arc (s, e) is the unique other alive arc from s on the same
  // side (same extremum kind; boundary nodes carry the kind they stand for).
  // Cancellation is legal when the twin exists and is distinct from e; the
  // boundary acts as an absorbing virtual extremum, so a boundary twin is
  // allowed and inherits the reconnected arcs.
  auto find_twin_arc = [&](size_t arc_idx) -> int {
    const MigArc& a = g.arcs[arc_idx];
    const CritKind kind = g.node(a.extremum).kind;
    int found = -1;
    for (size_t k = 0; k < g.arcs.size(); ++k) {
      if (!arc_alive[k] || k == arc_idx) continue;
      const MigArc& b = g.arcs[k];
      if (b.saddle != a.saddle || g.node(b.extremum).kind != kind) continue;
      if (found != -1) return -1;  // malformed side with >2 arcs: skip
      found = static_cast<int>(k);
    }
    if (found == -1) return -1;
    if (g.arcs[static_cast<size_t>(found)].extremum == a.extremum) return -1;  // strangulation
    return found;
  };

  while (true) {
    // lowest-persistence legal cancellation below the threshold
    int best = -1;
    int best_twin = -1;
    for (size_t i = 0; i < g.arcs.size(); ++i) {
      if (!arc_alive[i]) continue;
      const MigArc& a = g.arcs[i];
      if (!(a.persistence < threshold)) continue;
      if (g.node(a.extremum).boundary || g.node(a.saddle).boundary) continue;
      const int twin_arc = find_twin_arc(i);
      if (twin_arc == -1) continue;
      if (best == -1 ||
          std::make_tuple(a.persistence, a.saddle, a.extremum) <
              std::make_tuple(g.arcs[best].persistence, g.arcs[best].saddle,
                              g.arcs[best].extremum)) {
        best = static_cast<int>(i);
        best_twin = twin_arc;
      }
    }
    if (best == -1) break;

    const MigArc cancelled = g.arcs[best];
    const int s = cancelled.saddle;
    const int e = cancelled.extremum;
    const CritKind kind = g.node(cancelled.extremum).kind;
    const int twin_arc = best_twin;
    const int twin = g.arcs[twin_arc].extremum;

    const std::vector<std::array<double, 2>> se_line =
        (cancelled.line >= 0) ? g.lines[cancelled.line].polyline
                              : std::vector<std::array<double, 2>>{};
    const std::vector<std::array<double, 2>> se2_line =
        (g.arcs[twin_arc].line >= 0) ? g.lines[g.arcs[twin_arc].line].polyline
                                     : std::vector<std::array<double, 2>>{};

    // drop the saddle with all its arcs
    for (size_t k = 0; k < g.arcs.size(); ++k)
      if (arc_alive[k] && g.arcs[k].saddle == s) arc_alive[k] = false;
    node_alive[static_cast<size_t>(s)] = false;

    // reconnect every other saddle formerly adjacent to e onto the twin
    for (size_t k = 0; k < g.arcs.size(); ++k) {
      if (!arc_alive[k]) continue;
      MigArc& b = g.arcs[k];
      if (b.extremum != e) continue;
      const std::vector<std::array<double, 2>> te_line =
          (b.line >= 0) ? g.lines[b.line].polyline : std::vector<std::array<double, 2>>{};
      SeparatrixLine merged;
      merged.saddle_id = b.saddle;
      merged.extremum_id = twin;
      merged.ascending = (kind == CritKind::maximum);
      merged.polyline = concat_polylines(te_line, se_line, se2_line);
      g.lines.push_back(std::move(merged));
      b.extremum = twin;
      b.persistence = std::fabs(g.node(b.saddle).height - g.node(twin).height);
      b.line = static_cast<int>(g.lines.size()) - 1;
    }
    node_alive[static_cast<size_t>(e)] = false;
  }

  // compact: keep surviving nodes under their original ids
  MorseIncidenceGraph out;
  out.nodes = g.nodes;
  for (size_t i = 0; i < g.nodes.size(); ++i)
    if (!node_alive[i]) out.nodes[i].id = -1;  // tombstone, excluded from export
  out.lines = g.lines;
  for (size_t i = 0; i < g.arcs.size(); ++i)
    if (arc_alive[i]) out.arcs.push_back(g.arcs[i]);

  // drop tombstoned nodes entirely while preserving ids of the survivors
  std::vector<CriticalPoint> survivors;
  survivors.reserve(out.nodes.size());
  for (const CriticalPoint& p : out.nodes)
    if (p.id >= 0) survivors.push_back(p);
  // ids must stay valid as indices: rebuild with remapping
  std::vector<int> remap(g.nodes.size(), -1);
  for (size_t i = 0, j = 0; i < out.nodes.size(); ++i)
    if (out.nodes[i].id >= 0) remap[i] = static_cast<int>(j++);
  for (CriticalPoint& p : survivors) p.id = remap[static_cast<size_t>(p.id)];
  for (MigArc& a : out.arcs) {
    a.saddle = remap[static_cast<size_t>(a.saddle)];
    a.extremum = remap[static_cast<size_t>(a.extremum)];
  }
  for (SeparatrixLine& l : out.lines) {
    if (l.saddle_id >= 0) l.saddle_id = remap[static_cast<size_t>(l.saddle_id)];
    if (l.extremum_id >= 0) l.extremum_id = remap[static_cast<size_t>(l.extremum_id)];
  }
  out.nodes = std::move(survivors);
  return out;
}

MigExportMeta make_export_meta(const RasterGrid& georef, const NormalizeParams& norm,
                               double threshold_m, const std::string& provenance,
                               const std::string& mesh_config) {
  MigExportMeta m;
  m.provenance = provenance;
  m.mesh_config = mesh_config;
  m.threshold_m = threshold_m;
  m.norm = norm;
  m.width = georef.width;
  m.height = georef.height;
  m.cell_size = georef.cell_size;
  m.x0 = georef.x0;
  m.y0 = georef.y0;
  return m;
}

void save_mig_json(const MorseIncidenceGraph& mig, const MigExportMeta& meta,
                   const std::filesystem::path& path) {
  nlohmann::json j;
  j["provenance"] = meta.provenance;
  if (!meta.mesh_config.empty()) j["mesh_config"] = meta.mesh_config;
  j["metadata"] = {
      {"threshold_m", meta.threshold_m},
      {"normalize_params", {{"h_min", meta.norm.h_min}, {"h_max", meta.norm.h_max}}},
      {"grid",
       {{"width", meta.width},
        {"height", meta.height},
        {"cell_size", meta.cell_size},
        {"x0", meta.x0},
        {"y0", meta.y0}}},
  };

  const double half_range = 0.5 * (meta.norm.h_max - meta.norm.h_min);
  nlohmann::json nodes = nlohmann::json::array();
  for (const CriticalPoint& p : mig.nodes) {
    nodes.push_back({{"id", p.id},
                     {"x", meta.world_x(p.x)},
                     {"y", meta.world_y(p.y)},
                     {"height_m", meta.norm.to_world(p.height)},
                     {"kind", to_string(p.kind)},
                     {"boundary", p.boundary}});
  }
  j["nodes"] = std::move(nodes);

  nlohmann::json arcs = nlohmann::json::array();
  for (const MigArc& a : mig.arcs) {
    nlohmann::json poly = nlohmann::json::array();
    if (a.line >= 0)
      for (const auto& pt : mig.lines[a.line].polyline)
        poly.push_back({meta.world_x(pt[0]), meta.world_y(pt[1])});
    arcs.push_back({{"saddle", a.saddle},
                    {"extremum", a.extremum},
                    {"persistence_m", a.persistence * half_range},
                    {"polyline", std::move(poly)}});
  }
  j["arcs"] = std::move(arcs);

  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(1, '\t') << "\n";
  if (!out) throw IoError("write failed for " + path.string());
}

std::pair<MorseIncidenceGraph, MigExportMeta> load_mig_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed MIG file " + path.string() + ": " + e.what());
  }

  MigExportMeta meta;
  try {
    meta.provenance = j.at("provenance").get<std::string>();
    meta.mesh_config = j.value("mesh_config", "");
    const auto& md = j.at("metadata");
    meta.threshold_m = md.at("threshold_m").get<double>();
    meta.norm.h_min = md.at("normalize_params").at("h_min").get<double>();
    meta.norm.h_max = md.at("normalize_params").at("h_max").get<double>();
    const auto& gd = md.at("grid");
    meta.width = gd.at("width").get<int>();
    meta.height = gd.at("height").get<int>();
    meta.cell_size = gd.at("cell_size").get<double>();
    meta.x0 = gd.at("x0").get<double>();
    meta.y0 = gd.at("y0").get<double>();

    MorseIncidenceGraph mig;
    const double half_range = 0.5 * (meta.norm.h_max - meta.norm.h_min);
    for (const auto& n : j.at("nodes")) {
      CriticalPoint p;
      p.id = n.at("id").get<int>();
      p.x = meta.norm_x(n.at("x").get<double>());
      p.y = meta.norm_y(n.at("y").get<double>());
      p.height = meta.norm.to_norm(n.at("height_m").get<double>());
      p.kind = crit_kind_from_string(n.at("kind").get<std::string>());
      p.boundary = n.value("boundary", false);
      p.discrete = meta.provenance == "discrete";
      mig.nodes.push_back(p);
    }
    for (const auto& a : j.at("arcs")) {
      MigArc arc;
      arc.saddle = a.at("saddle").get<int>();
      arc.extremum = a.at("extremum").get<int>();
      arc.persistence = a.at("persistence_m").get<double>() / half_range;
      if (a.contains("polyline") && !a.at("polyline").empty()) {
        SeparatrixLine line;
        line.saddle_id = arc.saddle;
        line.extremum_id = arc.extremum;
        for (const auto& pt : a.at("polyline"))
          line.polyline.push_back({meta.norm_x(pt.at(0).get<double>()),
                                   meta.norm_y(pt.at(1).get<double>())});
        mig.lines.push_back(std::move(line));
        arc.line = static_cast<int>(mig.lines.size()) - 1;
      }
      mig.arcs.push_back(arc);
    }
    for (const MigArc& a : mig.arcs)
      if (a.saddle < 0 || a.saddle >= static_cast<int>(mig.nodes.size()) || a.extremum < 0 ||
          a.extremum >= static_cast<int>(mig.nodes.size()))
        throw DataError("MIG arc references a missing node id");
    return {std::move(mig), std::move(meta)};
  } catch (const nlohmann::json::exception& e) {
    throw DataError("invalid MIG file " + path.string() + ": " + e.what());
  }
}

}  // namespace terra
