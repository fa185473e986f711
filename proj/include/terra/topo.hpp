#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "terra/raster.hpp"

namespace terra {

enum class CritKind { minimum, saddle, maximum };

const char* to_string(CritKind kind);
CritKind crit_kind_from_string(const std::string& s);

struct CriticalPoint {
  int id = -1;
  double x = 0.0, y = 0.0;   // normalized coordinates
  double height = 0.0;       // normalized value
  CritKind kind = CritKind::minimum;
  double lambda1 = 0.0, lambda2 = 0.0;  // Hessian eigenvalues, ascending
  double grad_norm = 0.0;    // residual gradient norm at acceptance
  bool boundary = false;     // virtual node for a boundary-terminated trace
  bool discrete = false;     // produced by the discrete pipeline
};

struct SeparatrixLine {
  int saddle_id = -1;
  int extremum_id = -1;
  bool ascending = true;  // toward a maximum
  std::vector<std::array<double, 2>> polyline;  // saddle first
};

struct MigArc {
  int saddle = -1;
  int extremum = -1;
  double persistence = 0.0;
  int line = -1;  // index into MorseIncidenceGraph::lines, -1 if none
};

struct MorseIncidenceGraph {
  std::vector<CriticalPoint> nodes;  // indexed by id
  std::vector<MigArc> arcs;
  std::vector<SeparatrixLine> lines;

  const CriticalPoint& node(int id) const { return nodes[static_cast<size_t>(id)]; }
  int count(CritKind kind, bool include_boundary = false) const;
  // #min - #saddle + #max over real (non-boundary) nodes
  int alternating_sum() const;
};

// Persistence-driven cancellation: repeatedly removes the lowest-persistence
// legal saddle-extremum pair below the threshold and reconnects the orphaned
// saddles to the surviving twin extremum. Boundary nodes never cancel.
MorseIncidenceGraph simplify_mig(const MorseIncidenceGraph& mig, double threshold);

struct MigExportMeta {
  std::string provenance;   // "smooth" or "discrete"
  std::string mesh_config;  // discrete only: "mesh1", "mesh2", "grad_aligned"
  double threshold_m = 0.0;
  NormalizeParams norm;
  int width = 0, height = 0;
  double cell_size = 1.0, x0 = 0.0, y0 = 0.0;

  // normalized coords -> world metres
  double world_x(double xn) const { return x0 + (xn + 1.0) * 0.5 * (width * cell_size); }
  double world_y(double yn) const { return y0 + (yn + 1.0) * 0.5 * (height * cell_size); }
  double norm_x(double xw) const { return 2.0 * (xw - x0) / (width * cell_size) - 1.0; }
  double norm_y(double yw) const { return 2.0 * (yw - y0) / (height * cell_size) - 1.0; }
};

MigExportMeta make_export_meta(const RasterGrid& georef, const NormalizeParams& norm,
                               double threshold_m, const std::string& provenance,
                               const std::string& mesh_config = "");

// Structured-text export with coordinates and heights in world metres.
void save_mig_json(const MorseIncidenceGraph& mig, const MigExportMeta& meta,
                   const std::filesystem::path& path);
std::pair<MorseIncidenceGraph, MigExportMeta> load_mig_json(const std::filesystem::path& path);

}  // namespace terra
