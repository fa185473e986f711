#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "terra/field.hpp"
#include "terra/topo.hpp"

namespace terra {

struct SmoothTopoParams {
  int sample_resolution = 128;
  int clones = 4;
  std::uint64_t seed = 0;
  double g_tol = 1e-7;          // gradient-norm acceptance threshold
  double eig_tol = 1e-8;        // Hessian degeneracy threshold
  double eta0 = 1e-2;           // initial descent step
  int max_iters = 500;
  bool newton_polish = true;    // quadratic cleanup once the descent is close
  double dedupe_radius = 0.0;
  double snap_radius = 0.0;
  double saddle_offset = 0.0;   // separatrix launch distance from the saddle
  double trace_step = 0.0;      // RK4 arc-length step
  int max_trace_steps = 0;
  // shrink the analysis domain to [-1+m, 1-m]^2; traces terminate there
  double domain_margin = 0.0;
};

// Defaults tied to the pixel size of the grid the field was fitted on
// (level-1 of the pyramid for a trained surface model).
SmoothTopoParams make_smooth_params(int level1_width, std::uint64_t seed = 0);

// Banchoff-style sign-change scan on a sample_resolution^2 grid plus seeded
// jittered clones of every candidate.
std::vector<std::array<double, 2>> seed_candidates(const FieldOracle& field,
                                                   const SmoothTopoParams& params);

enum class RefineStatus { converged, out_of_domain, max_iters, degenerate };

struct RefineResult {
  RefineStatus status = RefineStatus::max_iters;
  double x = 0.0, y = 0.0;
  Jet2 jet;
  int iters = 0;
};

// Gradient-norm descent x <- x + eta*d with d = -H grad (the exact gradient
// of 0.5*||grad f||^2), backtracking step control, optional Newton cleanup.
RefineResult refine_critical_point(const FieldOracle& field, double x0, double y0,
                                   const SmoothTopoParams& params);

// Eigenvalue-sign classification; throws DataError when an eigenvalue
// magnitude is at or below eig_tol.
CritKind classify_critical_point(const Jet2& jet, double eig_tol);

struct DedupeResult {
  std::vector<CriticalPoint> points;  // ids assigned by (height, x, y) order
  std::vector<std::pair<CriticalPoint, CriticalPoint>> cross_kind_warnings;
};

// Greedy same-kind clustering: representative is the lowest-gradient-norm
// member of each cluster.
DedupeResult dedupe(const std::vector<CriticalPoint>& points, double radius);

enum class TraceTerminus { extremum, boundary, max_steps, stalled };

struct TraceResult {
  TraceTerminus terminus = TraceTerminus::max_steps;
  bool ascending = true;
  int extremum_id = -1;   // valid when terminus == extremum
  double end_value = 0.0; // field value at the terminus
  std::vector<std::array<double, 2>> polyline;
};

// Four separatrices per saddle: two ascending launches along the positive
// Hessian eigenvector, two descending along the negative one, integrated by
// fixed-step RK4 on the normalized gradient field.
std::array<TraceResult, 4> trace_separatrices(const FieldOracle& field,
                                              const CriticalPoint& saddle,
                                              const std::vector<CriticalPoint>& critical_points,
                                              const SmoothTopoParams& params);

// Assembles nodes and arcs; boundary-terminated traces get flagged virtual
// nodes, failed traces are reported back as warnings.
struct SmoothTopoResult {
  MorseIncidenceGraph mig;
  std::vector<std::string> warnings;
};

MorseIncidenceGraph build_mig(const std::vector<CriticalPoint>& points,
                              const std::vector<TraceResult>& traces,
                              const std::vector<int>& trace_saddle_ids,
                              std::vector<std::string>* warnings = nullptr);

// Full pipeline: seed -> refine -> classify -> dedupe -> trace -> MIG.
SmoothTopoResult extract_topology(const FieldOracle& field, const SmoothTopoParams& params);

}  // namespace terra
