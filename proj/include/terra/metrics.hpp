#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "terra/raster.hpp"
#include "terra/topo.hpp"

namespace terra {

// 10*log10(1/MSE) with peak signal 1.0; identical inputs hit the 200 dB cap.
double psnr(const RasterGrid& a, const RasterGrid& b);

// Windowed SSIM: 11x11 Gaussian window (sigma 1.5), C1=(0.01*L)^2,
// C2=(0.03*L)^2, dynamic range L=2 for [-1,1] data, mean over fully interior
// windows.
double ssim(const RasterGrid& a, const RasterGrid& b);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

// Mean/std of |log(|A|+eps) - log(|B|+eps)| over the padded spectra.
MeanStd log_magnitude_diff(const RasterGrid& a, const RasterGrid& b);

struct GradientDiff {
  MeanStd norm;      // | ||g_a|| - ||g_r|| |
  MeanStd direction; // unsigned angle between the fields, radians
  size_t direction_samples = 0;  // pixels with both norms >= 1e-9
};

GradientDiff gradient_field_diff(const RasterGrid& ax, const RasterGrid& ay,
                                 const RasterGrid& rx, const RasterGrid& ry);

struct MatchReport {
  double precision = 0.0;
  double recall = 0.0;
  double f05 = 0.0;
  std::vector<std::pair<int, int>> matches;  // (pred id, ref id)
};

// Same-kind greedy nearest-pair matching under the given radius; boundary
// nodes are ignored.
MatchReport match_critical_points(const std::vector<CriticalPoint>& pred,
                                  const std::vector<CriticalPoint>& ref, double radius);

double f05_score(double precision, double recall);

struct PersistenceDiagram {
  std::vector<std::pair<double, double>> points;  // (birth, death), birth <= death
};

// One point per non-boundary saddle-extremum arc.
PersistenceDiagram diagram_from_mig(const MorseIncidenceGraph& mig);

void save_diagram_csv(const PersistenceDiagram& d, const std::filesystem::path& path);

// 1-Wasserstein distance with L-infinity ground metric and diagonal
// augmentation, solved exactly by assignment.
double wasserstein(const PersistenceDiagram& a, const PersistenceDiagram& b);

// min(ws_psi_m1, ws_psi_m2) / ws_m1_m2; throws DataError on a zero denominator.
double ws_ratio(double ws_psi_m1, double ws_psi_m2, double ws_m1_m2);

// Exact minimum-cost perfect assignment on a square matrix (Hungarian
// algorithm with potentials, O(n^3)).
double solve_assignment(const std::vector<std::vector<double>>& cost, std::vector<int>& match);

}  // namespace terra
