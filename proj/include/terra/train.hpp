#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "terra/raster.hpp"
#include "terra/siren.hpp"

namespace terra {

struct TrainConfig {
  int steps = 3000;
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;  // used by callers for weight init; training itself is deterministic
};

struct StepLog {
  int step = 0;         // 1-based, cumulative across progressive stages
  int level = -1;       // pyramid level of the stage target (-1 for plain train)
  double loss = 0.0;
  double wall_s = 0.0;  // seconds since training started
};

using TrainLog = std::vector<StepLog>;

// Grid pixel centres mapped to [-1,1]^2, matching RasterGrid::coord_*.
Eigen::Matrix2Xd grid_coords(const RasterGrid& grid);

// Called after each completed optimizer step (loss-curve checkpoints etc.);
// must not mutate the network.
using StepObserver = std::function<void(const SirenNetwork&, const StepLog&)>;

// Full-grid MSE fitting with Adam. The target must be in normalized value
// range. Throws DivergenceError if the loss turns non-finite.
TrainLog train(SirenNetwork& net, const RasterGrid& target, const TrainConfig& config,
               const StepObserver& observer = {});

// Coarse-to-fine schedule over pyramid levels L-1 .. 1; level 0 is never a
// training target. total_steps is split equally across stages (remainder to
// the last stage); weights carry over between stages.
TrainLog train_progressive(SirenNetwork& net, const GaussianPyramid& pyramid, int total_steps,
                           const TrainConfig& config, const StepObserver& observer = {});

// residual(i,j) = original(i,j) - surface(coord(i,j)) at full resolution
RasterGrid compute_residual(const SirenNetwork& surface, const RasterGrid& original);

struct SpgModel {
  SirenNetwork surface;
  SirenNetwork geometry;
  NormalizeParams normalize_params;
};

// surface(x) + geometry(x), per coordinate column
Eigen::VectorXd spg_infer(const SpgModel& model, const Eigen::Matrix2Xd& coords);

// Network inference reshaped onto a grid's pixel centres.
RasterGrid infer_raster(const SirenNetwork& net, const RasterGrid& ref);
RasterGrid infer_raster_spg(const SpgModel& model, const RasterGrid& ref);

}  // namespace terra
