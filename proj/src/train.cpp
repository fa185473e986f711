#include "terra/train.hpp"

#include <chrono>
#include <cmath>

#include "terra/error.hpp"

namespace terra {

Eigen::Matrix2Xd grid_coords(const RasterGrid& grid) {
  Eigen::Matrix2Xd coords(2, grid.size());
  Eigen::Index i = 0;
  for (int r = 0; r < grid.height; ++r) {
    const double y = grid.coord_y(r);
    for (int c = 0; c < grid.width; ++c, ++i) {
      coords(0, i) = grid.coord_x(c);
      coords(1, i) = y;
    }
  }
  return coords;
}

namespace {

constexpr Eigen::Index kBlock = 16384;

struct AdamState {
  std::vector<Eigen::MatrixXd> mW, vW;
  std::vector<Eigen::VectorXd> mb, vb;
  int t = 0;

  explicit AdamState(const SirenNetwork& net) {
    for (const SirenLayer& l : net.layers) {
      mW.push_back(Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()));
      vW.push_back(Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()));
      mb.push_back(Eigen::VectorXd::Zero(l.bias.size()));
      vb.push_back(Eigen::VectorXd::Zero(l.bias.size()));
    }
  }
};

struct Grads {
  std::vector<Eigen::MatrixXd> gW;
  std::vector<Eigen::VectorXd> gb;

  explicit Grads(const SirenNetwork& net) {
    for (const SirenLayer& l : net.layers) {
      gW.push_back(Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()));
      gb.push_back(Eigen::VectorXd::Zero(l.bias.size()));
    }
  }
  void zero() {
    for (auto& g : gW) g.setZero();
    for (auto& g : gb) g.setZero();
  }
};

// forward/backward scratch reused across blocks and steps
struct Scratch {
  std::vector<Eigen::MatrixXd> act;  // act[l] = input to layer l (act[0] = coords block)
  std::vector<Eigen::MatrixXd> cosz; // cos(omega*z) per sine layer
  Eigen::MatrixXd z, delta, dprev;
};

// accumulates gradient and squared-error sum for one block of columns
double block_pass(const SirenNetwork& net, const Eigen::Matrix2Xd& coords,
                  const Eigen::VectorXd& targets, Eigen::Index start, Eigen::Index nb,
                  Grads& grads, Scratch& s, double inv_n) {
  const size_t L = net.layers.size();
  s.act.resize(L + 1);
  s.cosz.resize(L);
  s.act[0] = coords.middleCols(start, nb);
  const double w0 = net.omega0;

  for (size_t l = 0; l < L; ++l) {
    const SirenLayer& layer = net.layers[l];
    s.z.noalias() = layer.weight * s.act[l];
    s.z.colwise() += layer.bias;
    if (layer.sine) {
      s.act[l + 1].resizeLike(s.z);
      s.cosz[l].resizeLike(s.z);
      const double* zp = s.z.data();
      double* ap = s.act[l + 1].data();
      double* cp = s.cosz[l].data();
      const Eigen::Index n = s.z.size();
      for (Eigen::Index i = 0; i < n; ++i) {
        ap[i] = std::sin(w0 * zp[i]);
        cp[i] = w0 * std::cos(w0 * zp[i]);
      }
    } else {
      s.act[l + 1] = s.z;
    }
  }

  // d(loss)/d(output), loss = sum((y - t)^2) / N over the whole grid
  Eigen::RowVectorXd err = s.act[L].row(0) - targets.segment(start, nb).transpose();
  const double sq_err = err.squaredNorm();
  s.delta = (2.0 * inv_n) * err;

  for (size_t l = L; l-- > 0;) {
    const SirenLayer& layer = net.layers[l];
    if (layer.sine) s.delta.array() *= s.cosz[l].array();
    grads.gW[l].noalias() += s.delta * s.act[l].transpose();
    grads.gb[l].noalias() += s.delta.rowwise().sum();
    if (l > 0) {
      s.dprev.noalias() = layer.weight.transpose() * s.delta;
      s.delta.swap(s.dprev);
    }
  }
  return sq_err;
}

void adam_update(SirenNetwork& net, const Grads& grads, AdamState& adam, const TrainConfig& cfg) {
  ++adam.t;
  const double bc1 = 1.0 - std::pow(cfg.beta1, adam.t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, adam.t);
  for (size_t l = 0; l < net.layers.size(); ++l) {
    auto& layer = net.layers[l];
    adam.mW[l] = cfg.beta1 * adam.mW[l] + (1.0 - cfg.beta1) * grads.gW[l];
    adam.vW[l] = cfg.beta2 * adam.vW[l].array() + (1.0 - cfg.beta2) * grads.gW[l].array().square();
    layer.weight.array() -=
        cfg.learning_rate * (adam.mW[l].array() / bc1) / ((adam.vW[l].array() / bc2).sqrt() + cfg.epsilon);
    adam.mb[l] = cfg.beta1 * adam.mb[l] + (1.0 - cfg.beta1) * grads.gb[l];
    adam.vb[l] = cfg.beta2 * adam.vb[l].array() + (1.0 - cfg.beta2) * grads.gb[l].array().square();
    layer.bias.array() -=
        cfg.learning_rate * (adam.mb[l].array() / bc1) / ((adam.vb[l].array() / bc2).sqrt() + cfg.epsilon);
  }
}

void train_stage(SirenNetwork& net, const RasterGrid& target, const TrainConfig& cfg, int steps,
                 int level, int step_offset, std::chrono::steady_clock::time_point t0,
                 AdamState& adam, TrainLog& log, const StepObserver& observer) {
  const Eigen::Matrix2Xd coords = grid_coords(target);
  Eigen::VectorXd targets(target.size());
  for (size_t i = 0; i < target.size(); ++i) targets(static_cast<Eigen::Index>(i)) = target.values[i];

  const Eigen::Index n = coords.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  Grads grads(net);
  Scratch scratch;

  for (int step = 0; step < steps; ++step) {
    grads.zero();
    double sq = 0.0;
    for (Eigen::Index start = 0; start < n; start += kBlock)
      sq += block_pass(net, coords, targets, start, std::min(kBlock, n - start), grads, scratch, inv_n);
    const double loss = sq * inv_n;
    if (!std::isfinite(loss))
      throw DivergenceError(step_offset + step + 1,
                            "training diverged: non-finite loss at step " +
                                std::to_string(step_offset + step + 1));
    adam_update(net, grads, adam, cfg);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    log.push_back({step_offset + step + 1, level, loss, wall});
    if (observer) observer(net, log.back());
  }
}

}  // namespace

TrainLog train(SirenNetwork& net, const RasterGrid& target, const TrainConfig& config,
               const StepObserver& observer) {
  if (config.steps < 1) throw DataError("train: steps must be >= 1");
  if (!(config.learning_rate > 0.0)) throw DataError("train: learning rate must be positive");
  TrainLog log;
  AdamState adam(net);
  train_stage(net, target, config, config.steps, -1, 0, std::chrono::steady_clock::now(), adam,
              log, observer);
  return log;
}

TrainLog train_progressive(SirenNetwork& net, const GaussianPyramid& pyramid, int total_steps,
                           const TrainConfig& config, const StepObserver& observer) {
  if (pyramid.levels() < 2) throw DataError("train_progressive: pyramid needs >= 2 levels");
  if (total_steps < 1) throw DataError("train_progressive: total_steps must be >= 1");

  const int stages = pyramid.levels() - 1;  // levels L-1 .. 1, never level 0
  const int base = total_steps / stages;
  TrainLog log;
  AdamState adam(net);
  const auto t0 = std::chrono::steady_clock::now();
  int offset = 0;
  for (int s = 0; s < stages; ++s) {
    const int level = pyramid.levels() - 1 - s;
    int steps = base;
    if (s == stages - 1) steps = total_steps - base * (stages - 1);
    train_stage(net, pyramid.layers[level], config, steps, level, offset, t0, adam, log, observer);
    offset += steps;
  }
  return log;
}

RasterGrid compute_residual(const SirenNetwork& surface, const RasterGrid& original) {
  RasterGrid res = original;
  const Eigen::VectorXd pred = forward(surface, grid_coords(original));
  for (size_t i = 0; i < res.values.size(); ++i)
    res.values[i] = original.values[i] - pred(static_cast<Eigen::Index>(i));
  return res;
}

Eigen::VectorXd spg_infer(const SpgModel& model, const Eigen::Matrix2Xd& coords) {
  return forward(model.surface, coords) + forward(model.geometry, coords);
}

RasterGrid infer_raster(const SirenNetwork& net, const RasterGrid& ref) {
  RasterGrid out = ref;
  const Eigen::VectorXd pred = forward(net, grid_coords(ref));
  for (size_t i = 0; i < out.values.size(); ++i) out.values[i] = pred(static_cast<Eigen::Index>(i));
  return out;
}

RasterGrid infer_raster_spg(const SpgModel& model, const RasterGrid& ref) {
  RasterGrid out = ref;
  const Eigen::VectorXd pred = spg_infer(model, grid_coords(ref));
  for (size_t i = 0; i < out.values.size(); ++i) out.values[i] = pred(static_cast<Eigen::Index>(i));
  return out;
}

}  // namespace terra
