#pragma once

#include <cstdint>
#include <string>

namespace terra::cli {

struct NetOpts {
  int hidden_layers = 3;
  int hidden_units = 128;
  double omega0 = 30.0;
};

struct FitOpts {
  std::string input;
  std::string out_dir = ".";
  std::string profile = "desk";
  NetOpts net;
  int pyramid_levels = 4;
  double sigma = 4.0;
  int steps_surface = 3000;
  int steps_geometry = 3000;
  double learning_rate = 1e-4;
  std::uint64_t seed = 1;
  bool ablation = false;
  int ablation_units = 0;  // 0: derive from the profile
  int eval_every = 25;     // ablation PSNR-curve checkpoint interval
};

struct SynthOpts {
  int size = 256;
  int bumps = 8;
  double h_min = 0.0;
  double h_max = 200.0;
  std::uint64_t seed = 1;
  int detail_bumps = 0;
  double detail_amp_m = 2.0;
  double taper = 0.0;
  std::string out = "synthetic.asc";
};

struct EvalOpts {
  std::string input;
  std::string model_dir = ".";
  std::string out = "metrics.json";
};

struct TopoOpts {
  std::string input;
  std::string model_dir = ".";
  std::string out_dir = ".";
  double threshold_m = 1.0;
  int sample_resolution = 0;  // 0: level-1 width
  double margin = 0.0;        // analysis-domain margin in normalized units
  std::uint64_t seed = 1;
};

struct FormanOpts {
  std::string input;
  std::string mesh = "all";  // mesh1 | mesh2 | aligned | all
  std::string out_dir = ".";
  double threshold_m = 1.0;
};

struct CompareOpts {
  std::string smooth;
  std::string mesh1;
  std::string mesh2;
  std::string match_ref;  // defaults to mesh1
  double radius_m = 0.0;  // 0: two level-1 pixels
  std::string out = "compare.json";
};

struct NoiseSweepOpts {
  std::string input;
  std::string out_dir = ".";
  int rounds = 5;
  int levels = 7;
  double base_variance = 1e-3;
  double threshold_m = 1.0;
  NetOpts net{3, 64, 30.0};
  int pyramid_levels = 4;
  double sigma = 4.0;
  int steps_surface = 900;
  double learning_rate = 1e-4;
  double radius_scale = 2.0;  // matching radius in level-1 pixels
  std::uint64_t seed = 1;
};

struct TopographyOpts {
  std::string input;
  std::string model_dir = ".";
  std::string out_dir = ".";
};

struct RenderOpts {
  std::string input;
  std::string mig;  // optional overlay source
  std::string out_dir = ".";
};

int cmd_synth(const SynthOpts& opts);
int cmd_fit(const FitOpts& opts);
int cmd_eval(const EvalOpts& opts);
int cmd_topo(const TopoOpts& opts);
int cmd_forman(const FormanOpts& opts);
int cmd_compare(const CompareOpts& opts);
int cmd_noise_sweep(const NoiseSweepOpts& opts);
int cmd_topography(const TopographyOpts& opts);
int cmd_render(const RenderOpts& opts);

// width of the single ablation network whose parameter count best matches
// two nets of the given width
int matched_single_width(int hidden_layers, int hidden_units);

}  // namespace terra::cli
