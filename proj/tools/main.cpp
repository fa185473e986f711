#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "terra/error.hpp"

using namespace terra;
using namespace terra::cli;

int main(int argc, char** argv) {
  CLI::App app{"terra - terrain surface fitting and Morse analysis toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value configuration file; flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::ignore_all);

  std::string profile = "desk";
  app.add_option("--profile", profile, "parameter profile: desk (256^2 scale) or paper (1000^2)")
      ->check(CLI::IsMember({"desk", "paper"}));

  SynthOpts synth;
  auto* s_synth = app.add_subcommand("synth", "generate a synthetic bump terrain");
  s_synth->add_option("--size", synth.size, "side length in samples")->check(CLI::Range(16, 65536));
  s_synth->add_option("--bumps", synth.bumps, "number of Gaussian bumps");
  s_synth->add_option("--hmin", synth.h_min, "minimum height (m)");
  s_synth->add_option("--hmax", synth.h_max, "maximum height (m)");
  s_synth->add_option("--seed", synth.seed, "random seed");
  s_synth->add_option("--detail-bumps", synth.detail_bumps, "fine-detail bump count");
  s_synth->add_option("--taper", synth.taper, "edge roll-off fraction per side")
      ->check(CLI::Range(0.0, 0.45));
  s_synth->add_option("--detail-amp", synth.detail_amp_m, "fine-detail amplitude (m)");
  s_synth->add_option("--out", synth.out, "output ASCII grid path");

  FitOpts fit;
  auto* s_fit = app.add_subcommand("fit", "train the surface + geometry cascade");
  s_fit->add_option("--input", fit.input, "input ASCII grid")->required();
  s_fit->add_option("--out-dir", fit.out_dir, "output directory");
  s_fit->add_option("--hidden-layers", fit.net.hidden_layers, "hidden layer count");
  s_fit->add_option("--hidden-units", fit.net.hidden_units, "hidden units per layer (0: profile)");
  s_fit->add_option("--omega0", fit.net.omega0, "sine frequency scale");
  s_fit->add_option("--levels", fit.pyramid_levels, "pyramid levels");
  s_fit->add_option("--sigma", fit.sigma, "pyramid blur sigma (samples)");
  s_fit->add_option("--steps-surface", fit.steps_surface, "surface-model training steps");
  s_fit->add_option("--steps-geometry", fit.steps_geometry, "geometry-model training steps");
  s_fit->add_option("--lr", fit.learning_rate, "Adam learning rate");
  s_fit->add_option("--seed", fit.seed, "random seed");
  s_fit->add_flag("--ablation", fit.ablation, "also train a parameter-matched single model");
  s_fit->add_option("--ablation-units", fit.ablation_units, "single-model width override");
  s_fit->add_option("--eval-every", fit.eval_every, "ablation PSNR checkpoint interval");
  fit.net.hidden_units = 0;  // resolved from the profile unless set

  EvalOpts eval;
  auto* s_eval = app.add_subcommand("eval", "fitting metrics for a trained model");
  s_eval->add_option("--input", eval.input, "input ASCII grid")->required();
  s_eval->add_option("--model-dir", eval.model_dir, "directory with model.json + weights");
  s_eval->add_option("--out", eval.out, "report filename (inside model dir)");

  TopoOpts topo;
  auto* s_topo = app.add_subcommand("topo", "Morse analysis of the smooth surface model");
  s_topo->add_option("--input", topo.input, "input ASCII grid")->required();
  s_topo->add_option("--model-dir", topo.model_dir, "directory with model.json + weights");
  s_topo->add_option("--out-dir", topo.out_dir, "output directory");
  s_topo->add_option("--threshold-m", topo.threshold_m, "persistence threshold in metres")
      ->check(CLI::NonNegativeNumber);
  s_topo->add_option("--sample-resolution", topo.sample_resolution, "candidate seeding grid");
  s_topo->add_option("--margin", topo.margin, "analysis-domain margin (normalized units)")
      ->check(CLI::Range(0.0, 0.45));
  s_topo->add_option("--seed", topo.seed, "jitter seed");

  FormanOpts forman;
  auto* s_forman = app.add_subcommand("forman", "discrete Morse baseline on the raster");
  s_forman->add_option("--input", forman.input, "input ASCII grid")->required();
  s_forman->add_option("--mesh", forman.mesh, "mesh1 | mesh2 | aligned | all")
      ->check(CLI::IsMember({"mesh1", "mesh2", "aligned", "all"}));
  s_forman->add_option("--out-dir", forman.out_dir, "output directory");
  s_forman->add_option("--threshold-m", forman.threshold_m, "persistence threshold in metres")
      ->check(CLI::NonNegativeNumber);

  CompareOpts compare;
  auto* s_compare = app.add_subcommand("compare", "smooth-vs-discrete topology alignment");
  s_compare->add_option("--smooth", compare.smooth, "smooth MIG export")->required();
  s_compare->add_option("--mesh1", compare.mesh1, "Mesh1 MIG export")->required();
  s_compare->add_option("--mesh2", compare.mesh2, "Mesh2 MIG export")->required();
  s_compare->add_option("--ref", compare.match_ref, "matching reference MIG (default mesh1)");
  s_compare->add_option("--radius-m", compare.radius_m, "matching radius in metres");
  s_compare->add_option("--out", compare.out, "report path");

  NoiseSweepOpts sweep;
  auto* s_sweep = app.add_subcommand("noise-sweep", "topology robustness against input noise");
  s_sweep->add_option("--input", sweep.input, "clean reference ASCII grid")->required();
  s_sweep->add_option("--out-dir", sweep.out_dir, "output directory");
  s_sweep->add_option("--rounds", sweep.rounds, "rounds per noise level")->check(CLI::Range(1, 64));
  s_sweep->add_option("--levels", sweep.levels, "noise levels")->check(CLI::Range(1, 16));
  s_sweep->add_option("--base-variance", sweep.base_variance, "variance of the first level");
  s_sweep->add_option("--threshold-m", sweep.threshold_m, "persistence threshold in metres");
  s_sweep->add_option("--hidden-units", sweep.net.hidden_units, "surface net width");
  s_sweep->add_option("--levels-pyramid", sweep.pyramid_levels, "pyramid levels");
  s_sweep->add_option("--sigma", sweep.sigma, "pyramid blur sigma");
  s_sweep->add_option("--steps-surface", sweep.steps_surface, "surface training steps per fit");
  s_sweep->add_option("--lr", sweep.learning_rate, "Adam learning rate");
  s_sweep->add_option("--radius-scale", sweep.radius_scale, "matching radius in level-1 pixels");
  s_sweep->add_option("--seed", sweep.seed, "base seed (rounds use seeds 0..rounds-1 forks)");

  TopographyOpts topog;
  auto* s_topog = app.add_subcommand("topography", "analytic slope/aspect/curvature/normals");
  s_topog->add_option("--input", topog.input, "input ASCII grid")->required();
  s_topog->add_option("--model-dir", topog.model_dir, "directory with model.json + weights");
  s_topog->add_option("--out-dir", topog.out_dir, "output directory");

  RenderOpts render;
  auto* s_render = app.add_subcommand("render", "hillshade and optional MIG overlay");
  s_render->add_option("--input", render.input, "input ASCII grid")->required();
  s_render->add_option("--mig", render.mig, "MIG export to overlay");
  s_render->add_option("--out-dir", render.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*s_synth) return cmd_synth(synth);
    if (*s_fit) {
      fit.profile = profile;
      if (fit.net.hidden_units == 0) fit.net.hidden_units = (profile == "paper") ? 256 : 128;
      return cmd_fit(fit);
    }
    if (*s_eval) return cmd_eval(eval);
    if (*s_topo) return cmd_topo(topo);
    if (*s_forman) return cmd_forman(forman);
    if (*s_compare) return cmd_compare(compare);
    if (*s_sweep) return cmd_noise_sweep(sweep);
    if (*s_topog) return cmd_topography(topog);
    if (*s_render) return cmd_render(render);
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 3;
  }
  return 2;
}
