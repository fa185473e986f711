#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "json.hpp"
#include "terra/error.hpp"
#include "terra/image.hpp"
#include "terra/metrics.hpp"
#include "terra/raster.hpp"
#include "terra/rng.hpp"
#include "terra/siren.hpp"
#include "terra/topo.hpp"
#include "terra/topo_discrete.hpp"
#include "terra/topo_smooth.hpp"
#include "terra/topography.hpp"
#include "terra/train.hpp"

namespace terra::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int level1_width(const RasterGrid& g) { return (g.width + 1) / 2; }

double threshold_to_norm(double meters, const NormalizeParams& np) {
  return 2.0 * meters / (np.h_max - np.h_min);
}

void write_loss_csv(const TrainLog& log, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "step,level,loss,wall_s\n";
  char buf[160];
  for (const StepLog& s : log) {
    std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.6f\n", s.step, s.level, s.loss, s.wall_s);
    out << buf;
  }
}

json grid_meta(const RasterGrid& g) {
  return {{"width", g.width},
          {"height", g.height},
          {"cell_size", g.cell_size},
          {"x0", g.x0},
          {"y0", g.y0}};
}

struct ModelBundle {
  SirenNetwork surface;
  SirenNetwork geometry;
  bool has_geometry = false;
  NormalizeParams norm;
  int pyramid_levels = 4;
  double sigma = 4.0;
};

ModelBundle load_model(const fs::path& dir) {
  ModelBundle m;
  std::ifstream in(dir / "model.json");
  if (!in) throw IoError("cannot open " + (dir / "model.json").string());
  json j;
  try {
    in >> j;
    m.norm.h_min = j.at("normalize").at("h_min").get<double>();
    m.norm.h_max = j.at("normalize").at("h_max").get<double>();
    m.pyramid_levels = j.at("pyramid").at("levels").get<int>();
    m.sigma = j.at("pyramid").at("sigma").get<double>();
  } catch (const json::exception& e) {
    throw DataError("invalid model.json: " + std::string(e.what()));
  }
  m.surface = load_weights(dir / "surface.bin");
  if (fs::exists(dir / "geometry.bin")) {
    m.geometry = load_weights(dir / "geometry.bin");
    m.has_geometry = true;
  }
  return m;
}

void save_json(const json& j, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(1, '\t') << "\n";
}

// --- overlay rendering -----------------------------------------------------

struct Rgb {
  std::uint8_t r, g, b;
};

void draw_square(std::vector<std::uint8_t>& img, int w, int h, int cx, int cy, Rgb color) {
  for (int dy = -2; dy <= 2; ++dy)
    for (int dx = -2; dx <= 2; ++dx) {
      const int x = cx + dx, y = cy + dy;
      if (x < 0 || x >= w || y < 0 || y >= h) continue;
      auto* p = &img[(static_cast<size_t>(y) * w + x) * 3];
      p[0] = color.r;
      p[1] = color.g;
      p[2] = color.b;
    }
}

void draw_line(std::vector<std::uint8_t>& img, int w, int h, int x0, int y0, int x1, int y1,
               Rgb color) {
  const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    if (x0 >= 0 && x0 < w && y0 >= 0 && y0 < h) {
      auto* p = &img[(static_cast<size_t>(y0) * w + x0) * 3];
      p[0] = color.r;
      p[1] = color.g;
      p[2] = color.b;
    }
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

// normalized coords -> pixel indices of a w x h raster
std::pair<int, int> to_pixel(double xn, double yn, int w, int h) {
  const int c = static_cast<int>(std::lround((xn + 1.0) * 0.5 * w - 0.5));
  const int r = static_cast<int>(std::lround(h - 1 - ((yn + 1.0) * 0.5 * h - 0.5)));
  return {std::clamp(c, 0, w - 1), std::clamp(r, 0, h - 1)};
}

void render_overlay(const std::vector<std::uint8_t>& shade, int w, int h,
                    const MorseIncidenceGraph& mig, const fs::path& path) {
  std::vector<std::uint8_t> img(shade.size() * 3);
  for (size_t i = 0; i < shade.size(); ++i) img[3 * i] = img[3 * i + 1] = img[3 * i + 2] = shade[i];

  const Rgb asc{214, 69, 47}, desc{47, 98, 214};
  for (const MigArc& a : mig.arcs) {
    if (a.line < 0) continue;
    const SeparatrixLine& l = mig.lines[a.line];
    const Rgb color = l.ascending ? asc : desc;
    for (size_t i = 1; i < l.polyline.size(); ++i) {
      const auto [x0, y0] = to_pixel(l.polyline[i - 1][0], l.polyline[i - 1][1], w, h);
      const auto [x1, y1] = to_pixel(l.polyline[i][0], l.polyline[i][1], w, h);
      draw_line(img, w, h, x0, y0, x1, y1, color);
    }
  }
  for (const CriticalPoint& p : mig.nodes) {
    if (p.boundary) continue;
    const auto [cx, cy] = to_pixel(p.x, p.y, w, h);
    Rgb color{230, 200, 40};  // saddle
    if (p.kind == CritKind::minimum) color = {40, 90, 220};
    if (p.kind == CritKind::maximum) color = {220, 40, 40};
    draw_square(img, w, h, cx, cy, color);
  }
  write_png_rgb(path, w, h, img);
}

// hillshade straight from grid heights via central differences in world units
std::vector<std::uint8_t> grid_hillshade(const RasterGrid& g) {
  NormalMap nm;
  nm.width = g.width;
  nm.height = g.height;
  nm.normals.resize(g.size());
  auto val = [&](int r, int c) {
    return g.at(std::clamp(r, 0, g.height - 1), std::clamp(c, 0, g.width - 1));
  };
  for (int r = 0; r < g.height; ++r)
    for (int c = 0; c < g.width; ++c) {
      const double fx = (val(r, c + 1) - val(r, c - 1)) / (2.0 * g.cell_size);
      const double fy = (val(r - 1, c) - val(r + 1, c)) / (2.0 * g.cell_size);
      const double len = std::sqrt(fx * fx + fy * fy + 1.0);
      nm.normals[static_cast<size_t>(r) * g.width + c] = {-fx / len, -fy / len, 1.0 / len};
    }
  return hillshade(nm);
}

MeshConfig mesh_from_name(const std::string& name) {
  if (name == "mesh1") return MeshConfig::mesh1;
  if (name == "mesh2") return MeshConfig::mesh2;
  if (name == "aligned" || name == "grad_aligned") return MeshConfig::grad_aligned;
  throw DataError("unknown mesh config '" + name + "'");
}

PersistenceDiagram diagram_in_meters(const MorseIncidenceGraph& mig, const NormalizeParams& np) {
  PersistenceDiagram d = diagram_from_mig(mig);
  for (auto& [b, dd] : d.points) {
    b = np.to_world(b);
    dd = np.to_world(dd);
  }
  return d;
}

}  // namespace

int matched_single_width(int hidden_layers, int hidden_units) {
  auto params = [&](long w) {
    return (2 * w + w) + (hidden_layers - 1) * (w * w + w) + (w + 1);
  };
  const long target = 2 * params(hidden_units);
  long best_w = hidden_units;
  long best_diff = std::numeric_limits<long>::max();
  for (long w = hidden_units; w <= 4L * hidden_units; ++w) {
    const long diff = std::labs(params(w) - target);
    if (diff < best_diff) {
      best_diff = diff;
      best_w = w;
    }
  }
  return static_cast<int>(best_w);
}

int cmd_synth(const SynthOpts& opts) {
  if (opts.size < 16) throw DataError("synth: size must be >= 16");
  RasterGrid g = synth_terrain(opts.seed, opts.size, opts.bumps, {opts.h_min, opts.h_max},
                               1.0 / 32.0, 1.0 / 8.0, opts.taper);
  if (opts.detail_bumps > 0) {
    RasterGrid detail =
        synth_terrain(opts.seed ^ 0x9e3779b97f4a7c15ull, opts.size, opts.detail_bumps,
                      {-opts.detail_amp_m, opts.detail_amp_m}, 1.0 / 128.0, 1.0 / 48.0);
    for (size_t i = 0; i < g.values.size(); ++i) g.values[i] += detail.values[i];
  }
  save_ascii_grid(g, opts.out);
  std::printf("synth: %dx%d terrain, %d bumps, heights [%g, %g] m, seed %llu -> %s\n", g.width,
              g.height, opts.bumps, opts.h_min, opts.h_max,
              static_cast<unsigned long long>(opts.seed), opts.out.c_str());
  if (opts.detail_bumps > 0)
    std::printf("synth: injected %d fine-detail bumps at +-%g m\n", opts.detail_bumps,
                opts.detail_amp_m);
  return 0;
}

int cmd_fit(const FitOpts& opts) {
  const RasterGrid input = load_ascii_grid(opts.input);
  auto [norm, np] = normalize(input);
  const GaussianPyramid pyr = build_pyramid(norm, opts.pyramid_levels, opts.sigma);
  fs::create_directories(opts.out_dir);
  const fs::path dir(opts.out_dir);

  TrainConfig cfg;
  cfg.learning_rate = opts.learning_rate;
  cfg.seed = opts.seed;

  const Eigen::Matrix2Xd full_coords = grid_coords(norm);
  Eigen::VectorXd full_target(norm.size());
  for (size_t i = 0; i < norm.size(); ++i) full_target(static_cast<Eigen::Index>(i)) = norm.values[i];
  auto psnr_of = [&](const Eigen::VectorXd& pred) {
    const double mse = (pred - full_target).squaredNorm() / static_cast<double>(pred.size());
    return mse == 0.0 ? 200.0 : 10.0 * std::log10(1.0 / mse);
  };

  std::ofstream curve;
  if (opts.ablation) {
    curve.open(dir / "ablation.csv");
    if (!curve) throw IoError("cannot write ablation.csv");
    curve << "model,step,psnr_db\n";
  }

  // surface model on the pyramid (levels L-1 .. 1)
  SirenNetwork surface =
      init_siren(opts.net.hidden_layers, opts.net.hidden_units, opts.net.omega0, opts.seed);
  StepObserver surf_obs;
  if (opts.ablation) {
    surf_obs = [&](const SirenNetwork& net, const StepLog& s) {
      if (s.step % opts.eval_every != 0) return;
      char buf[96];
      std::snprintf(buf, sizeof buf, "spg,%d,%.6f\n", s.step, psnr_of(forward(net, full_coords)));
      curve << buf;
    };
  }
  const TrainLog surf_log = train_progressive(surface, pyr, opts.steps_surface, cfg, surf_obs);
  write_loss_csv(surf_log, dir / "loss_surface.csv");
  save_weights(surface, dir / "surface.bin");
  std::printf("fit: surface model trained (%d steps, final loss %.3g)\n", opts.steps_surface,
              surf_log.back().loss);

  // geometry model on the full-resolution residual
  const RasterGrid residual = compute_residual(surface, norm);
  SirenNetwork geometry =
      init_siren(opts.net.hidden_layers, opts.net.hidden_units, opts.net.omega0, opts.seed + 1);
  const Eigen::VectorXd surf_pred = forward(surface, full_coords);
  StepObserver geom_obs;
  if (opts.ablation) {
    geom_obs = [&](const SirenNetwork& net, const StepLog& s) {
      if (s.step % opts.eval_every != 0) return;
      char buf[96];
      std::snprintf(buf, sizeof buf, "spg,%d,%.6f\n", opts.steps_surface + s.step,
                    psnr_of(surf_pred + forward(net, full_coords)));
      curve << buf;
    };
  }
  TrainConfig geom_cfg = cfg;
  geom_cfg.steps = opts.steps_geometry;
  const TrainLog geom_log = train(geometry, residual, geom_cfg, geom_obs);
  write_loss_csv(geom_log, dir / "loss_geometry.csv");
  save_weights(geometry, dir / "geometry.bin");
  std::printf("fit: geometry model trained (%d steps, final loss %.3g)\n", opts.steps_geometry,
              geom_log.back().loss);

  json meta = {
      {"normalize", {{"h_min", np.h_min}, {"h_max", np.h_max}}},
      {"grid", grid_meta(input)},
      {"pyramid", {{"levels", opts.pyramid_levels}, {"sigma", opts.sigma}}},
      {"network",
       {{"hidden_layers", opts.net.hidden_layers},
        {"hidden_units", opts.net.hidden_units},
        {"omega0", opts.net.omega0}}},
      {"train",
       {{"steps_surface", opts.steps_surface},
        {"steps_geometry", opts.steps_geometry},
        {"learning_rate", opts.learning_rate},
        {"seed", opts.seed}}},
      {"profile", opts.profile},
  };

  if (opts.ablation) {
    int width = opts.ablation_units;
    if (width == 0)
      width = (opts.profile == "paper") ? 512
                                        : matched_single_width(opts.net.hidden_layers,
                                                               opts.net.hidden_units);
    SirenNetwork single =
        init_siren(opts.net.hidden_layers, width, opts.net.omega0, opts.seed);
    TrainConfig single_cfg = cfg;
    single_cfg.steps = opts.steps_surface + opts.steps_geometry;
    StepObserver single_obs = [&](const SirenNetwork& net, const StepLog& s) {
      if (s.step % opts.eval_every != 0) return;
      char buf[96];
      std::snprintf(buf, sizeof buf, "single,%d,%.6f\n", s.step, psnr_of(forward(net, full_coords)));
      curve << buf;
    };
    const TrainLog single_log = train(single, norm, single_cfg, single_obs);
    write_loss_csv(single_log, dir / "loss_single.csv");
    save_weights(single, dir / "single.bin");
    meta["ablation"] = {{"hidden_units", width}, {"steps", single_cfg.steps}};
    std::printf("fit: ablation single model trained (width %d, %d steps, final loss %.3g)\n",
                width, single_cfg.steps, single_log.back().loss);
  }

  save_json(meta, dir / "model.json");
  return 0;
}

int cmd_eval(const EvalOpts& opts) {
  const RasterGrid input = load_ascii_grid(opts.input);
  const ModelBundle m = load_model(opts.model_dir);
  auto [norm, np] = normalize(input);
  if (std::fabs(np.h_min - m.norm.h_min) > 1e-9 || std::fabs(np.h_max - m.norm.h_max) > 1e-9)
    throw DataError("eval: input range differs from the fitted model's normalization");
  const GaussianPyramid pyr = build_pyramid(norm, m.pyramid_levels, m.sigma);
  const RasterGrid& level1 = pyr.layers[1];

  const RasterGrid surf_raster = infer_raster(m.surface, level1);
  json report;
  report["surface"] = {{"psnr_db", psnr(surf_raster, level1)},
                       {"ssim", ssim(surf_raster, level1)}};

  const MeanStd freq = log_magnitude_diff(level1, surf_raster);
  report["freq_diff"] = {{"mean", freq.mean}, {"std", freq.std}};

  // analytic surface gradient vs pixel-shift gradient of the smoothed target
  std::vector<Jet2> jets;
  SirenField field(m.surface);
  {
    std::vector<double> xs(level1.size()), ys(level1.size());
    size_t i = 0;
    for (int r = 0; r < level1.height; ++r)
      for (int c = 0; c < level1.width; ++c, ++i) {
        xs[i] = level1.coord_x(c);
        ys[i] = level1.coord_y(r);
      }
    field.jets(xs, ys, jets);
  }
  RasterGrid agx = level1, agy = level1;
  for (size_t i = 0; i < jets.size(); ++i) {
    agx.values[i] = jets[i].gx;
    agy.values[i] = jets[i].gy;
  }
  auto [rgx, rgy] = finite_diff_gradient(level1);
  const GradientDiff gd = gradient_field_diff(agx, agy, rgx, rgy);
  report["grad_norm_diff"] = {{"mean", gd.norm.mean}, {"std", gd.norm.std}};
  report["grad_dir_diff_rad"] = {{"mean", gd.direction.mean}, {"std", gd.direction.std}};

  if (m.has_geometry) {
    SpgModel spg{m.surface, m.geometry, np};
    const RasterGrid spg_raster = infer_raster_spg(spg, norm);
    report["spg"] = {{"psnr_db", psnr(spg_raster, norm)}, {"ssim", ssim(spg_raster, norm)}};
  }

  report["units"] = {{"psnr", "dB"},
                     {"grad", "normalized height per normalized coordinate"},
                     {"freq", "natural log magnitude"}};
  save_json(report, fs::path(opts.model_dir) / opts.out);
  std::printf("eval: surface PSNR %.2f dB, SSIM %.6f%s\n",
              report["surface"]["psnr_db"].get<double>(),
              report["surface"]["ssim"].get<double>(),
              m.has_geometry ? "" : " (no geometry model)");
  if (m.has_geometry)
    std::printf("eval: SPG PSNR %.2f dB, SSIM %.6f\n", report["spg"]["psnr_db"].get<double>(),
                report["spg"]["ssim"].get<double>());
  return 0;
}

int cmd_topo(const TopoOpts& opts) {
  const RasterGrid input = load_ascii_grid(opts.input);
  const ModelBundle m = load_model(opts.model_dir);
  auto [norm, np] = normalize(input);
  fs::create_directories(opts.out_dir);
  const fs::path dir(opts.out_dir);

  SmoothTopoParams params = make_smooth_params(
      opts.sample_resolution > 0 ? opts.sample_resolution : level1_width(input), opts.seed);
  params.domain_margin = opts.margin;
  SirenField field(m.surface);
  SmoothTopoResult topo = extract_topology(field, params);
  for (size_t i = 0; i < topo.warnings.size() && i < 5; ++i)
    std::fprintf(stderr, "topo: warning: %s\n", topo.warnings[i].c_str());
  if (topo.warnings.size() > 5)
    std::fprintf(stderr, "topo: ... %zu warnings total\n", topo.warnings.size());

  const double thr = threshold_to_norm(opts.threshold_m, np);
  const MorseIncidenceGraph simplified = simplify_mig(topo.mig, thr);

  const MigExportMeta meta = make_export_meta(input, np, opts.threshold_m, "smooth");
  save_mig_json(simplified, meta, dir / "mig_smooth.json");
  save_diagram_csv(diagram_in_meters(simplified, np), dir / "diagram_smooth.csv");

  const NormalMap nm = normal_map(field, norm, np);
  render_overlay(hillshade(nm), norm.width, norm.height, simplified, dir / "overlay_smooth.png");

  std::printf("topo: %d minima, %d saddles, %d maxima after %.3g m simplification (%zu arcs)\n",
              simplified.count(CritKind::minimum), simplified.count(CritKind::saddle),
              simplified.count(CritKind::maximum), opts.threshold_m, simplified.arcs.size());
  return 0;
}

int cmd_forman(const FormanOpts& opts) {
  const RasterGrid input = load_ascii_grid(opts.input);
  auto [norm, np] = normalize(input);
  fs::create_directories(opts.out_dir);
  const fs::path dir(opts.out_dir);
  const double thr = threshold_to_norm(opts.threshold_m, np);

  std::vector<MeshConfig> configs;
  if (opts.mesh == "all")
    configs = {MeshConfig::mesh1, MeshConfig::mesh2, MeshConfig::grad_aligned};
  else
    configs = {mesh_from_name(opts.mesh)};

  for (MeshConfig cfg : configs) {
    DiscreteTopoResult res = extract_topology_discrete(norm, cfg);
    const MorseIncidenceGraph simplified = simplify_mig(res.mig, thr);
    const std::string name = to_string(cfg);
    const MigExportMeta meta = make_export_meta(input, np, opts.threshold_m, "discrete", name);
    save_mig_json(simplified, meta, dir / ("mig_" + name + ".json"));
    save_diagram_csv(diagram_in_meters(simplified, np), dir / ("diagram_" + name + ".csv"));
    std::printf("forman[%s]: %d minima, %d saddles, %d maxima after %.3g m simplification\n",
                name.c_str(), simplified.count(CritKind::minimum),
                simplified.count(CritKind::saddle), simplified.count(CritKind::maximum),
                opts.threshold_m);
  }
  return 0;
}

int cmd_compare(const CompareOpts& opts) {
  auto [smooth, smeta] = load_mig_json(opts.smooth);
  auto [m1, m1meta] = load_mig_json(opts.mesh1);
  auto [m2, m2meta] = load_mig_json(opts.mesh2);

  MorseIncidenceGraph ref = m1;
  MigExportMeta refmeta = m1meta;
  if (!opts.match_ref.empty()) std::tie(ref, refmeta) = load_mig_json(opts.match_ref);

  // matching radius: metres -> normalized units (default two level-1 pixels)
  double radius_m = opts.radius_m;
  if (radius_m <= 0.0) radius_m = 4.0 * smeta.cell_size;
  const double radius_norm = 2.0 * radius_m / (smeta.width * smeta.cell_size);

  const MatchReport match = match_critical_points(smooth.nodes, ref.nodes, radius_norm);

  const PersistenceDiagram dpsi = diagram_in_meters(smooth, smeta.norm);
  const PersistenceDiagram d1 = diagram_in_meters(m1, m1meta.norm);
  const PersistenceDiagram d2 = diagram_in_meters(m2, m2meta.norm);
  const double ws1 = wasserstein(dpsi, d1);
  const double ws2 = wasserstein(dpsi, d2);
  const double ws12 = wasserstein(d1, d2);
  const double ratio = ws_ratio(ws1, ws2, ws12);  // throws on identical mesh diagrams

  json report = {
      {"precision", match.precision},
      {"recall", match.recall},
      {"f05", match.f05},
      {"matched", match.matches.size()},
      {"ws_smooth_mesh1_m", ws1},
      {"ws_smooth_mesh2_m", ws2},
      {"ws_mesh1_mesh2_m", ws12},
      {"ws_ratio", ratio},
      {"radius_m", radius_m},
      {"wasserstein", {{"order", 1}, {"ground_metric", "Linf"}}},
  };
  save_json(report, opts.out);
  std::printf("compare: P %.4f R %.4f F0.5 %.4f | WS(psi,m1) %.4f WS(psi,m2) %.4f WS(m1,m2) %.4f"
              " ratio %.4f\n",
              match.precision, match.recall, match.f05, ws1, ws2, ws12, ratio);
  return 0;
}

int cmd_noise_sweep(const NoiseSweepOpts& opts) {
  const RasterGrid input = load_ascii_grid(opts.input);
  auto [clean, np] = normalize(input);
  fs::create_directories(opts.out_dir);
  const fs::path dir(opts.out_dir);
  const double thr = threshold_to_norm(opts.threshold_m, np);
  const int l1w = level1_width(input);
  const double radius = opts.radius_scale * 2.0 / l1w;

  TrainConfig cfg;
  cfg.learning_rate = opts.learning_rate;

  auto fit_surface = [&](const RasterGrid& target, std::uint64_t seed) {
    SirenNetwork net =
        init_siren(opts.net.hidden_layers, opts.net.hidden_units, opts.net.omega0, seed);
    const GaussianPyramid pyr = build_pyramid(target, opts.pyramid_levels, opts.sigma);
    train_progressive(net, pyr, opts.steps_surface, cfg);
    return net;
  };
  auto smooth_mig = [&](const SirenNetwork& net, std::uint64_t seed) {
    SirenField field(net);
    SmoothTopoParams params = make_smooth_params(l1w, seed);
    return simplify_mig(extract_topology(field, params).mig, thr);
  };

  std::printf("noise-sweep: fitting the clean reference\n");
  const SirenNetwork ref_net = fit_surface(clean, opts.seed);
  const MorseIncidenceGraph ref_smooth = smooth_mig(ref_net, opts.seed);
  const MorseIncidenceGraph ref_forman =
      simplify_mig(extract_topology_discrete(clean, MeshConfig::mesh1).mig, thr);
  const PersistenceDiagram ref_smooth_d = diagram_from_mig(ref_smooth);
  const PersistenceDiagram ref_forman_d = diagram_from_mig(ref_forman);

  std::ofstream csv(dir / "sweep.csv");
  if (!csv) throw IoError("cannot write sweep.csv");
  csv << "variance,method,f05_mean,ws_mean\n";
  json levels_json = json::array();

  Rng master(opts.seed);
  for (int level = 0; level < opts.levels; ++level) {
    const double variance = opts.base_variance * std::pow(2.0, level);
    double f05_smooth = 0.0, ws_smooth = 0.0, f05_forman = 0.0, ws_forman = 0.0;
    for (int round = 0; round < opts.rounds; ++round) {
      const std::uint64_t rseed = master.fork(level * 100 + round).next_u64();
      const RasterGrid noisy = add_gaussian_noise(clean, variance, rseed);

      const SirenNetwork net = fit_surface(noisy, rseed);
      const MorseIncidenceGraph mig_s = smooth_mig(net, rseed);
      const MatchReport ms = match_critical_points(mig_s.nodes, ref_smooth.nodes, radius);
      f05_smooth += ms.f05;
      ws_smooth += wasserstein(diagram_from_mig(mig_s), ref_smooth_d);

      const MorseIncidenceGraph mig_f =
          simplify_mig(extract_topology_discrete(noisy, MeshConfig::mesh1).mig, thr);
      const MatchReport mf = match_critical_points(mig_f.nodes, ref_forman.nodes, radius);
      f05_forman += mf.f05;
      ws_forman += wasserstein(diagram_from_mig(mig_f), ref_forman_d);
    }
    f05_smooth /= opts.rounds;
    ws_smooth /= opts.rounds;
    f05_forman /= opts.rounds;
    ws_forman /= opts.rounds;

    char buf[200];
    std::snprintf(buf, sizeof buf, "%.17g,smooth,%.6f,%.6f\n", variance, f05_smooth, ws_smooth);
    csv << buf;
    std::snprintf(buf, sizeof buf, "%.17g,forman,%.6f,%.6f\n", variance, f05_forman, ws_forman);
    csv << buf;
    levels_json.push_back({{"variance", variance},
                           {"smooth", {{"f05", f05_smooth}, {"ws", ws_smooth}}},
                           {"forman", {{"f05", f05_forman}, {"ws", ws_forman}}}});
    std::printf("noise-sweep: var %.4g smooth F0.5 %.3f WS %.4f | forman F0.5 %.3f WS %.4f\n",
                variance, f05_smooth, ws_smooth, f05_forman, ws_forman);
  }

  save_json({{"rounds", opts.rounds},
             {"threshold_m", opts.threshold_m},
             {"radius_norm", radius},
             {"levels", levels_json}},
            dir / "sweep.json");
  return 0;
}

int cmd_topography(const TopographyOpts& opts) {
  const RasterGrid input = load_ascii_grid(opts.input);
  const ModelBundle m = load_model(opts.model_dir);
  auto [norm, np] = normalize(input);
  fs::create_directories(opts.out_dir);
  const fs::path dir(opts.out_dir);

  SirenField field(m.surface);
  save_ascii_grid(slope(field, input, np), dir / "slope.asc");
  save_ascii_grid(aspect(field, input, np), dir / "aspect.asc");
  save_ascii_grid(mean_curvature(field, input, np), dir / "curvature.asc");

  const NormalMap nm = normal_map(field, input, np);
  std::vector<std::uint8_t> rgb(nm.normals.size() * 3);
  for (size_t i = 0; i < nm.normals.size(); ++i) {
    rgb[3 * i] = static_cast<std::uint8_t>(std::lround(255.0 * (0.5 * nm.normals[i][0] + 0.5)));
    rgb[3 * i + 1] =
        static_cast<std::uint8_t>(std::lround(255.0 * (0.5 * nm.normals[i][1] + 0.5)));
    rgb[3 * i + 2] =
        static_cast<std::uint8_t>(std::lround(255.0 * (0.5 * nm.normals[i][2] + 0.5)));
  }
  write_png_rgb(dir / "normal.png", nm.width, nm.height, rgb);

  const auto shade = hillshade(nm);
  write_png_gray(dir / "hillshade.png", nm.width, nm.height, shade);
  write_pgm(dir / "hillshade.pgm", nm.width, nm.height, shade);

  save_json({{"slope", {{"units", "rad"}, {"range", "[0, pi/2)"}}},
             {"aspect", {{"units", "rad"}, {"convention", "clockwise from north"},
                         {"flat_sentinel", -1.0}}},
             {"curvature", {{"units", "1/m"}}},
             {"hillshade",
              {{"azimuth_rad", kDefaultAzimuthRad}, {"altitude_rad", kDefaultAltitudeRad}}},
             {"grid", grid_meta(input)}},
            dir / "attributes.json");
  std::printf("topography: slope/aspect/curvature rasters and renders written to %s\n",
              opts.out_dir.c_str());
  return 0;
}

int cmd_render(const RenderOpts& opts) {
  const RasterGrid input = load_ascii_grid(opts.input);
  fs::create_directories(opts.out_dir);
  const fs::path dir(opts.out_dir);

  const auto shade = grid_hillshade(input);
  write_png_gray(dir / "hillshade.png", input.width, input.height, shade);
  write_pgm(dir / "hillshade.pgm", input.width, input.height, shade);

  if (!opts.mig.empty()) {
    auto [mig, meta] = load_mig_json(opts.mig);
    render_overlay(shade, input.width, input.height, mig, dir / "overlay.png");
    std::printf("render: hillshade + overlay (%zu nodes, %zu arcs) -> %s\n", mig.nodes.size(),
                mig.arcs.size(), opts.out_dir.c_str());
  } else {
    std::printf("render: hillshade -> %s\n", opts.out_dir.c_str());
  }
  return 0;
}

}  // namespace terra::cli
