// Acceptance suite: one check per shipped criterion, each printing a single
// PASS/FAIL line. Run with --criterion N to execute one of them, or with no
// arguments for the full battery. Exit code 0 iff everything selected passed.
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "terra/fft.hpp"
#include "terra/field.hpp"
#include "terra/metrics.hpp"
#include "terra/raster.hpp"
#include "terra/rng.hpp"
#include "terra/siren.hpp"
#include "terra/topo.hpp"
#include "terra/topo_discrete.hpp"
#include "terra/topo_smooth.hpp"
#include "terra/topography.hpp"
#include "terra/train.hpp"

using namespace terra;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double wall_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// criterion 1: synthetic topology alignment, smooth vs gradient-aligned Forman
// ---------------------------------------------------------------------------
Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const RasterGrid terrain = synth_terrain(3, 256, 10, {0.0, 200.0});
  auto [norm, np] = normalize(terrain);

  // surface model exactly as the desk profile trains it
  const GaussianPyramid pyr = build_pyramid(norm, 4, 4.0);
  SirenNetwork surface = init_siren(3, 128, 30.0, 1);
  TrainConfig cfg;
  cfg.learning_rate = 1e-4;
  train_progressive(surface, pyr, 3000, cfg);

  const double thr = 2.0 * 1.0 / (np.h_max - np.h_min);  // 1 m
  SirenField field(surface);
  SmoothTopoParams params = make_smooth_params(128, 1);
  const MorseIncidenceGraph smooth = simplify_mig(extract_topology(field, params).mig, thr);

  const MorseIncidenceGraph aligned =
      simplify_mig(extract_topology_discrete(norm, MeshConfig::grad_aligned).mig, thr);
  const MorseIncidenceGraph mesh1 =
      simplify_mig(extract_topology_discrete(norm, MeshConfig::mesh1).mig, thr);
  const MorseIncidenceGraph mesh2 =
      simplify_mig(extract_topology_discrete(norm, MeshConfig::mesh2).mig, thr);

  const double radius = 2.0 * (2.0 / 128.0);  // two level-1 pixels
  const MatchReport match = match_critical_points(smooth.nodes, aligned.nodes, radius);

  const double ws1 = wasserstein(diagram_from_mig(smooth), diagram_from_mig(mesh1));
  const double ws2 = wasserstein(diagram_from_mig(smooth), diagram_from_mig(mesh2));
  const double ws12 = wasserstein(diagram_from_mig(mesh1), diagram_from_mig(mesh2));
  const double ratio = ws_ratio(ws1, ws2, ws12);
  const double elapsed = wall_since(t0);

  Outcome o;
  o.pass = match.f05 >= 0.95 && ratio > 0.0 && ratio < 1.0 && elapsed <= 1800.0;
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "F0.5 %.4f (>= 0.95), WS-ratio %.4f (in (0,1)), P %.3f R %.3f, "
                "smooth %d/%d/%d vs aligned %d/%d/%d, %.0f s (<= 1800)",
                match.f05, ratio, match.precision, match.recall,
                smooth.count(CritKind::minimum), smooth.count(CritKind::saddle),
                smooth.count(CritKind::maximum), aligned.count(CritKind::minimum),
                aligned.count(CritKind::saddle), aligned.count(CritKind::maximum), elapsed);
  o.detail = buf;
  return o;
}

// ---------------------------------------------------------------------------
// criterion 2: cascade beats the parameter-matched single model
// ---------------------------------------------------------------------------
Outcome criterion2() {
  // 256^2 synthetic with injected fine detail
  RasterGrid terrain = synth_terrain(3, 256, 10, {0.0, 200.0});
  {
    const RasterGrid detail =
        synth_terrain(3 ^ 0x9e3779b97f4a7c15ull, 256, 160, {-3.0, 3.0}, 1.0 / 128.0, 1.0 / 48.0);
    for (size_t i = 0; i < terrain.values.size(); ++i) terrain.values[i] += detail.values[i];
  }
  auto [norm, np] = normalize(terrain);
  const GaussianPyramid pyr = build_pyramid(norm, 4, 4.0);

  const int steps_surface = 300, steps_geometry = 300;
  const int total = steps_surface + steps_geometry;
  TrainConfig cfg;
  cfg.learning_rate = 1e-4;

  const Eigen::Matrix2Xd coords = grid_coords(norm);
  Eigen::VectorXd target(norm.size());
  for (size_t i = 0; i < norm.size(); ++i) target(static_cast<Eigen::Index>(i)) = norm.values[i];
  auto psnr_of = [&](const Eigen::VectorXd& pred) {
    const double mse = (pred - target).squaredNorm() / static_cast<double>(pred.size());
    return 10.0 * std::log10(1.0 / mse);
  };

  // cascade: progressive surface then residual geometry, curve every 10 steps
  std::vector<std::pair<int, double>> spg_curve;
  SirenNetwork surface = init_siren(3, 128, 30.0, 1);
  train_progressive(surface, pyr, steps_surface, cfg,
                    [&](const SirenNetwork& net, const StepLog& s) {
                      if (s.step % 10 == 0) spg_curve.emplace_back(s.step, psnr_of(forward(net, coords)));
                    });
  const RasterGrid residual = compute_residual(surface, norm);
  const Eigen::VectorXd surf_pred = forward(surface, coords);
  SirenNetwork geometry = init_siren(3, 128, 30.0, 2);
  TrainConfig gcfg = cfg;
  gcfg.steps = steps_geometry;
  train(geometry, residual, gcfg, [&](const SirenNetwork& net, const StepLog& s) {
    if (s.step % 10 == 0)
      spg_curve.emplace_back(steps_surface + s.step, psnr_of(surf_pred + forward(net, coords)));
  });
  const double spg_final = spg_curve.back().second;

  // parameter-matched single model, equal total step budget
  int width = 128;
  {
    auto params_of = [](long w) { return 3 * w + 2 * (w * w + w) + w + 1; };
    const long want = 2 * params_of(128);
    long best = 1L << 60;
    for (long w = 128; w <= 512; ++w)
      if (std::labs(params_of(w) - want) < best) {
        best = std::labs(params_of(w) - want);
        width = static_cast<int>(w);
      }
  }
  SirenNetwork single = init_siren(3, width, 30.0, 1);
  TrainConfig scfg = cfg;
  scfg.steps = total;
  std::vector<std::pair<int, double>> single_curve;
  train(single, norm, scfg, [&](const SirenNetwork& net, const StepLog& s) {
    if (s.step % 10 == 0) single_curve.emplace_back(s.step, psnr_of(forward(net, coords)));
  });
  const double single_final = single_curve.back().second;

  int first_reach = -1;
  for (const auto& [step, v] : spg_curve)
    if (v >= single_final) {
      first_reach = step;
      break;
    }

  Outcome o;
  o.pass = (spg_final >= single_final + 3.0) && first_reach > 0 && first_reach <= total / 2;
  char buf[384];
  std::snprintf(buf, sizeof buf,
                "SPG %.2f dB vs single(3x%d) %.2f dB at %d steps each (gap %.2f >= 3); "
                "SPG reached the single final at step %d (<= %d)",
                spg_final, width, single_final, total, spg_final - single_final, first_reach,
                total / 2);
  o.detail = buf;
  return o;
}

// ---------------------------------------------------------------------------
// criterion 3: analytic jets against central finite differences, trained net
// ---------------------------------------------------------------------------
Outcome criterion3() {
  RasterGrid terrain = synth_terrain(33, 128, 8, {0.0, 200.0});
  auto [norm, np] = normalize(terrain);
  const GaussianPyramid pyr = build_pyramid(norm, 4, 4.0);
  SirenNetwork net = init_siren(3, 128, 30.0, 1);
  TrainConfig cfg;
  cfg.learning_rate = 1e-4;
  train_progressive(net, pyr, 1500, cfg);

  const double h = 1e-4;
  Rng rng(5);
  double gd = 0, gn = 0, hd = 0, hn = 0;
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform(-0.95, 0.95), y = rng.uniform(-0.95, 0.95);
    const Jet2 j = forward_jet(net, x, y);
    const double fpp = forward_one(net, x + h, y), fmm = forward_one(net, x - h, y);
    const double fyp = forward_one(net, x, y + h), fym = forward_one(net, x, y - h);
    const double f0 = forward_one(net, x, y);
    const double gx = (fpp - fmm) / (2 * h), gy = (fyp - fym) / (2 * h);
    const double hxx = (fpp - 2 * f0 + fmm) / (h * h);
    const double hyy = (fyp - 2 * f0 + fym) / (h * h);
    const double hxy = (forward_one(net, x + h, y + h) - forward_one(net, x + h, y - h) -
                        forward_one(net, x - h, y + h) + forward_one(net, x - h, y - h)) /
                       (4 * h * h);
    gd += std::hypot(j.gx - gx, j.gy - gy);
    gn += std::hypot(gx, gy);
    hd += std::sqrt((j.hxx - hxx) * (j.hxx - hxx) + 2 * (j.hxy - hxy) * (j.hxy - hxy) +
                    (j.hyy - hyy) * (j.hyy - hyy));
    hn += std::sqrt(hxx * hxx + 2 * hxy * hxy + hyy * hyy);
  }
  const double grad_rel = gd / gn, hess_rel = hd / hn;
  Outcome o;
  o.pass = grad_rel < 1e-6 && hess_rel < 1e-4;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "gradient relative error %.3g (< 1e-6), Hessian %.3g (< 1e-4), 1000 points",
                grad_rel, hess_rel);
  o.detail = buf;
  return o;
}

// ---------------------------------------------------------------------------
// criterion 4: Forman gradient invariants on random grids
// ---------------------------------------------------------------------------
std::optional<std::string> audit_forman(const TriangulatedGrid& mesh, const FormanGradient& fg) {
  const RasterGrid& g = mesh.grid();
  auto key = [&](int v) { return std::make_pair(g.values[static_cast<size_t>(v)], v); };

  for (int v = 0; v < mesh.n_vertices(); ++v) {
    const int e = fg.vertex_pair[static_cast<size_t>(v)];
    if (e == -1) continue;
    const auto [a, b] = mesh.edge_vertices(e);
    if (a != v && b != v) return "vertex paired with a non-incident edge";
    if (fg.edge_pair_down[static_cast<size_t>(e)] != v) return "vertex/edge pairing asymmetry";
    if (key(v) < key(a == v ? b : a)) return "vertex is not the top of its paired edge";
  }
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const int down = fg.edge_pair_down[static_cast<size_t>(e)];
    const int up = fg.edge_pair_up[static_cast<size_t>(e)];
    if (down != -1 && up != -1) return "edge in two pairings";
    if (down != -1 && fg.vertex_pair[static_cast<size_t>(down)] != e)
      return "edge/vertex pairing asymmetry";
    if (up != -1) {
      if (fg.triangle_pair[static_cast<size_t>(up)] != e) return "edge/triangle pairing asymmetry";
      const auto te = mesh.triangle_edges(up);
      if (te[0] != e && te[1] != e && te[2] != e) return "edge paired with a non-coface triangle";
    }
  }
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const int e = fg.triangle_pair[static_cast<size_t>(t)];
    if (e != -1 && fg.edge_pair_up[static_cast<size_t>(e)] != t)
      return "triangle/edge pairing asymmetry";
  }

  // V-path acyclicity in both dimensions
  for (int e0 = 0; e0 < mesh.n_edges(); ++e0) {
    const auto [a, b] = mesh.edge_vertices(e0);
    for (int u : {a, b}) {
      std::vector<bool> seen(static_cast<size_t>(mesh.n_vertices()), false);
      int cur = u;
      while (true) {
        if (seen[static_cast<size_t>(cur)]) return "vertex V-path cycle";
        seen[static_cast<size_t>(cur)] = true;
        const int pe = fg.vertex_pair[static_cast<size_t>(cur)];
        if (pe == -1) break;
        const auto [x, y] = mesh.edge_vertices(pe);
        cur = (x == cur) ? y : x;
      }
    }
  }
  for (int t0 = 0; t0 < mesh.n_triangles(); ++t0) {
    std::vector<bool> seen(static_cast<size_t>(mesh.n_triangles()), false);
    int t = t0;
    while (t >= 0) {
      if (seen[static_cast<size_t>(t)]) return "triangle V-path cycle";
      seen[static_cast<size_t>(t)] = true;
      const int pe = fg.triangle_pair[static_cast<size_t>(t)];
      if (pe == -1) break;
      const auto [ta, tb] = mesh.edge_triangles(pe);
      t = (ta == t) ? tb : ta;
    }
  }
  return std::nullopt;
}

Outcome criterion4() {
  Rng rng(404);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int w = rng.uniform_int(8, 32), h = rng.uniform_int(8, 32);
    RasterGrid g;
    g.width = w;
    g.height = h;
    g.values.resize(static_cast<size_t>(w) * h);
    for (double& v : g.values) v = rng.uniform(-1.0, 1.0);
    const MeshConfig config = (trial % 2 == 0) ? MeshConfig::mesh1 : MeshConfig::mesh2;
    TriangulatedGrid mesh(g, config);
    const FormanGradient fg = compute_forman_gradient(mesh);
    if (auto fail = audit_forman(mesh, fg)) return {false, *fail};

    int mins = 0, sads = 0, maxs = 0;
    for (int v = 0; v < mesh.n_vertices(); ++v)
      if (fg.vertex_pair[static_cast<size_t>(v)] == -1) ++mins;
    for (int e = 0; e < mesh.n_edges(); ++e)
      if (fg.edge_critical(e)) ++sads;
    for (int t = 0; t < mesh.n_triangles(); ++t)
      if (fg.triangle_pair[static_cast<size_t>(t)] == -1) ++maxs;
    if (mins - sads + maxs != 1)
      return {false, "Euler relation violated: " + std::to_string(mins) + "-" +
                         std::to_string(sads) + "+" + std::to_string(maxs)};
    ++checked;
  }
  return {true, "partition, acyclicity and #min-#saddle+#max = 1 on " + std::to_string(checked) +
                    " random grids (8..32 per side, both configs)"};
}

// ---------------------------------------------------------------------------
// criterion 5: exact assignment equals brute force on small diagrams
// ---------------------------------------------------------------------------
Outcome criterion5() {
  Rng rng(505);
  auto random_diagram = [&](int max_points) {
    PersistenceDiagram d;
    const int n = rng.uniform_int(0, max_points);
    for (int i = 0; i < n; ++i) {
      const double b = rng.uniform(-1.0, 1.0);
      d.points.emplace_back(b, b + rng.uniform(0.0, 1.0));
    }
    return d;
  };
  auto linf = [](const std::pair<double, double>& p, const std::pair<double, double>& q) {
    return std::max(std::fabs(p.first - q.first), std::fabs(p.second - q.second));
  };

  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const PersistenceDiagram a = random_diagram(6);
    const PersistenceDiagram b = random_diagram(6);
    const double fast = wasserstein(a, b);

    // independent oracle: bitmask DP over the same augmented matrix
    const int n = static_cast<int>(a.points.size()), m = static_cast<int>(b.points.size());
    double slow = 0.0;
    if (n + m > 0) {
      double big = 1.0;
      for (const auto& p : a.points) big += p.second - p.first;
      for (const auto& q : b.points) big += q.second - q.first;
      for (const auto& p : a.points)
        for (const auto& q : b.points) big += linf(p, q);
      std::vector<std::vector<double>> cost(n + m, std::vector<double>(n + m, 0.0));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) cost[i][j] = linf(a.points[i], b.points[j]);
      for (int i = 0; i < n; ++i)
        for (int j = m; j < n + m; ++j)
          cost[i][j] = (j - m == i) ? 0.5 * (a.points[i].second - a.points[i].first) : big;
      for (int i = n; i < n + m; ++i)
        for (int j = 0; j < m; ++j)
          cost[i][j] = (i - n == j) ? 0.5 * (b.points[j].second - b.points[j].first) : big;
      slow = oracle::assignment_bitmask_dp(cost);
    }
    worst = std::max(worst, std::fabs(fast - slow));
    if (worst >= 1e-9) break;
  }
  Outcome o;
  o.pass = worst < 1e-9;
  o.detail = "max |assignment - brute force| = " + std::to_string(worst) + " over 100 pairs";
  return o;
}

// ---------------------------------------------------------------------------
// criterion 6: metric formula reproduction
// ---------------------------------------------------------------------------
Outcome criterion6() {
  const double f = f05_score(0.90, 0.96);
  const bool f_ok = std::fabs(f - 0.91) <= 0.005;

  RasterGrid a, b;
  a.width = a.height = b.width = b.height = 16;
  a.values.assign(256, 0.25);
  b.values.assign(256, 0.35);  // MSE = 0.01
  const double p = psnr(a, b);
  const bool p_ok = std::fabs(p - 20.0) < 1e-9;

  RasterGrid r;
  r.width = r.height = 32;
  r.values.resize(1024);
  Rng rng(6);
  for (double& v : r.values) v = rng.uniform(-1.0, 1.0);
  const double s = ssim(r, r);
  const bool s_ok = s == 1.0;

  Outcome o;
  o.pass = f_ok && p_ok && s_ok;
  char buf[256];
  std::snprintf(buf, sizeof buf, "F0.5(0.90,0.96) = %.4f (0.91 +- 0.005), PSNR(MSE 0.01) = %.12f, "
                "SSIM(a,a) = %.12f", f, p, s);
  o.detail = buf;
  return o;
}

// ---------------------------------------------------------------------------
// criterion 7: noise robustness trend
// ---------------------------------------------------------------------------
Outcome criterion7() {
  const RasterGrid terrain = synth_terrain(7, 96, 5, {0.0, 200.0});
  auto [clean, np] = normalize(terrain);
  const double thr = 2.0 * 1.0 / (np.h_max - np.h_min);
  const int l1w = (96 + 1) / 2;
  const double radius = 2.0 * 2.0 / l1w;
  TrainConfig cfg;
  cfg.learning_rate = 1e-4;

  auto fit_surface = [&](const RasterGrid& target, std::uint64_t seed) {
    SirenNetwork net = init_siren(3, 64, 30.0, seed);
    const GaussianPyramid pyr = build_pyramid(target, 4, 4.0);
    train_progressive(net, pyr, 900, cfg);
    return net;
  };
  auto smooth_mig = [&](const SirenNetwork& net, std::uint64_t seed) {
    SirenField field(net);
    SmoothTopoParams params = make_smooth_params(l1w, seed);
    return simplify_mig(extract_topology(field, params).mig, thr);
  };

  const SirenNetwork ref_net = fit_surface(clean, 1);
  const MorseIncidenceGraph ref_smooth = smooth_mig(ref_net, 1);
  const MorseIncidenceGraph ref_forman =
      simplify_mig(extract_topology_discrete(clean, MeshConfig::mesh1).mig, thr);

  std::vector<double> f_smooth, f_forman;
  Rng master(1);
  for (int level = 0; level < 7; ++level) {
    const double variance = 1e-3 * std::pow(2.0, level);
    double fs = 0.0, ff = 0.0;
    for (int round = 0; round < 5; ++round) {
      const std::uint64_t seed = master.fork(level * 100 + round).next_u64();
      const RasterGrid noisy = add_gaussian_noise(clean, variance, seed);
      const MorseIncidenceGraph ms = smooth_mig(fit_surface(noisy, seed), seed);
      fs += match_critical_points(ms.nodes, ref_smooth.nodes, radius).f05;
      const MorseIncidenceGraph mf =
          simplify_mig(extract_topology_discrete(noisy, MeshConfig::mesh1).mig, thr);
      ff += match_critical_points(mf.nodes, ref_forman.nodes, radius).f05;
    }
    f_smooth.push_back(fs / 5.0);
    f_forman.push_back(ff / 5.0);
  }

  bool monotone = true;
  for (size_t k = 0; k + 1 < f_smooth.size(); ++k)
    monotone = monotone && f_smooth[k + 1] <= f_smooth[k] + 0.05;
  const bool tail = f_smooth[5] >= f_forman[5] && f_smooth[6] >= f_forman[6];

  std::ostringstream ss;
  ss << "smooth F0.5 per level:";
  for (double v : f_smooth) ss << " " << std::round(v * 1000) / 1000;
  ss << " | forman:";
  for (double v : f_forman) ss << " " << std::round(v * 1000) / 1000;
  ss << (monotone ? " | trend ok" : " | trend violated");
  ss << (tail ? ", smooth >= forman at the two highest levels" : ", tail comparison failed");
  return {monotone && tail, ss.str()};
}

// ---------------------------------------------------------------------------
// criterion 8: FFT roundtrip and Parseval up to 512^2
// ---------------------------------------------------------------------------
Outcome criterion8() {
  Rng rng(808);
  double worst_rt = 0.0, worst_pars = 0.0;
  for (int n : {64, 128, 300, 512}) {
    RasterGrid g;
    g.width = g.height = n;
    g.values.resize(static_cast<size_t>(n) * n);
    for (double& v : g.values) v = rng.uniform(-1.0, 1.0);
    const Spectrum s = fft2(g);
    const std::vector<double> back = ifft2(s);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        worst_rt = std::max(worst_rt,
                            std::fabs(back[static_cast<size_t>(r) * s.width + c] - g.at(r, c)));
    double spatial = 0.0, spectral = 0.0;
    for (double v : g.values) spatial += v * v;
    for (const auto& z : s.bins) spectral += std::norm(z);
    spectral /= static_cast<double>(s.bins.size());
    worst_pars = std::max(worst_pars, std::fabs(spectral - spatial) / spatial);
  }
  Outcome o;
  o.pass = worst_rt < 1e-9 && worst_pars < 1e-6;
  char buf[192];
  std::snprintf(buf, sizeof buf, "roundtrip max error %.3g (< 1e-9), Parseval relative %.3g (< 1e-6)",
                worst_rt, worst_pars);
  o.detail = buf;
  return o;
}

// ---------------------------------------------------------------------------
// criterion 9: topography closed forms
// ---------------------------------------------------------------------------
Outcome criterion9() {
  RasterGrid georef;
  georef.width = georef.height = 64;
  georef.cell_size = 2.0;  // 128 m tile
  georef.values.assign(64 * 64, 0.0);
  const NormalizeParams np{0.0, 100.0};
  const double ex = 128.0, dh = 50.0;
  constexpr double kPi = 3.14159265358979323846;

  // world plane h = 0.3 xw + 0.4 yw
  FunctionField plane([&](double xn, double yn) {
    Jet2 j;
    const double xw = (xn + 1.0) * 0.5 * ex, yw = (yn + 1.0) * 0.5 * ex;
    j.value = (0.3 * xw + 0.4 * yw) / dh - 1.0;
    j.gx = 0.3 * (0.5 * ex) / dh;
    j.gy = 0.4 * (0.5 * ex) / dh;
    return j;
  });
  double worst = 0.0;
  const RasterGrid s = slope(plane, georef, np);
  for (double v : s.values) worst = std::max(worst, std::fabs(v - std::atan(0.5)));
  const RasterGrid a = aspect(plane, georef, np);
  const double expect_aspect = std::atan2(-0.3, -0.4) + 2.0 * kPi;
  for (double v : a.values) worst = std::max(worst, std::fabs(v - expect_aspect));

  // paraboloid h = -((xw-64)^2 + (yw-64)^2)/2: H = -1 at the apex
  FunctionField par([&](double xn, double yn) {
    Jet2 j;
    const double xw = (xn + 1.0) * 0.5 * ex, yw = (yn + 1.0) * 0.5 * ex;
    j.value = (-0.5 * ((xw - 64.0) * (xw - 64.0) + (yw - 64.0) * (yw - 64.0)) + 50.0) / dh - 1.0;
    j.gx = -(xw - 64.0) * (0.5 * ex) / dh;
    j.gy = -(yw - 64.0) * (0.5 * ex) / dh;
    j.hxx = -(0.5 * ex) * (0.5 * ex) / dh;
    j.hyy = -(0.5 * ex) * (0.5 * ex) / dh;
    return j;
  });
  const Jet2 apex = par.jet(0.0, 0.0);
  const WorldDerivs w = to_world_derivs(apex, georef, np);
  const double apex_h = ((1.0 + w.fy * w.fy) * w.fxx - 2.0 * w.fx * w.fy * w.fxy +
                         (1.0 + w.fx * w.fx) * w.fyy) /
                        (2.0 * std::pow(1.0 + w.fx * w.fx + w.fy * w.fy, 1.5));
  worst = std::max(worst, std::fabs(apex_h - (-1.0)));

  // curvature raster of the plane is identically zero
  const RasterGrid c = mean_curvature(plane, georef, np);
  for (double v : c.values) worst = std::max(worst, std::fabs(v));

  Outcome o;
  o.pass = worst < 1e-6;
  o.detail = "max closed-form deviation " + std::to_string(worst) + " (< 1e-6), incl. H(apex) = " +
             std::to_string(apex_h);
  return o;
}

// ---------------------------------------------------------------------------
// criterion 10: bit-identical artefacts on rerun (through the CLI)
// ---------------------------------------------------------------------------
#ifndef TERRA_CLI_PATH
#define TERRA_CLI_PATH "terra"
#endif

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// loss logs carry wall-clock times; strip that column before comparing
std::string strip_wall_column(const std::string& csv) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    const auto last = line.rfind(',');
    out << line.substr(0, last) << "\n";
  }
  return out.str();
}

Outcome criterion10() {
  const fs::path base = fs::temp_directory_path() / "terra_acceptance_c10";
  fs::remove_all(base);
  fs::create_directories(base);
  const std::string cli = TERRA_CLI_PATH;

  auto run = [&](const std::string& args) {
    const std::string cmd = cli + " " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
  };

  for (const char* tag : {"a", "b"}) {
    const fs::path dir = base / tag;
    fs::create_directories(dir);
    const std::string d = dir.string();
    if (run("synth --size 64 --bumps 5 --seed 7 --out " + d + "/t.asc") != 0)
      return {false, "synth failed"};
    if (run("fit --input " + d + "/t.asc --out-dir " + d + " --hidden-units 32 "
            "--steps-surface 200 --steps-geometry 100 --lr 3e-4 --seed 9") != 0)
      return {false, "fit failed"};
    if (run("topo --input " + d + "/t.asc --model-dir " + d + " --out-dir " + d +
            " --threshold-m 1 --seed 9") != 0)
      return {false, "topo failed"};
    if (run("forman --input " + d + "/t.asc --out-dir " + d + " --mesh mesh1") != 0)
      return {false, "forman failed"};
    if (run("eval --input " + d + "/t.asc --model-dir " + d) != 0) return {false, "eval failed"};
  }

  std::vector<std::string> identical, differing;
  for (const char* f :
       {"t.asc", "surface.bin", "geometry.bin", "model.json", "mig_smooth.json",
        "mig_mesh1.json", "diagram_smooth.csv", "metrics.json"}) {
    if (file_bytes(base / "a" / f) == file_bytes(base / "b" / f))
      identical.push_back(f);
    else
      differing.push_back(f);
  }
  for (const char* f : {"loss_surface.csv", "loss_geometry.csv"}) {
    if (strip_wall_column(file_bytes(base / "a" / f)) ==
        strip_wall_column(file_bytes(base / "b" / f)))
      identical.push_back(f);
    else
      differing.push_back(f);
  }

  Outcome o;
  o.pass = differing.empty();
  o.detail = std::to_string(identical.size()) + " artefacts bit-identical across reruns";
  if (!o.pass) {
    o.detail += "; differing:";
    for (const std::string& f : differing) o.detail += " " + f;
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);
  }

  const std::map<int, std::function<Outcome()>> criteria = {
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, criterion10},
  };

  bool all_pass = true;
  for (const auto& [id, fn] : criteria) {
    if (only != 0 && id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[criterion %2d] %s  (%.1f s)  %s\n", id, o.pass ? "PASS" : "FAIL",
                wall_since(t0), o.detail.c_str());
    std::fflush(stdout);
    all_pass = all_pass && o.pass;
  }
  return all_pass ? 0 : 1;
}
