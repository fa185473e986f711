#include "terra/topo_smooth.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "terra/error.hpp"
#include "terra/rng.hpp"

namespace terra {

namespace {

bool in_domain(double x, double y, double margin = 0.0) {
  const double b = 1.0 - margin;
  return x >= -b && x <= b && y >= -b && y <= b;
}

double grad_sq(const FieldOracle& field, double x, double y) {
  double v, gx, gy;
  field.grad(x, y, v, gx, gy);
  return 0.5 * (gx * gx + gy * gy);
}

}  // namespace

SmoothTopoParams make_smooth_params(int level1_width, std::uint64_t seed) {
  SmoothTopoParams p;
  const double px = 2.0 / level1_width;  // one level-1 pixel in normalized units
  p.sample_resolution = level1_width;
  p.seed = seed;
  p.dedupe_radius = 0.5 * px;
  p.snap_radius = px;
  p.saddle_offset = 2.0 * px;
  p.trace_step = 0.25 * px;
  p.max_trace_steps = 16 * p.sample_resolution;
  return p;
}

std::vector<std::array<double, 2>> seed_candidates(const FieldOracle& field,
                                                   const SmoothTopoParams& params) {
  const int res = params.sample_resolution;
  if (res < 8) throw DataError("seed_candidates: sample_resolution must be >= 8");

  // pixel-centre sampling of the field
  std::vector<double> xs(static_cast<size_t>(res) * res), ys(xs.size());
  auto coord = [&](int i) { return (2.0 * i + 1.0) / res - 1.0; };
  for (int r = 0; r < res; ++r)
    for (int c = 0; c < res; ++c) {
      xs[static_cast<size_t>(r) * res + c] = coord(c);
      ys[static_cast<size_t>(r) * res + c] = coord(r);
    }
  std::vector<Jet2> jets;
  field.jets(xs, ys, jets);

  auto value = [&](int r, int c) { return jets[static_cast<size_t>(r) * res + c].value; };
  // simulation of simplicity: exact ties resolve by vertex index, as in the
  // discrete pipeline
  auto higher = [&](int r, int c, int r0, int c0) {
    const double dv = value(r, c) - value(r0, c0);
    if (dv != 0.0) return dv > 0.0;
    return r * res + c > r0 * res + c0;
  };

  // 8-neighbourhood in cyclic order
  static constexpr int kDr[8] = {0, -1, -1, -1, 0, 1, 1, 1};
  static constexpr int kDc[8] = {1, 1, 0, -1, -1, -1, 0, 1};

  Rng rng(params.seed);
  const double cell = 2.0 / res;
  std::vector<std::array<double, 2>> out;
  for (int r = 1; r + 1 < res; ++r) {
    for (int c = 1; c + 1 < res; ++c) {
      int changes = 0;
      bool prev = higher(r + kDr[7], c + kDc[7], r, c);
      for (int k = 0; k < 8; ++k) {
        const bool cur = higher(r + kDr[k], c + kDc[k], r, c);
        if (cur != prev) ++changes;
        prev = cur;
      }
      // 0 sign changes: extremum candidate; >= 4: saddle candidate
      if (changes != 0 && changes < 4) continue;
      const double x = coord(c), y = coord(r);
      const double bound = 1.0 - params.domain_margin;
      if (std::fabs(x) > bound || std::fabs(y) > bound) continue;
      out.push_back({x, y});
      for (int k = 0; k < params.clones; ++k) {
        const double jx = x + rng.uniform(-0.5, 0.5) * cell;
        const double jy = y + rng.uniform(-0.5, 0.5) * cell;
        out.push_back({std::clamp(jx, -bound, bound), std::clamp(jy, -bound, bound)});
      }
    }
  }
  return out;
}

RefineResult refine_critical_point(const FieldOracle& field, double x0, double y0,
                                   const SmoothTopoParams& params) {
  RefineResult res;
  res.x = x0;
  res.y = y0;
  if (!in_domain(x0, y0, params.domain_margin)) {
    res.status = RefineStatus::out_of_domain;
    return res;
  }

  double eta = params.eta0;
  constexpr double kEtaMin = 1e-14;
  const double newton_gate = 1e3 * params.g_tol;

  for (int iter = 0; iter < params.max_iters; ++iter) {
    res.iters = iter;
    const Jet2 j = field.jet(res.x, res.y);
    res.jet = j;
    const double gn = j.grad_norm();
    if (gn < params.g_tol) {
      const auto [l1, l2] = j.hessian_eigenvalues();
      if (std::fabs(l1) <= params.eig_tol || std::fabs(l2) <= params.eig_tol) {
        res.status = RefineStatus::degenerate;
      } else {
        res.status = RefineStatus::converged;
      }
      return res;
    }

    const double g0 = 0.5 * gn * gn;

    // Newton cleanup near the solution: solve H step = -grad
    if (params.newton_polish && gn < newton_gate) {
      const double det = j.hxx * j.hyy - j.hxy * j.hxy;
      if (std::fabs(det) > 1e-30) {
        const double sx = (-j.gx * j.hyy + j.gy * j.hxy) / det;
        const double sy = (-j.hxx * j.gy + j.hxy * j.gx) / det;
        const double nx = res.x + sx, ny = res.y + sy;
        if (in_domain(nx, ny, params.domain_margin) && grad_sq(field, nx, ny) < g0) {
          res.x = nx;
          res.y = ny;
          continue;
        }
      }
    }

    // steepest descent on 0.5*||grad||^2
    const double dx = -(j.gx * j.hxx + j.gy * j.hxy);
    const double dy = -(j.gx * j.hxy + j.gy * j.hyy);
    const double dn = std::hypot(dx, dy);
    if (dn == 0.0) {
      // stationary point of the gradient norm that is not a critical point
      res.status = RefineStatus::max_iters;
      return res;
    }

    bool accepted = false;
    bool out_everywhere = true;
    for (double step = eta * 2.0; step >= kEtaMin; step *= 0.5) {
      const double nx = res.x + step * dx, ny = res.y + step * dy;
      if (!in_domain(nx, ny, params.domain_margin)) continue;
      out_everywhere = false;
      if (grad_sq(field, nx, ny) < g0) {
        res.x = nx;
        res.y = ny;
        eta = step;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      res.status = out_everywhere ? RefineStatus::out_of_domain : RefineStatus::max_iters;
      return res;
    }
  }
  res.status = RefineStatus::max_iters;
  return res;
}

CritKind classify_critical_point(const Jet2& jet, double eig_tol) {
  const auto [l1, l2] = jet.hessian_eigenvalues();
  if (std::fabs(l1) <= eig_tol || std::fabs(l2) <= eig_tol)
    throw DataError("degenerate critical point: |eigenvalue| <= threshold");
  if (l1 > 0.0) return CritKind::minimum;
  if (l2 < 0.0) return CritKind::maximum;
  return CritKind::saddle;
}

DedupeResult dedupe(const std::vector<CriticalPoint>& points, double radius) {
  if (!(radius > 0.0)) throw DataError("dedupe radius must be positive");

  // process by ascending gradient norm so cluster representatives come first
  std::vector<int> order(points.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::tie(points[a].grad_norm, points[a].x, points[a].y) <
           std::tie(points[b].grad_norm, points[b].x, points[b].y);
  });

  DedupeResult res;
  std::vector<CriticalPoint> kept;
  for (int idx : order) {
    const CriticalPoint& p = points[static_cast<size_t>(idx)];
    bool absorbed = false;
    for (const CriticalPoint& q : kept) {
      if (std::hypot(p.x - q.x, p.y - q.y) > radius) continue;
      if (q.kind == p.kind) {
        absorbed = true;  // q has lower gradient norm, it represents p
        break;
      }
      res.cross_kind_warnings.emplace_back(p, q);
    }
    if (!absorbed) kept.push_back(p);
  }

  std::sort(kept.begin(), kept.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
    return std::tie(a.height, a.x, a.y) < std::tie(b.height, b.x, b.y);
  });
  for (size_t i = 0; i < kept.size(); ++i) kept[i].id = static_cast<int>(i);
  res.points = std::move(kept);
  return res;
}

namespace {

struct GradEval {
  double value = 0.0, gx = 0.0, gy = 0.0, norm = 0.0;
};

GradEval eval_grad(const FieldOracle& field, double x, double y) {
  GradEval g;
  field.grad(x, y, g.value, g.gx, g.gy);
  g.norm = std::hypot(g.gx, g.gy);
  return g;
}

TraceResult trace_one(const FieldOracle& field, const CriticalPoint& saddle, double dir_x,
                      double dir_y, bool ascending,
                      const std::vector<CriticalPoint>& critical_points,
                      const SmoothTopoParams& params) {
  TraceResult tr;
  tr.ascending = ascending;
  const double sign = ascending ? 1.0 : -1.0;
  const CritKind target = ascending ? CritKind::maximum : CritKind::minimum;
  const double h = params.trace_step;

  double x = saddle.x + params.saddle_offset * dir_x;
  double y = saddle.y + params.saddle_offset * dir_y;
  tr.polyline.push_back({saddle.x, saddle.y});

  auto snap = [&](double px, double py) -> int {
    for (const CriticalPoint& cp : critical_points) {
      if (cp.kind != target) continue;
      if (std::hypot(px - cp.x, py - cp.y) <= params.snap_radius) return cp.id;
    }
    return -1;
  };
  const double bound = 1.0 - params.domain_margin;
  auto clip_to_box = [bound](double& px, double& py, double fx, double fy) {
    // shorten the segment (fx,fy)->(px,py) to the analysis-domain boundary
    double t = 1.0;
    if (px < -bound) t = std::min(t, (-bound - fx) / (px - fx));
    if (px > bound) t = std::min(t, (bound - fx) / (px - fx));
    if (py < -bound) t = std::min(t, (-bound - fy) / (py - fy));
    if (py > bound) t = std::min(t, (bound - fy) / (py - fy));
    px = fx + t * (px - fx);
    py = fy + t * (py - fy);
  };

  constexpr double kFlat = 1e-13;
  for (int step = 0; step < params.max_trace_steps; ++step) {
    if (!in_domain(x, y, params.domain_margin)) {
      const auto& prev = tr.polyline.back();
      clip_to_box(x, y, prev[0], prev[1]);
      tr.polyline.push_back({x, y});
      tr.terminus = TraceTerminus::boundary;
      tr.end_value = field.value(x, y);
      return tr;
    }
    tr.polyline.push_back({x, y});
    const int hit = snap(x, y);
    if (hit >= 0) {
      tr.extremum_id = hit;
      const CriticalPoint& cp = critical_points[static_cast<size_t>(hit)];
      tr.polyline.push_back({cp.x, cp.y});
      tr.terminus = TraceTerminus::extremum;
      tr.end_value = cp.height;
      return tr;
    }

    // RK4 on dx/ds = +-grad/|grad|
    const GradEval k1 = eval_grad(field, x, y);
    if (k1.norm < kFlat) {
      tr.terminus = TraceTerminus::stalled;
      return tr;
    }
    const double k1x = sign * k1.gx / k1.norm, k1y = sign * k1.gy / k1.norm;
    const GradEval k2 = eval_grad(field, x + 0.5 * h * k1x, y + 0.5 * h * k1y);
    if (k2.norm < kFlat) {
      tr.terminus = TraceTerminus::stalled;
      return tr;
    }
    const double k2x = sign * k2.gx / k2.norm, k2y = sign * k2.gy / k2.norm;
    const GradEval k3 = eval_grad(field, x + 0.5 * h * k2x, y + 0.5 * h * k2y);
    if (k3.norm < kFlat) {
      tr.terminus = TraceTerminus::stalled;
      return tr;
    }
    const double k3x = sign * k3.gx / k3.norm, k3y = sign * k3.gy / k3.norm;
    const GradEval k4 = eval_grad(field, x + h * k3x, y + h * k3y);
    if (k4.norm < kFlat) {
      tr.terminus = TraceTerminus::stalled;
      return tr;
    }
    const double k4x = sign * k4.gx / k4.norm, k4y = sign * k4.gy / k4.norm;
    x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
  }
  tr.terminus = TraceTerminus::max_steps;
  return tr;
}

}  // namespace

std::array<TraceResult, 4> trace_separatrices(const FieldOracle& field,
                                              const CriticalPoint& saddle,
                                              const std::vector<CriticalPoint>& critical_points,
                                              const SmoothTopoParams& params) {
  if (saddle.kind != CritKind::saddle)
    throw DataError("trace_separatrices: node is not a saddle");

  const Jet2 j = field.jet(saddle.x, saddle.y);
  const auto [l1, l2] = j.hessian_eigenvalues();
  const auto [down_x, down_y] = j.hessian_eigenvector(l1);  // negative curvature
  const auto [up_x, up_y] = j.hessian_eigenvector(l2);      // positive curvature

  // ascending separatrices leave along the positive-eigenvalue axis
  return {trace_one(field, saddle, up_x, up_y, true, critical_points, params),
          trace_one(field, saddle, -up_x, -up_y, true, critical_points, params),
          trace_one(field, saddle, down_x, down_y, false, critical_points, params),
          trace_one(field, saddle, -down_x, -down_y, false, critical_points, params)};
}

MorseIncidenceGraph build_mig(const std::vector<CriticalPoint>& points,
                              const std::vector<TraceResult>& traces,
                              const std::vector<int>& trace_saddle_ids,
                              std::vector<std::string>* warnings) {
  if (traces.size() != trace_saddle_ids.size())
    throw DataError("build_mig: trace/saddle id size mismatch");
  MorseIncidenceGraph mig;
  mig.nodes = points;
  for (size_t i = 0; i < mig.nodes.size(); ++i) {
    if (mig.nodes[i].id != static_cast<int>(i))
      throw DataError("build_mig: node ids must be dense and sorted");
  }

  for (size_t t = 0; t < traces.size(); ++t) {
    const TraceResult& tr = traces[t];
    const int sid = trace_saddle_ids[t];
    if (sid < 0 || sid >= static_cast<int>(mig.nodes.size()))
      throw DataError("build_mig: dangling saddle id");

    int eid = -1;
    if (tr.terminus == TraceTerminus::extremum) {
      eid = tr.extremum_id;
      if (eid < 0 || eid >= static_cast<int>(mig.nodes.size()))
        throw DataError("build_mig: dangling extremum id");
    } else if (tr.terminus == TraceTerminus::boundary) {
      CriticalPoint virt;
      virt.id = static_cast<int>(mig.nodes.size());
      virt.x = tr.polyline.back()[0];
      virt.y = tr.polyline.back()[1];
      virt.height = tr.end_value;
      virt.kind = tr.ascending ? CritKind::maximum : CritKind::minimum;
      virt.boundary = true;
      mig.nodes.push_back(virt);
      eid = virt.id;
    } else {
      if (warnings)
        warnings->push_back("separatrix from saddle " + std::to_string(sid) +
                            (tr.terminus == TraceTerminus::max_steps ? " exceeded max steps"
                                                                     : " stalled in a flat region"));
      continue;
    }

    SeparatrixLine line;
    line.saddle_id = sid;
    line.extremum_id = eid;
    line.ascending = tr.ascending;
    line.polyline = tr.polyline;
    mig.lines.push_back(std::move(line));

    MigArc arc;
    arc.saddle = sid;
    arc.extremum = eid;
    arc.line = static_cast<int>(mig.lines.size()) - 1;
    arc.persistence = std::fabs(mig.nodes[static_cast<size_t>(sid)].height -
                                mig.nodes[static_cast<size_t>(eid)].height);
    mig.arcs.push_back(arc);
  }
  return mig;
}

namespace {

std::optional<CriticalPoint> refine_to_point(const FieldOracle& field, double x, double y,
                                             const SmoothTopoParams& params) {
  const RefineResult r = refine_critical_point(field, x, y, params);
  if (r.status != RefineStatus::converged) return std::nullopt;
  CriticalPoint p;
  p.x = r.x;
  p.y = r.y;
  p.height = r.jet.value;
  p.grad_norm = r.jet.grad_norm();
  const auto [l1, l2] = r.jet.hessian_eigenvalues();
  p.lambda1 = l1;
  p.lambda2 = l2;
  if (std::fabs(l1) <= params.eig_tol || std::fabs(l2) <= params.eig_tol) return std::nullopt;
  p.kind = classify_critical_point(r.jet, params.eig_tol);
  return p;
}

}  // namespace

SmoothTopoResult extract_topology(const FieldOracle& field, const SmoothTopoParams& params) {
  SmoothTopoResult result;

  const auto candidates = seed_candidates(field, params);
  std::vector<CriticalPoint> refined;
  for (const auto& [cx, cy] : candidates)
    if (auto p = refine_to_point(field, cx, cy, params)) refined.push_back(*p);

  DedupeResult dd = dedupe(refined, params.dedupe_radius);
  for (const auto& [a, b] : dd.cross_kind_warnings)
    result.warnings.push_back("cross-kind collision within dedupe radius at (" +
                              std::to_string(a.x) + ", " + std::to_string(a.y) + ")");

  // Working point set; ids stay equal to indices until the final sort.
  std::vector<CriticalPoint> pts = dd.points;

  struct SaddleState {
    int index;
    std::array<TraceResult, 4> traces;
    bool settled = false;
  };
  std::vector<SaddleState> saddles;
  for (const CriticalPoint& p : pts)
    if (p.kind == CritKind::saddle) saddles.push_back({p.id, {}, false});

  auto nearest_same_kind = [&](const CriticalPoint& p) {
    int best = -1;
    double best_d = params.dedupe_radius;
    for (const CriticalPoint& q : pts) {
      if (q.kind != p.kind) continue;
      const double d = std::hypot(p.x - q.x, p.y - q.y);
      if (d <= best_d) {
        best_d = d;
        best = q.id;
      }
    }
    return best;
  };

  // Tracing can run into critical points the grid seeding missed (features
  // below the sample resolution). Refining from the failed endpoint recovers
  // them; new points join the set and the affected saddles re-trace until the
  // set is closed.
  constexpr int kCompletionRounds = 6;
  for (int round = 0; round < kCompletionRounds; ++round) {
    bool added = false;
    const size_t n_saddles = saddles.size();
    for (size_t si = 0; si < n_saddles; ++si) {
      if (saddles[si].settled) continue;
      saddles[si].traces =
          trace_separatrices(field, pts[static_cast<size_t>(saddles[si].index)], pts, params);
      bool all_ok = true;
      for (TraceResult& tr : saddles[si].traces) {
        if (tr.terminus == TraceTerminus::extremum || tr.terminus == TraceTerminus::boundary)
          continue;
        const auto& end = tr.polyline.back();
        auto p = refine_to_point(field, end[0], end[1], params);
        if (!p) {
          all_ok = false;
          continue;
        }
        const CritKind wanted = tr.ascending ? CritKind::maximum : CritKind::minimum;
        const int existing = nearest_same_kind(*p);
        if (existing >= 0) {
          if (pts[static_cast<size_t>(existing)].kind == wanted) {
            // the trace orbits a known critical point just outside the snap
            // radius: terminate on it
            tr.terminus = TraceTerminus::extremum;
            tr.extremum_id = existing;
            tr.end_value = pts[static_cast<size_t>(existing)].height;
            tr.polyline.push_back(
                {pts[static_cast<size_t>(existing)].x, pts[static_cast<size_t>(existing)].y});
          } else {
            all_ok = false;
          }
          continue;
        }
        all_ok = false;
        p->id = static_cast<int>(pts.size());
        pts.push_back(*p);
        if (p->kind == CritKind::saddle) saddles.push_back({p->id, {}, false});
        added = true;
      }
      saddles[si].settled = all_ok;
    }
    bool all_settled = true;
    for (const SaddleState& s : saddles) all_settled = all_settled && s.settled;
    if (all_settled || !added) break;
  }
  // saddles appended in the last round still need their traces
  for (SaddleState& s : saddles)
    if (!s.settled && s.traces[0].polyline.empty())
      s.traces = trace_separatrices(field, pts[static_cast<size_t>(s.index)], pts, params);

  // final ids in (height, x, y) order; remap trace termini through it
  std::vector<int> order(pts.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const CriticalPoint& pa = pts[static_cast<size_t>(a)];
    const CriticalPoint& pb = pts[static_cast<size_t>(b)];
    return std::tie(pa.height, pa.x, pa.y) < std::tie(pb.height, pb.x, pb.y);
  });
  std::vector<int> perm(pts.size());
  std::vector<CriticalPoint> sorted(pts.size());
  for (size_t i = 0; i < order.size(); ++i) {
    perm[static_cast<size_t>(order[i])] = static_cast<int>(i);
    sorted[i] = pts[static_cast<size_t>(order[i])];
    sorted[i].id = static_cast<int>(i);
  }

  std::vector<TraceResult> traces;
  std::vector<int> saddle_ids;
  for (SaddleState& s : saddles) {
    for (TraceResult& tr : s.traces) {
      if (tr.terminus == TraceTerminus::extremum)
        tr.extremum_id = perm[static_cast<size_t>(tr.extremum_id)];
      traces.push_back(std::move(tr));
      saddle_ids.push_back(perm[static_cast<size_t>(s.index)]);
    }
  }

  result.mig = build_mig(sorted, traces, saddle_ids, &result.warnings);
  return result;
}

}  // namespace terra
