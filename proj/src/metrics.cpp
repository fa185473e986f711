#include "terra/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <tuple>

#include "terra/error.hpp"
#include "terra/fft.hpp"

namespace terra {

namespace {

void require_same_shape(const RasterGrid& a, const RasterGrid& b, const char* what) {
  if (!a.same_shape(b))
    throw DataError(std::string(what) + ": dimension mismatch (" + std::to_string(a.width) + "x" +
                    std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                    std::to_string(b.height) + ")");
}

}  // namespace

double psnr(const RasterGrid& a, const RasterGrid& b) {
  require_same_shape(a, b, "psnr");
  double se = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i) {
    const double d = a.values[i] - b.values[i];
    se += d * d;
  }
  const double mse = se / static_cast<double>(a.values.size());
  if (mse == 0.0) return 200.0;
  return 10.0 * std::log10(1.0 / mse);
}

double ssim(const RasterGrid& a, const RasterGrid& b) {
  require_same_shape(a, b, "ssim");
  constexpr int kWin = 11;
  constexpr double kSigma = 1.5;
  constexpr double kL = 2.0;
  constexpr double kC1 = (0.01 * kL) * (0.01 * kL);
  constexpr double kC2 = (0.03 * kL) * (0.03 * kL);
  if (a.width < kWin || a.height < kWin) throw DataError("ssim: grid smaller than the 11x11 window");

  double w[kWin];
  double sum = 0.0;
  for (int i = 0; i < kWin; ++i) {
    const double d = i - (kWin - 1) / 2.0;
    w[i] = std::exp(-0.5 * d * d / (kSigma * kSigma));
    sum += w[i];
  }
  for (double& x : w) x /= sum;

  const int oh = a.height - kWin + 1, ow = a.width - kWin + 1;
  double total = 0.0;
  for (int r = 0; r < oh; ++r) {
    for (int c = 0; c < ow; ++c) {
      double mx = 0, my = 0, mxx = 0, myy = 0, mxy = 0;
      for (int i = 0; i < kWin; ++i) {
        double rx = 0, ry = 0, rxx = 0, ryy = 0, rxy = 0;
        for (int j = 0; j < kWin; ++j) {
          const double va = a.at(r + i, c + j), vb = b.at(r + i, c + j);
          rx += w[j] * va;
          ry += w[j] * vb;
          rxx += w[j] * va * va;
          ryy += w[j] * vb * vb;
          rxy += w[j] * va * vb;
        }
        mx += w[i] * rx;
        my += w[i] * ry;
        mxx += w[i] * rxx;
        myy += w[i] * ryy;
        mxy += w[i] * rxy;
      }
      const double vx = std::max(0.0, mxx - mx * mx);
      const double vy = std::max(0.0, myy - my * my);
      const double cov = mxy - mx * my;
      total += ((2 * mx * my + kC1) * (2 * cov + kC2)) /
               ((mx * mx + my * my + kC1) * (vx + vy + kC2));
    }
  }
  return total / (static_cast<double>(oh) * ow);
}

MeanStd log_magnitude_diff(const RasterGrid& a, const RasterGrid& b) {
  require_same_shape(a, b, "log_magnitude_diff");
  constexpr double kEps = 1e-12;
  const Spectrum sa = fft2(a);
  const Spectrum sb = fft2(b);
  const size_t n = sa.bins.size();
  double sum = 0.0, sum2 = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double d = std::fabs(std::log(std::abs(sa.bins[i]) + kEps) -
                               std::log(std::abs(sb.bins[i]) + kEps));
    sum += d;
    sum2 += d * d;
  }
  const double mean = sum / static_cast<double>(n);
  const double var = std::max(0.0, sum2 / static_cast<double>(n) - mean * mean);
  return {mean, std::sqrt(var)};
}

GradientDiff gradient_field_diff(const RasterGrid& ax, const RasterGrid& ay,
                                 const RasterGrid& rx, const RasterGrid& ry) {
  require_same_shape(ax, rx, "gradient_field_diff");
  require_same_shape(ax, ay, "gradient_field_diff");
  require_same_shape(rx, ry, "gradient_field_diff");
  constexpr double kMin = 1e-9;

  GradientDiff out;
  double ns = 0, ns2 = 0, ds = 0, ds2 = 0;
  size_t n = ax.values.size(), nd = 0;
  for (size_t i = 0; i < n; ++i) {
    const double gax = ax.values[i], gay = ay.values[i];
    const double grx = rx.values[i], gry = ry.values[i];
    const double na = std::hypot(gax, gay), nr = std::hypot(grx, gry);
    const double dn = std::fabs(na - nr);
    ns += dn;
    ns2 += dn * dn;
    if (na >= kMin && nr >= kMin) {
      const double cross = gax * gry - gay * grx;
      const double dot = gax * grx + gay * gry;
      const double ang = std::fabs(std::atan2(cross, dot));
      ds += ang;
      ds2 += ang * ang;
      ++nd;
    }
  }
  out.norm.mean = ns / static_cast<double>(n);
  out.norm.std = std::sqrt(std::max(0.0, ns2 / static_cast<double>(n) - out.norm.mean * out.norm.mean));
  if (nd > 0) {
    out.direction.mean = ds / static_cast<double>(nd);
    out.direction.std =
        std::sqrt(std::max(0.0, ds2 / static_cast<double>(nd) - out.direction.mean * out.direction.mean));
  }
  out.direction_samples = nd;
  return out;
}

double f05_score(double precision, double recall) {
  if (precision + recall <= 0.0) return 0.0;
  return 1.25 * precision * recall / (0.25 * precision + recall);
}

MatchReport match_critical_points(const std::vector<CriticalPoint>& pred,
                                  const std::vector<CriticalPoint>& ref, double radius) {
  if (!(radius > 0.0)) throw DataError("match radius must be positive");

  std::vector<int> pred_ids, ref_ids;
  for (size_t i = 0; i < pred.size(); ++i)
    if (!pred[i].boundary) pred_ids.push_back(static_cast<int>(i));
  for (size_t i = 0; i < ref.size(); ++i)
    if (!ref[i].boundary) ref_ids.push_back(static_cast<int>(i));

  struct Pair {
    double dist;
    int p, r;
  };
  std::vector<Pair> pairs;
  for (int pi : pred_ids) {
    for (int ri : ref_ids) {
      if (pred[pi].kind != ref[ri].kind) continue;
      const double d = std::hypot(pred[pi].x - ref[ri].x, pred[pi].y - ref[ri].y);
      if (d <= radius) pairs.push_back({d, pi, ri});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    return std::tie(a.dist, a.p, a.r) < std::tie(b.dist, b.p, b.r);
  });

  MatchReport rep;
  std::vector<bool> pused(pred.size(), false), rused(ref.size(), false);
  for (const Pair& pr : pairs) {
    if (pused[pr.p] || rused[pr.r]) continue;
    pused[pr.p] = rused[pr.r] = true;
    rep.matches.emplace_back(pred[pr.p].id, ref[pr.r].id);
  }
  const double matched = static_cast<double>(rep.matches.size());
  rep.precision = pred_ids.empty() ? 0.0 : matched / static_cast<double>(pred_ids.size());
  rep.recall = ref_ids.empty() ? 0.0 : matched / static_cast<double>(ref_ids.size());
  rep.f05 = f05_score(rep.precision, rep.recall);
  return rep;
}

PersistenceDiagram diagram_from_mig(const MorseIncidenceGraph& mig) {
  PersistenceDiagram d;
  for (const MigArc& a : mig.arcs) {
    const CriticalPoint& s = mig.node(a.saddle);
    const CriticalPoint& e = mig.node(a.extremum);
    if (s.boundary || e.boundary) continue;
    d.points.emplace_back(std::min(s.height, e.height), std::max(s.height, e.height));
  }
  std::sort(d.points.begin(), d.points.end());
  return d;
}

void save_diagram_csv(const PersistenceDiagram& d, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "birth,death\n";
  char buf[80];
  for (const auto& [b, dd] : d.points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", b, dd);
    out << buf;
  }
}

double solve_assignment(const std::vector<std::vector<double>>& cost, std::vector<int>& match) {
  // Hungarian algorithm with row/column potentials; a[i][j] indexed 1-based
  // internally. Complexity O(n^3).
  const int n = static_cast<int>(cost.size());
  if (n == 0) {
    match.clear();
    return 0.0;
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = -1;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  match.assign(n, -1);
  double total = 0.0;
  for (int j = 1; j <= n; ++j) {
    if (p[j] > 0) {
      match[p[j] - 1] = j - 1;
      total += cost[p[j] - 1][j - 1];
    }
  }
  return total;
}

double wasserstein(const PersistenceDiagram& a, const PersistenceDiagram& b) {
  const int n = static_cast<int>(a.points.size());
  const int m = static_cast<int>(b.points.size());
  if (n == 0 && m == 0) return 0.0;

  // (n+m) x (n+m): point-point block, each point's own diagonal projection,
  // and zero-cost diagonal-diagonal pairs. A large finite sentinel forbids
  // foreign diagonal slots.
  double big = 1.0;
  auto linf = [](const std::pair<double, double>& p, const std::pair<double, double>& q) {
    return std::max(std::fabs(p.first - q.first), std::fabs(p.second - q.second));
  };
  for (const auto& p : a.points) big += p.second - p.first;
  for (const auto& q : b.points) big += q.second - q.first;
  for (const auto& p : a.points)
    for (const auto& q : b.points) big += linf(p, q);

  const int size = n + m;
  std::vector<std::vector<double>> cost(size, std::vector<double>(size, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) cost[i][j] = linf(a.points[i], b.points[j]);
  for (int i = 0; i < n; ++i)
    for (int j = m; j < size; ++j)
      cost[i][j] = (j - m == i) ? 0.5 * (a.points[i].second - a.points[i].first) : big;
  for (int i = n; i < size; ++i)
    for (int j = 0; j < m; ++j)
      cost[i][j] = (i - n == j) ? 0.5 * (b.points[j].second - b.points[j].first) : big;

  std::vector<int> match;
  return solve_assignment(cost, match);
}

double ws_ratio(double ws_psi_m1, double ws_psi_m2, double ws_m1_m2) {
  if (!(ws_m1_m2 > 0.0))
    throw DataError("ws_ratio: zero denominator (the two mesh diagrams are identical)");
  return std::min(ws_psi_m1, ws_psi_m2) / ws_m1_m2;
}

}  // namespace terra
