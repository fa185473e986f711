#include "terra/topo_discrete.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "terra/error.hpp"
#include "terra/topo_smooth.hpp"

namespace terra {

const char* to_string(MeshConfig config) {
  switch (config) {
    case MeshConfig::mesh1: return "mesh1";
    case MeshConfig::mesh2: return "mesh2";
    case MeshConfig::grad_aligned: return "grad_aligned";
  }
  return "?";
}

TriangulatedGrid::TriangulatedGrid(const RasterGrid& grid, MeshConfig config)
    : grid_(grid), config_(config) {
  grid_.validate();
  const int w = grid_.width, h = grid_.height;
  cells_ = (w - 1) * (h - 1);
  n_h_ = h * (w - 1);
  n_v_ = (h - 1) * w;
  n_d_ = cells_;
  diag_nw_se_.resize(static_cast<size_t>(cells_));
  for (int r = 0; r < h - 1; ++r) {
    for (int c = 0; c < w - 1; ++c) {
      bool nw_se = true;
      if (config == MeshConfig::mesh2) {
        nw_se = false;
      } else if (config == MeshConfig::grad_aligned) {
        // connect the corner pair with the smaller height difference, so the
        // diagonal runs along the local level sets
        const double d_nwse = std::fabs(grid_.at(r, c) - grid_.at(r + 1, c + 1));
        const double d_nesw = std::fabs(grid_.at(r, c + 1) - grid_.at(r + 1, c));
        nw_se = d_nwse <= d_nesw;
      }
      diag_nw_se_[static_cast<size_t>(r) * (w - 1) + c] = nw_se ? 1 : 0;
    }
  }
}

std::array<int, 2> TriangulatedGrid::edge_vertices(int edge) const {
  const int w = grid_.width;
  if (edge < n_h_) {
    const int r = edge / (w - 1), c = edge % (w - 1);
    return {r * w + c, r * w + c + 1};
  }
  edge -= n_h_;
  if (edge < n_v_) {
    const int r = edge / w, c = edge % w;
    return {r * w + c, (r + 1) * w + c};
  }
  edge -= n_v_;
  const int r = edge / (w - 1), c = edge % (w - 1);
  if (diag_nw_se_[static_cast<size_t>(edge)])
    return {r * w + c, (r + 1) * w + c + 1};
  return {r * w + c + 1, (r + 1) * w + c};
}

std::array<int, 3> TriangulatedGrid::triangle_vertices(int tri) const {
  const int w = grid_.width;
  const int cell = tri / 2;
  const int r = cell / (w - 1), c = cell % (w - 1);
  const int nw = r * w + c, ne = nw + 1, sw = nw + w, se = sw + 1;
  if (diag_nw_se_[static_cast<size_t>(cell)])
    return (tri % 2 == 0) ? std::array<int, 3>{nw, ne, se} : std::array<int, 3>{nw, se, sw};
  return (tri % 2 == 0) ? std::array<int, 3>{nw, ne, sw} : std::array<int, 3>{ne, se, sw};
}

std::array<int, 3> TriangulatedGrid::triangle_edges(int tri) const {
  const int w = grid_.width;
  const int cell = tri / 2;
  const int r = cell / (w - 1), c = cell % (w - 1);
  const int top = r * (w - 1) + c;
  const int bottom = (r + 1) * (w - 1) + c;
  const int left = n_h_ + r * w + c;
  const int right = n_h_ + r * w + c + 1;
  const int diag = n_h_ + n_v_ + cell;
  if (diag_nw_se_[static_cast<size_t>(cell)])
    return (tri % 2 == 0) ? std::array<int, 3>{top, right, diag}
                          : std::array<int, 3>{left, bottom, diag};
  return (tri % 2 == 0) ? std::array<int, 3>{top, left, diag}
                        : std::array<int, 3>{right, bottom, diag};
}

std::array<int, 2> TriangulatedGrid::edge_triangles(int edge) const {
  const int w = grid_.width, h = grid_.height;
  auto cell_tri = [&](int r, int c, int which) { return 2 * (r * (w - 1) + c) + which; };
  if (edge < n_h_) {
    const int r = edge / (w - 1), c = edge % (w - 1);
    // a horizontal edge is the bottom of the cell above (its T1) and the top
    // of the cell below (its T0)
    const int above = (r > 0) ? cell_tri(r - 1, c, 1) : -1;
    const int below = (r < h - 1) ? cell_tri(r, c, 0) : -1;
    return {above, below};
  }
  int e = edge - n_h_;
  if (e < n_v_) {
    const int r = e / w, c = e % w;
    int left = -1, right = -1;
    if (c > 0) left = cell_tri(r, c - 1, diagonal_nw_se(r, c - 1) ? 0 : 1);
    if (c < w - 1) right = cell_tri(r, c, diagonal_nw_se(r, c) ? 1 : 0);
    return {left, right};
  }
  e -= n_v_;
  return {2 * e, 2 * e + 1};
}

std::vector<int> TriangulatedGrid::vertex_edges(int vertex) const {
  const int w = grid_.width, h = grid_.height;
  const int r = vertex_row(vertex), c = vertex_col(vertex);
  std::vector<int> out;
  out.reserve(8);
  if (c > 0) out.push_back(r * (w - 1) + c - 1);
  if (c < w - 1) out.push_back(r * (w - 1) + c);
  if (r > 0) out.push_back(n_h_ + (r - 1) * w + c);
  if (r < h - 1) out.push_back(n_h_ + r * w + c);
  const int dbase = n_h_ + n_v_;
  // diagonals of the four surrounding cells that end at this vertex
  if (r > 0 && c > 0 && diagonal_nw_se(r - 1, c - 1)) out.push_back(dbase + (r - 1) * (w - 1) + c - 1);
  if (r > 0 && c < w - 1 && !diagonal_nw_se(r - 1, c)) out.push_back(dbase + (r - 1) * (w - 1) + c);
  if (r < h - 1 && c > 0 && !diagonal_nw_se(r, c - 1)) out.push_back(dbase + r * (w - 1) + c - 1);
  if (r < h - 1 && c < w - 1 && diagonal_nw_se(r, c)) out.push_back(dbase + r * (w - 1) + c);
  return out;
}

int TriangulatedGrid::edge_between(int va, int vb) const {
  for (int e : vertex_edges(va)) {
    const auto [a, b] = edge_vertices(e);
    if (a == vb || b == vb) return e;
  }
  return -1;
}

namespace {

// simulation-of-simplicity key: (height, vertex index)
struct VKey {
  double h;
  int v;
  bool operator<(const VKey& o) const { return std::tie(h, v) < std::tie(o.h, o.v); }
  bool operator==(const VKey& o) const { return h == o.h && v == o.v; }
};

VKey key_of(const RasterGrid& g, int v) {
  return {g.values[static_cast<size_t>(v)], v};
}

}  // namespace

FormanGradient compute_forman_gradient(const TriangulatedGrid& mesh) {
  const RasterGrid& g = mesh.grid();
  FormanGradient fg;
  fg.vertex_pair.assign(static_cast<size_t>(mesh.n_vertices()), -1);
  fg.edge_pair_up.assign(static_cast<size_t>(mesh.n_edges()), -1);
  fg.edge_pair_down.assign(static_cast<size_t>(mesh.n_edges()), -1);
  fg.triangle_pair.assign(static_cast<size_t>(mesh.n_triangles()), -1);

  struct LEdge {
    int id;
    VKey other;     // G-value below the shared top vertex
    bool resolved = false;
    bool critical = false;
  };
  struct LTri {
    int id;
    VKey k2, k3;    // remaining keys, descending (k2 > k3)
    int le1, le2;   // local indices of its two lower-star edges
    int state = 0;  // 0 unseen, 1 in PQone, 2 in PQzero, 3 resolved
  };

  std::vector<LEdge> ledges;
  std::vector<LTri> ltris;

  for (int x = 0; x < mesh.n_vertices(); ++x) {
    const VKey kx = key_of(g, x);
    ledges.clear();
    ltris.clear();

    for (int e : mesh.vertex_edges(x)) {
      const auto [a, b] = mesh.edge_vertices(e);
      const int other = (a == x) ? b : a;
      const VKey ko = key_of(g, other);
      if (ko < kx) ledges.push_back({e, ko, false, false});
    }
    if (ledges.empty()) continue;  // critical vertex (minimum)

    // triangles whose top vertex is x
    for (int e : mesh.vertex_edges(x)) {
      for (int t : mesh.edge_triangles(e)) {
        if (t < 0) continue;
        const auto tv = mesh.triangle_vertices(t);
        bool mine = true;
        VKey others[2];
        int no = 0;
        for (int v : tv) {
          if (v == x) continue;
          const VKey kv = key_of(g, v);
          if (!(kv < kx)) {
            mine = false;
            break;
          }
          others[no++] = kv;
        }
        if (!mine || no != 2) continue;
        bool seen = false;
        for (const LTri& lt : ltris) seen = seen || lt.id == t;
        if (seen) continue;
        LTri lt;
        lt.id = t;
        lt.k2 = std::max(others[0], others[1]);
        lt.k3 = std::min(others[0], others[1]);
        lt.le1 = lt.le2 = -1;
        const auto te = mesh.triangle_edges(t);
        for (int te_id : te) {
          for (size_t i = 0; i < ledges.size(); ++i) {
            if (ledges[i].id != te_id) continue;
            (lt.le1 == -1 ? lt.le1 : lt.le2) = static_cast<int>(i);
          }
        }
        ltris.push_back(lt);
      }
    }

    // pair x with its lowest lower-star edge
    size_t delta = 0;
    for (size_t i = 1; i < ledges.size(); ++i)
      if (ledges[i].other < ledges[delta].other) delta = i;
    fg.vertex_pair[static_cast<size_t>(x)] = ledges[delta].id;
    fg.edge_pair_down[static_cast<size_t>(ledges[delta].id)] = x;
    ledges[delta].resolved = true;

    auto tri_unpaired = [&](const LTri& t) {
      int n = 0;
      if (t.le1 >= 0 && !ledges[static_cast<size_t>(t.le1)].resolved) ++n;
      if (t.le2 >= 0 && !ledges[static_cast<size_t>(t.le2)].resolved) ++n;
      return n;
    };
    auto refresh_pqone = [&]() {
      for (LTri& t : ltris)
        if (t.state == 0 && tri_unpaired(t) == 1) t.state = 1;
    };

    // remaining edges await a triangle pairing (or criticality)
    refresh_pqone();

    // edge G < triangle G when the edge is a prefix of the triangle sequence
    auto edge_before_tri = [&](const LEdge& e, const LTri& t) {
      if (e.other == t.k2) return true;
      return e.other < t.k2;
    };

    while (true) {
      // drain PQone: lowest-G triangle with exactly one unpaired face
      bool progressed = true;
      while (progressed) {
        progressed = false;
        int best = -1;
        for (size_t i = 0; i < ltris.size(); ++i) {
          if (ltris[i].state != 1) continue;
          if (best == -1 || std::tie(ltris[i].k2, ltris[i].k3) <
                                std::tie(ltris[static_cast<size_t>(best)].k2,
                                         ltris[static_cast<size_t>(best)].k3))
            best = static_cast<int>(i);
        }
        if (best == -1) break;
        LTri& t = ltris[static_cast<size_t>(best)];
        const int unpaired = tri_unpaired(t);
        if (unpaired == 0) {
          t.state = 2;  // nothing left to pair with; candidate critical
          progressed = true;
          continue;
        }
        int lam = (t.le1 >= 0 && !ledges[static_cast<size_t>(t.le1)].resolved) ? t.le1 : t.le2;
        LEdge& e = ledges[static_cast<size_t>(lam)];
        fg.edge_pair_up[static_cast<size_t>(e.id)] = t.id;
        fg.triangle_pair[static_cast<size_t>(t.id)] = e.id;
        e.resolved = true;
        t.state = 3;
        refresh_pqone();
        progressed = true;
      }

      // lowest-G unresolved cell becomes critical
      int best_edge = -1;
      for (size_t i = 0; i < ledges.size(); ++i) {
        if (ledges[i].resolved) continue;
        if (best_edge == -1 || ledges[i].other < ledges[static_cast<size_t>(best_edge)].other)
          best_edge = static_cast<int>(i);
      }
      int best_tri = -1;
      for (size_t i = 0; i < ltris.size(); ++i) {
        if (ltris[i].state != 2) continue;
        if (best_tri == -1 || std::tie(ltris[i].k2, ltris[i].k3) <
                                  std::tie(ltris[static_cast<size_t>(best_tri)].k2,
                                           ltris[static_cast<size_t>(best_tri)].k3))
          best_tri = static_cast<int>(i);
      }
      if (best_edge == -1 && best_tri == -1) break;

      bool take_edge;
      if (best_edge == -1) take_edge = false;
      else if (best_tri == -1) take_edge = true;
      else take_edge = edge_before_tri(ledges[static_cast<size_t>(best_edge)],
                                       ltris[static_cast<size_t>(best_tri)]);
      if (take_edge) {
        LEdge& e = ledges[static_cast<size_t>(best_edge)];
        e.resolved = true;
        e.critical = true;  // stays unpaired in fg
      } else {
        LTri& t = ltris[static_cast<size_t>(best_tri)];
        t.state = 3;  // stays unpaired in fg -> critical triangle
      }
      refresh_pqone();
    }
  }
  return fg;
}

std::vector<CriticalPoint> extract_critical_simplices(const FormanGradient& fg,
                                                      const TriangulatedGrid& mesh,
                                                      CriticalIndex* index) {
  const RasterGrid& g = mesh.grid();

  struct Tagged {
    CriticalPoint p;
    int dim;      // 0 vertex, 1 edge, 2 triangle
    int simplex;
  };
  std::vector<Tagged> tagged;

  auto vertex_xy = [&](int v) {
    return std::pair<double, double>{g.coord_x(mesh.vertex_col(v)), g.coord_y(mesh.vertex_row(v))};
  };

  for (int v = 0; v < mesh.n_vertices(); ++v) {
    if (fg.vertex_pair[static_cast<size_t>(v)] != -1) continue;
    CriticalPoint p;
    std::tie(p.x, p.y) = vertex_xy(v);
    p.height = g.values[static_cast<size_t>(v)];
    p.kind = CritKind::minimum;
    p.discrete = true;
    tagged.push_back({p, 0, v});
  }
  for (int e = 0; e < mesh.n_edges(); ++e) {
    if (!fg.edge_critical(e)) continue;
    const auto [a, b] = mesh.edge_vertices(e);
    const auto [ax, ay] = vertex_xy(a);
    const auto [bx, by] = vertex_xy(b);
    CriticalPoint p;
    p.x = 0.5 * (ax + bx);
    p.y = 0.5 * (ay + by);
    p.height = std::max(g.values[static_cast<size_t>(a)], g.values[static_cast<size_t>(b)]);
    p.kind = CritKind::saddle;
    p.discrete = true;
    tagged.push_back({p, 1, e});
  }
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    if (fg.triangle_pair[static_cast<size_t>(t)] != -1) continue;
    const auto tv = mesh.triangle_vertices(t);
    CriticalPoint p;
    double hx = 0, hy = 0, hmax = -1e300;
    for (int v : tv) {
      const auto [vx, vy] = vertex_xy(v);
      hx += vx / 3.0;
      hy += vy / 3.0;
      hmax = std::max(hmax, g.values[static_cast<size_t>(v)]);
    }
    p.x = hx;
    p.y = hy;
    p.height = hmax;
    p.kind = CritKind::maximum;
    p.discrete = true;
    tagged.push_back({p, 2, t});
  }

  std::sort(tagged.begin(), tagged.end(), [](const Tagged& a, const Tagged& b) {
    return std::tie(a.p.height, a.p.x, a.p.y) < std::tie(b.p.height, b.p.x, b.p.y);
  });

  if (index) {
    index->vertex_node.assign(static_cast<size_t>(mesh.n_vertices()), -1);
    index->edge_node.assign(static_cast<size_t>(mesh.n_edges()), -1);
    index->triangle_node.assign(static_cast<size_t>(mesh.n_triangles()), -1);
  }
  std::vector<CriticalPoint> out;
  out.reserve(tagged.size());
  for (size_t i = 0; i < tagged.size(); ++i) {
    tagged[i].p.id = static_cast<int>(i);
    if (index) {
      auto& map = (tagged[i].dim == 0)   ? index->vertex_node
                  : (tagged[i].dim == 1) ? index->edge_node
                                         : index->triangle_node;
      map[static_cast<size_t>(tagged[i].simplex)] = tagged[i].p.id;
    }
    out.push_back(tagged[i].p);
  }
  return out;
}

namespace {

std::array<double, 2> vertex_point(const TriangulatedGrid& mesh, int v) {
  const RasterGrid& g = mesh.grid();
  return {g.coord_x(mesh.vertex_col(v)), g.coord_y(mesh.vertex_row(v))};
}

std::array<double, 2> edge_midpoint(const TriangulatedGrid& mesh, int e) {
  const auto [a, b] = mesh.edge_vertices(e);
  const auto pa = vertex_point(mesh, a), pb = vertex_point(mesh, b);
  return {0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])};
}

std::array<double, 2> triangle_barycentre(const TriangulatedGrid& mesh, int t) {
  const auto tv = mesh.triangle_vertices(t);
  std::array<double, 2> p{0.0, 0.0};
  for (int v : tv) {
    const auto pv = vertex_point(mesh, v);
    p[0] += pv[0] / 3.0;
    p[1] += pv[1] / 3.0;
  }
  return p;
}

}  // namespace

std::vector<VPath> trace_vpaths(const FormanGradient& fg, const TriangulatedGrid& mesh,
                                int critical_edge) {
  if (!fg.edge_critical(critical_edge)) throw DataError("trace_vpaths: edge is not critical");
  std::vector<VPath> out;

  // descending: follow vertex -> edge pairings to a critical vertex
  const auto [ea, eb] = mesh.edge_vertices(critical_edge);
  for (int u : {ea, eb}) {
    VPath p;
    p.ascending = false;
    p.polyline.push_back(edge_midpoint(mesh, critical_edge));
    std::vector<bool> seen(static_cast<size_t>(mesh.n_vertices()), false);
    int cur = u;
    while (true) {
      if (seen[static_cast<size_t>(cur)])
        throw std::logic_error("V-path cycle through vertex " + std::to_string(cur));
      seen[static_cast<size_t>(cur)] = true;
      p.polyline.push_back(vertex_point(mesh, cur));
      const int pe = fg.vertex_pair[static_cast<size_t>(cur)];
      if (pe == -1) {
        p.end_vertex = cur;
        break;
      }
      p.polyline.push_back(edge_midpoint(mesh, pe));
      const auto [a, b] = mesh.edge_vertices(pe);
      cur = (a == cur) ? b : a;
    }
    out.push_back(std::move(p));
  }

  // ascending: follow edge -> triangle pairings to a critical triangle
  for (int t0 : mesh.edge_triangles(critical_edge)) {
    if (t0 < 0) continue;
    VPath p;
    p.ascending = true;
    p.polyline.push_back(edge_midpoint(mesh, critical_edge));
    std::vector<bool> seen(static_cast<size_t>(mesh.n_triangles()), false);
    int t = t0;
    while (true) {
      if (seen[static_cast<size_t>(t)])
        throw std::logic_error("V-path cycle through triangle " + std::to_string(t));
      seen[static_cast<size_t>(t)] = true;
      p.polyline.push_back(triangle_barycentre(mesh, t));
      const int pe = fg.triangle_pair[static_cast<size_t>(t)];
      if (pe == -1) {
        p.end_triangle = t;
        break;
      }
      p.polyline.push_back(edge_midpoint(mesh, pe));
      const auto [ta, tb] = mesh.edge_triangles(pe);
      const int next = (ta == t) ? tb : ta;
      if (next < 0) {
        p.boundary = true;  // walked off the mesh through a boundary edge
        p.boundary_edge = pe;
        break;
      }
      t = next;
    }
    out.push_back(std::move(p));
  }
  return out;
}

DiscreteTopoResult extract_topology_discrete(const RasterGrid& normalized_grid,
                                             MeshConfig config) {
  DiscreteTopoResult result;
  TriangulatedGrid mesh(normalized_grid, config);
  const RasterGrid& g = mesh.grid();
  const FormanGradient fg = compute_forman_gradient(mesh);
  CriticalIndex index;
  std::vector<CriticalPoint> points = extract_critical_simplices(fg, mesh, &index);

  std::vector<TraceResult> traces;
  std::vector<int> saddle_ids;
  for (int e = 0; e < mesh.n_edges(); ++e) {
    if (!fg.edge_critical(e)) continue;
    const int sid = index.edge_node[static_cast<size_t>(e)];
    if (sid < 0) throw std::logic_error("critical edge missing from node list");

    for (VPath& vp : trace_vpaths(fg, mesh, e)) {
      TraceResult tr;
      tr.ascending = vp.ascending;
      tr.polyline = std::move(vp.polyline);
      if (vp.boundary) {
        tr.terminus = TraceTerminus::boundary;
        // height where the path exits: upper endpoint of the boundary edge
        const auto [a, b] = mesh.edge_vertices(vp.boundary_edge);
        tr.end_value = std::max(g.values[static_cast<size_t>(a)], g.values[static_cast<size_t>(b)]);
      } else if (vp.ascending) {
        tr.terminus = TraceTerminus::extremum;
        tr.extremum_id = index.triangle_node[static_cast<size_t>(vp.end_triangle)];
        if (tr.extremum_id < 0) throw std::logic_error("critical triangle missing from node list");
        tr.end_value = points[static_cast<size_t>(tr.extremum_id)].height;
      } else {
        tr.terminus = TraceTerminus::extremum;
        tr.extremum_id = index.vertex_node[static_cast<size_t>(vp.end_vertex)];
        if (tr.extremum_id < 0) throw std::logic_error("critical vertex missing from node list");
        tr.end_value = points[static_cast<size_t>(tr.extremum_id)].height;
      }
      traces.push_back(std::move(tr));
      saddle_ids.push_back(sid);
    }
  }
  result.mig = build_mig(points, traces, saddle_ids, &result.warnings);
  return result;
}

}  // namespace terra
