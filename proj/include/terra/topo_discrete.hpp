#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "terra/raster.hpp"
#include "terra/topo.hpp"

namespace terra {

enum class MeshConfig { mesh1, mesh2, grad_aligned };

const char* to_string(MeshConfig config);

// Triangulated grid with one diagonal per cell and implicit simplex indexing.
// Edge ids: [0, n_h) horizontal, [n_h, n_h+n_v) vertical, then diagonals.
// Triangle ids: 2 per cell.
class TriangulatedGrid {
public:
  TriangulatedGrid(const RasterGrid& grid, MeshConfig config);

  const RasterGrid& grid() const { return grid_; }
  MeshConfig config() const { return config_; }

  int n_vertices() const { return grid_.width * grid_.height; }
  int n_edges() const { return n_h_ + n_v_ + n_d_; }
  int n_triangles() const { return 2 * cells_; }

  // NW-SE diagonal when true for the cell at (row, col)
  bool diagonal_nw_se(int row, int col) const {
    return diag_nw_se_[static_cast<size_t>(row) * (grid_.width - 1) + col];
  }

  std::array<int, 2> edge_vertices(int edge) const;
  std::array<int, 3> triangle_vertices(int tri) const;
  std::array<int, 3> triangle_edges(int tri) const;
  // cofaces of an edge; -1 entries for boundary edges
  std::array<int, 2> edge_triangles(int edge) const;
  // all edges incident to a vertex (4 axis-aligned + up to 4 diagonal)
  std::vector<int> vertex_edges(int vertex) const;

  int vertex_row(int v) const { return v / grid_.width; }
  int vertex_col(int v) const { return v % grid_.width; }
  int edge_between(int va, int vb) const;  // -1 if not connected

private:
  RasterGrid grid_;
  MeshConfig config_;
  int cells_ = 0;
  int n_h_ = 0, n_v_ = 0, n_d_ = 0;
  std::vector<std::uint8_t> diag_nw_se_;
};

// Discrete vector field from independent lower-star processing: pairings
// vertex->edge and edge->triangle, unpaired simplices critical.
struct FormanGradient {
  // vertex: paired edge id or -1 (critical)
  std::vector<std::int32_t> vertex_pair;
  // edge: paired triangle id or -1
  std::vector<std::int32_t> edge_pair_up;
  // edge: vertex it absorbs (inverse of vertex_pair) or -1
  std::vector<std::int32_t> edge_pair_down;
  // triangle: edge it is paired with or -1 (critical)
  std::vector<std::int32_t> triangle_pair;

  bool edge_critical(int e) const { return edge_pair_up[e] == -1 && edge_pair_down[e] == -1; }
};

FormanGradient compute_forman_gradient(const TriangulatedGrid& mesh);

// simplex id -> node id maps (-1 for regular simplices)
struct CriticalIndex {
  std::vector<int> vertex_node, edge_node, triangle_node;
};

// Critical simplices as critical points: minima at vertices, saddles at
// critical-edge midpoints (height of the upper endpoint), maxima at triangle
// barycentres (height of the top vertex). Ids follow (height, x, y) order.
std::vector<CriticalPoint> extract_critical_simplices(const FormanGradient& fg,
                                                      const TriangulatedGrid& mesh,
                                                      CriticalIndex* index = nullptr);

struct VPath {
  bool ascending = true;      // edge -> triangle direction
  int end_vertex = -1;        // descending terminus (critical vertex)
  int end_triangle = -1;      // ascending terminus (critical triangle), -1 at boundary
  bool boundary = false;
  int boundary_edge = -1;     // the boundary edge an ascending path exits through
  std::vector<std::array<double, 2>> polyline;  // through simplex reference points
};

// Separatrix traversals from one critical edge: 2 descending V-paths through
// vertex-edge pairings and up to 2 ascending through edge-triangle pairings.
std::vector<VPath> trace_vpaths(const FormanGradient& fg, const TriangulatedGrid& mesh,
                                int critical_edge);

struct DiscreteTopoResult {
  MorseIncidenceGraph mig;
  std::vector<std::string> warnings;
};

// Full discrete pipeline on a normalized grid.
DiscreteTopoResult extract_topology_discrete(const RasterGrid& normalized_grid, MeshConfig config);

}  // namespace terra
