#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "terra/error.hpp"

namespace terra {

// Row-major raster of height samples with spatial metadata. Row 0 is the
// north (top) row; (x0, y0) is the lower-left (SW) corner in world metres.
struct RasterGrid {
  int width = 0;
  int height = 0;
  double cell_size = 1.0;
  double x0 = 0.0;
  double y0 = 0.0;
  std::vector<double> values;  // width * height, row-major

  double& at(int row, int col) { return values[static_cast<size_t>(row) * width + col]; }
  double at(int row, int col) const { return values[static_cast<size_t>(row) * width + col]; }

  size_t size() const { return values.size(); }
  bool same_shape(const RasterGrid& o) const { return width == o.width && height == o.height; }

  // normalized pixel-centre coordinates in [-1, 1], +y pointing north
  double coord_x(int col) const { return (2.0 * col + 1.0) / width - 1.0; }
  double coord_y(int row) const { return (2.0 * (height - 1 - row) + 1.0) / height - 1.0; }

  double min_value() const;
  double max_value() const;
  double mean_value() const;

  // throws DataError if any structural invariant is violated
  void validate() const;
};

struct NormalizeParams {
  double h_min = 0.0;
  double h_max = 1.0;

  double to_norm(double h) const { return 2.0 * (h - h_min) / (h_max - h_min) - 1.0; }
  double to_world(double v) const { return h_min + (v + 1.0) * 0.5 * (h_max - h_min); }
};

struct GaussianPyramid {
  std::vector<RasterGrid> layers;  // level 0 = input, last = coarsest
  double sigma = 0.0;

  int levels() const { return static_cast<int>(layers.size()); }
};

// ESRI ASCII grid interchange. NODATA cells are rejected, values are written
// with 9 significant digits.
RasterGrid load_ascii_grid(const std::filesystem::path& path);
void save_ascii_grid(const RasterGrid& grid, const std::filesystem::path& path);

// Affine map of the value range onto [-1, 1]. Throws DataError on a constant
// grid (degenerate range).
std::pair<RasterGrid, NormalizeParams> normalize(const RasterGrid& grid);
RasterGrid denormalize(const RasterGrid& grid, const NormalizeParams& params);

// Separable Gaussian convolution, kernel radius ceil(3*sigma), kernel
// normalized to sum 1, borders handled by edge replication.
RasterGrid gaussian_blur(const RasterGrid& grid, double sigma);

// Level k+1 = every other sample of blur(level k); sizes follow ceil-halving.
// Throws DataError if the coarsest level would drop below 8x8.
GaussianPyramid build_pyramid(const RasterGrid& grid, int levels, double sigma);

// Sum of seeded anisotropic Gaussian bumps, affinely rescaled into
// height_range. axis bounds are expressed as fractions of the side length.
// edge_taper > 0 rolls the raw field off to a constant rim over that
// fraction of each side (cosine ramp), which keeps boundary-cut structure
// out of the terrain.
RasterGrid synth_terrain(std::uint64_t seed, int size, int n_bumps,
                         std::pair<double, double> height_range,
                         double axis_min_frac = 1.0 / 32.0,
                         double axis_max_frac = 1.0 / 8.0,
                         double edge_taper = 0.0);

// cosine edge window in normalized coordinates: 1 inside, rolling to 0 at
// the domain edge over `taper` (per axis); 1 everywhere for taper <= 0
double edge_window(double x, double y, double taper);

// Per-sample i.i.d. zero-mean Gaussian noise of the given variance.
RasterGrid add_gaussian_noise(const RasterGrid& grid, double variance, std::uint64_t seed);

// Central differences (one-sided on borders) in normalized-coordinate units:
// the domain is [-1,1] per axis, so the x step is 2/width. gy is positive for
// terrain rising northward.
std::pair<RasterGrid, RasterGrid> finite_diff_gradient(const RasterGrid& grid);

}  // namespace terra
