#include "terra/raster.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "terra/field.hpp"
#include "terra/rng.hpp"

namespace terra {

double RasterGrid::min_value() const {
  return *std::min_element(values.begin(), values.end());
}

double RasterGrid::max_value() const {
  return *std::max_element(values.begin(), values.end());
}

double RasterGrid::mean_value() const {
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

void RasterGrid::validate() const {
  if (width < 2 || height < 2) throw DataError("grid must be at least 2x2");
  if (cell_size <= 0.0) throw DataError("cell_size must be positive");
  if (values.size() != static_cast<size_t>(width) * height)
    throw DataError("value count does not match width*height");
  for (double v : values)
    if (!std::isfinite(v)) throw DataError("grid contains a non-finite value");
}

namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, int line, const std::string& msg) {
  throw DataError(path.string() + ":" + std::to_string(line) + ": " + msg);
}

// fixed 9 significant digits, trailing zeros kept
void format_value(char* buf, size_t n, double v) { std::snprintf(buf, n, "%#.9g", v); }

}  // namespace

RasterGrid load_ascii_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  RasterGrid g;
  bool has_nodata = false;
  double nodata = 0.0;
  int line_no = 0;
  std::string line;

  // header: ncols, nrows, xllcorner, yllcorner, cellsize, optional NODATA_value
  int ncols = -1, nrows = -1;
  int header_seen = 0;
  while (header_seen < 5) {
    if (!std::getline(in, line)) parse_fail(path, line_no + 1, "unexpected end of header");
    ++line_no;
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;  // blank line
    key = lower(key);
    double val;
    if (!(ls >> val)) parse_fail(path, line_no, "missing value for header key '" + key + "'");
    if (key == "ncols") {
      ncols = static_cast<int>(val);
      ++header_seen;
    } else if (key == "nrows") {
      nrows = static_cast<int>(val);
      ++header_seen;
    } else if (key == "xllcorner") {
      g.x0 = val;
      ++header_seen;
    } else if (key == "yllcorner") {
      g.y0 = val;
      ++header_seen;
    } else if (key == "cellsize") {
      g.cell_size = val;
      ++header_seen;
    } else if (key == "nodata_value") {
      has_nodata = true;
      nodata = val;
    } else {
      parse_fail(path, line_no, "unknown header key '" + key + "'");
    }
  }
  if (ncols < 2 || nrows < 2) parse_fail(path, line_no, "ncols/nrows must be >= 2");
  if (g.cell_size <= 0.0) parse_fail(path, line_no, "cellsize must be positive");

  // optional NODATA_value may follow the five mandatory keys
  auto data_start = in.tellg();
  if (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key;
    if (ls >> key && lower(key) == "nodata_value") {
      double val;
      if (!(ls >> val)) parse_fail(path, line_no + 1, "missing NODATA_value");
      has_nodata = true;
      nodata = val;
      ++line_no;
    } else {
      in.seekg(data_start);
    }
  } else {
    in.clear();
    in.seekg(data_start);
  }

  g.width = ncols;
  g.height = nrows;
  g.values.resize(static_cast<size_t>(ncols) * nrows);

  for (int r = 0; r < nrows; ++r) {
    if (!std::getline(in, line)) parse_fail(path, line_no + 1, "missing data row " + std::to_string(r));
    ++line_no;
    std::istringstream ls(line);
    for (int c = 0; c < ncols; ++c) {
      double v;
      if (!(ls >> v))
        parse_fail(path, line_no,
                   "row " + std::to_string(r) + " has fewer than " + std::to_string(ncols) + " values");
      if (!std::isfinite(v)) parse_fail(path, line_no, "non-finite value in row " + std::to_string(r));
      if (has_nodata && v == nodata)
        parse_fail(path, line_no, "NODATA cell in row " + std::to_string(r));
      g.at(r, c) = v;
    }
    double extra;
    if (ls >> extra)
      parse_fail(path, line_no,
                 "row " + std::to_string(r) + " has more than " + std::to_string(ncols) + " values");
  }
  g.validate();
  return g;
}

void save_ascii_grid(const RasterGrid& grid, const std::filesystem::path& path) {
  grid.validate();
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());

  char buf[64];
  out << "ncols " << grid.width << "\n";
  out << "nrows " << grid.height << "\n";
  format_value(buf, sizeof buf, grid.x0);
  out << "xllcorner " << buf << "\n";
  format_value(buf, sizeof buf, grid.y0);
  out << "yllcorner " << buf << "\n";
  format_value(buf, sizeof buf, grid.cell_size);
  out << "cellsize " << buf << "\n";
  for (int r = 0; r < grid.height; ++r) {
    for (int c = 0; c < grid.width; ++c) {
      format_value(buf, sizeof buf, grid.at(r, c));
      out << buf << (c + 1 == grid.width ? "" : " ");
    }
    out << "\n";
  }
  if (!out) throw IoError("write failed for " + path.string());
}

std::pair<RasterGrid, NormalizeParams> normalize(const RasterGrid& grid) {
  grid.validate();
  NormalizeParams p{grid.min_value(), grid.max_value()};
  if (!(p.h_max > p.h_min)) throw DataError("constant grid: normalization range is degenerate");
  RasterGrid out = grid;
  const double inv = 2.0 / (p.h_max - p.h_min);
  for (double& v : out.values) v = (v - p.h_min) * inv - 1.0;
  return {std::move(out), p};
}

RasterGrid denormalize(const RasterGrid& grid, const NormalizeParams& params) {
  RasterGrid out = grid;
  for (double& v : out.values) v = params.to_world(v);
  return out;
}

namespace {

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k[i + radius];
  }
  for (double& w : k) w /= sum;
  return k;
}

}  // namespace

RasterGrid gaussian_blur(const RasterGrid& grid, double sigma) {
  if (sigma <= 0.0) throw DataError("blur sigma must be positive");
  const std::vector<double> k = gaussian_kernel(sigma);
  const int radius = static_cast<int>(k.size() / 2);
  const int w = grid.width, h = grid.height;

  // horizontal pass, edge replication
  RasterGrid tmp = grid;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int cc = std::clamp(c + i, 0, w - 1);
        acc += k[i + radius] * grid.at(r, cc);
      }
      tmp.at(r, c) = acc;
    }
  }
  // vertical pass
  RasterGrid out = grid;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int rr = std::clamp(r + i, 0, h - 1);
        acc += k[i + radius] * tmp.at(rr, c);
      }
      out.at(r, c) = acc;
    }
  }
  return out;
}

GaussianPyramid build_pyramid(const RasterGrid& grid, int levels, double sigma) {
  grid.validate();
  if (levels < 2) throw DataError("pyramid needs at least 2 levels");

  // ceil-halving preview of the coarsest size
  int cw = grid.width, ch = grid.height;
  for (int l = 1; l < levels; ++l) {
    cw = (cw + 1) / 2;
    ch = (ch + 1) / 2;
  }
  if (cw < 8 || ch < 8)
    throw DataError("too many pyramid levels: coarsest layer would be " + std::to_string(cw) +
                    "x" + std::to_string(ch));

  GaussianPyramid pyr;
  pyr.sigma = sigma;
  pyr.layers.push_back(grid);
  for (int l = 1; l < levels; ++l) {
    const RasterGrid& prev = pyr.layers.back();
    RasterGrid blurred = gaussian_blur(prev, sigma);
    RasterGrid next;
    next.width = (prev.width + 1) / 2;
    next.height = (prev.height + 1) / 2;
    next.cell_size = prev.cell_size * 2.0;
    next.x0 = prev.x0;
    next.y0 = prev.y0;
    next.values.resize(static_cast<size_t>(next.width) * next.height);
    for (int r = 0; r < next.height; ++r)
      for (int c = 0; c < next.width; ++c) next.at(r, c) = blurred.at(2 * r, 2 * c);
    pyr.layers.push_back(std::move(next));
  }
  return pyr;
}

GaussianBumpField synth_bump_field(std::uint64_t seed, int n_bumps,
                                   double axis_min_frac, double axis_max_frac) {
  Rng rng(seed);
  std::vector<GaussianBump> bumps(n_bumps);
  for (GaussianBump& b : bumps) {
    // keep centres inside the inner 80% so bump apexes stay interior
    b.cx = rng.uniform(-0.8, 0.8);
    b.cy = rng.uniform(-0.8, 0.8);
    b.amp = rng.uniform(-1.0, 1.0);
    // axis std-devs as fractions of the side; side length = 2 in coords
    const double s1 = 2.0 * rng.uniform(axis_min_frac, axis_max_frac);
    const double s2 = 2.0 * rng.uniform(axis_min_frac, axis_max_frac);
    const double theta = rng.uniform(0.0, 3.14159265358979323846);
    // inverse covariance of a rotated diagonal(s1^2, s2^2)
    const double ct = std::cos(theta), st = std::sin(theta);
    const double i1 = 1.0 / (s1 * s1), i2 = 1.0 / (s2 * s2);
    b.qa = ct * ct * i1 + st * st * i2;
    b.qb = ct * st * (i1 - i2);
    b.qc = st * st * i1 + ct * ct * i2;
  }
  return GaussianBumpField(std::move(bumps));
}

Jet2 GaussianBumpField::jet(double x, double y) const {
  Jet2 j;
  for (const GaussianBump& b : bumps_) {
    const double dx = x - b.cx, dy = y - b.cy;
    const double q = b.qa * dx * dx + 2.0 * b.qb * dx * dy + b.qc * dy * dy;
    const double v = b.amp * std::exp(-0.5 * q);
    const double px = b.qa * dx + b.qb * dy;  // d(q/2)/dx
    const double py = b.qb * dx + b.qc * dy;
    j.value += v;
    j.gx += -px * v;
    j.gy += -py * v;
    j.hxx += (px * px - b.qa) * v;
    j.hxy += (px * py - b.qb) * v;
    j.hyy += (py * py - b.qc) * v;
  }
  j.value = scale_ * j.value + offset_;
  j.gx *= scale_;
  j.gy *= scale_;
  j.hxx *= scale_;
  j.hxy *= scale_;
  j.hyy *= scale_;
  return j;
}

double edge_window(double x, double y, double taper) {
  if (taper <= 0.0) return 1.0;
  auto ramp = [taper](double u) {
    const double d = (1.0 - std::fabs(u)) / taper;
    if (d >= 1.0) return 1.0;
    if (d <= 0.0) return 0.0;
    return 0.5 - 0.5 * std::cos(3.14159265358979323846 * d);
  };
  return ramp(x) * ramp(y);
}

RasterGrid synth_terrain(std::uint64_t seed, int size, int n_bumps,
                         std::pair<double, double> height_range,
                         double axis_min_frac, double axis_max_frac, double edge_taper) {
  if (n_bumps < 1) throw DataError("n_bumps must be >= 1");
  if (size < 16) throw DataError("synthetic terrain size must be >= 16");

  GaussianBumpField field = synth_bump_field(seed, n_bumps, axis_min_frac, axis_max_frac);

  RasterGrid g;
  g.width = g.height = size;
  g.cell_size = 1.0;
  g.values.resize(static_cast<size_t>(size) * size);
  for (int r = 0; r < size; ++r)
    for (int c = 0; c < size; ++c) {
      const double x = g.coord_x(c), y = g.coord_y(r);
      g.at(r, c) = field.value(x, y) * edge_window(x, y, edge_taper);
    }

  const double lo = g.min_value(), hi = g.max_value();
  if (!(hi > lo)) throw DataError("degenerate synthetic terrain (flat field)");
  const double s = (height_range.second - height_range.first) / (hi - lo);
  for (double& v : g.values) v = height_range.first + (v - lo) * s;
  return g;
}

RasterGrid add_gaussian_noise(const RasterGrid& grid, double variance, std::uint64_t seed) {
  if (variance < 0.0) throw DataError("noise variance must be >= 0");
  RasterGrid out = grid;
  if (variance == 0.0) return out;
  Rng rng(seed);
  const double sd = std::sqrt(variance);
  for (double& v : out.values) v += sd * rng.gaussian();
  return out;
}

std::pair<RasterGrid, RasterGrid> finite_diff_gradient(const RasterGrid& grid) {
  if (grid.width < 3 || grid.height < 3) throw DataError("gradient needs at least 3x3");
  RasterGrid gx = grid, gy = grid;
  const double sx = grid.width / 2.0;   // 1 / (x step), step = 2/width
  const double sy = grid.height / 2.0;
  for (int r = 0; r < grid.height; ++r) {
    for (int c = 0; c < grid.width; ++c) {
      if (c == 0)
        gx.at(r, c) = (grid.at(r, 1) - grid.at(r, 0)) * sx;
      else if (c == grid.width - 1)
        gx.at(r, c) = (grid.at(r, c) - grid.at(r, c - 1)) * sx;
      else
        gx.at(r, c) = (grid.at(r, c + 1) - grid.at(r, c - 1)) * 0.5 * sx;
      // +y is north: row index decreases northward
      if (r == 0)
        gy.at(r, c) = (grid.at(0, c) - grid.at(1, c)) * sy;
      else if (r == grid.height - 1)
        gy.at(r, c) = (grid.at(r - 1, c) - grid.at(r, c)) * sy;
      else
        gy.at(r, c) = (grid.at(r - 1, c) - grid.at(r + 1, c)) * 0.5 * sy;
    }
  }
  return {std::move(gx), std::move(gy)};
}

}  // namespace terra
