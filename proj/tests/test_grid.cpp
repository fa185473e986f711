#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "terra/field.hpp"
#include "terra/raster.hpp"
#include "terra/rng.hpp"

using namespace terra;
namespace fs = std::filesystem;

namespace {

fs::path tmp_file(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("terra_grid_" + name);
  return p;
}

RasterGrid make_grid(int w, int h, double fill = 0.0) {
  RasterGrid g;
  g.width = w;
  g.height = h;
  g.values.assign(static_cast<size_t>(w) * h, fill);
  return g;
}

RasterGrid random_grid(int w, int h, std::uint64_t seed) {
  RasterGrid g = make_grid(w, h);
  Rng rng(seed);
  for (double& v : g.values) v = rng.uniform(-1.0, 1.0);
  return g;
}

double total_variation(const RasterGrid& g) {
  double tv = 0.0;
  for (int r = 0; r < g.height; ++r)
    for (int c = 0; c + 1 < g.width; ++c) tv += std::fabs(g.at(r, c + 1) - g.at(r, c));
  for (int r = 0; r + 1 < g.height; ++r)
    for (int c = 0; c < g.width; ++c) tv += std::fabs(g.at(r + 1, c) - g.at(r, c));
  return tv;
}

}  // namespace

TEST_CASE("ascii grid: parse a 2x2 file") {
  const fs::path p = tmp_file("2x2.asc");
  {
    std::ofstream out(p);
    out << "ncols 2\nnrows 2\nxllcorner 10.0\nyllcorner 20.0\ncellsize 1.5\n"
        << "0 1\n2 3\n";
  }
  RasterGrid g = load_ascii_grid(p);
  CHECK(g.width == 2);
  CHECK(g.height == 2);
  CHECK(g.cell_size == doctest::Approx(1.5));
  CHECK(g.x0 == doctest::Approx(10.0));
  CHECK(g.y0 == doctest::Approx(20.0));
  CHECK(g.values == std::vector<double>{0, 1, 2, 3});
}

TEST_CASE("ascii grid: save/load roundtrip is exact at declared precision") {
  RasterGrid g = random_grid(7, 5, 42);
  for (double& v : g.values) v = 500.0 * v + 100.0;
  g.cell_size = 2.0;
  g.x0 = 2600000.0;
  g.y0 = 1200000.0;
  const fs::path p = tmp_file("rt.asc");
  save_ascii_grid(g, p);
  RasterGrid h = load_ascii_grid(p);
  REQUIRE(h.same_shape(g));
  for (size_t i = 0; i < g.values.size(); ++i) {
    CHECK(std::fabs(h.values[i] - g.values[i]) <= 1e-7 * std::fabs(g.values[i]));
  }
  // a second save must reproduce the file byte-for-byte
  const fs::path p2 = tmp_file("rt2.asc");
  save_ascii_grid(h, p2);
  std::ifstream a(p), b(p2);
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);
}

TEST_CASE("ascii grid: row with wrong value count names the row") {
  const fs::path p = tmp_file("bad.asc");
  {
    std::ofstream out(p);
    out << "ncols 3\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n"
        << "1 2 3 4\n5 6 7\n";
  }
  CHECK_THROWS_WITH_AS(load_ascii_grid(p), doctest::Contains("row 0"), DataError);
}

TEST_CASE("ascii grid: NODATA cells are rejected") {
  const fs::path p = tmp_file("nodata.asc");
  {
    std::ofstream out(p);
    out << "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value -9999\n"
        << "1 -9999\n3 4\n";
  }
  CHECK_THROWS_AS(load_ascii_grid(p), DataError);
}

TEST_CASE("ascii grid: constant 5.0 grid writes 5.00000000 tokens") {
  RasterGrid g = make_grid(3, 2, 5.0);
  const fs::path p = tmp_file("const.asc");
  save_ascii_grid(g, p);
  std::ifstream in(p);
  std::string line;
  for (int i = 0; i < 5; ++i) std::getline(in, line);  // skip header
  int tokens = 0;
  std::string tok;
  while (in >> tok) {
    CHECK(tok == "5.00000000");
    ++tokens;
  }
  CHECK(tokens == 6);
}

TEST_CASE("ascii grid: unwritable path raises IoError") {
  RasterGrid g = make_grid(2, 2, 1.0);
  CHECK_THROWS_AS(save_ascii_grid(g, ""), IoError);
  CHECK_THROWS_AS(load_ascii_grid("/nonexistent/nope.asc"), IoError);
}

TEST_CASE("normalize: endpoints, midpoint, inverse") {
  RasterGrid g = make_grid(2, 2);
  g.values = {0.0, 200.0, 100.0, 50.0};
  auto [n, p] = normalize(g);
  CHECK(p.h_min == 0.0);
  CHECK(p.h_max == 200.0);
  CHECK(n.values[0] == doctest::Approx(-1.0));
  CHECK(n.values[1] == doctest::Approx(1.0));
  CHECK(n.values[2] == doctest::Approx(0.0));

  RasterGrid g2 = random_grid(13, 9, 7);
  for (double& v : g2.values) v = 321.5 * v + 1200.0;
  auto [n2, p2] = normalize(g2);
  RasterGrid back = denormalize(n2, p2);
  for (size_t i = 0; i < g2.values.size(); ++i)
    CHECK(std::fabs(back.values[i] - g2.values[i]) <= 1e-12 * std::fabs(g2.values[i]));
}

TEST_CASE("normalize: constant grid is a degenerate range") {
  RasterGrid g = make_grid(4, 4, 3.25);
  CHECK_THROWS_AS(normalize(g), DataError);
}

TEST_CASE("blur: constant grid is a fixed point") {
  RasterGrid g = make_grid(20, 17, 2.5);
  RasterGrid b = gaussian_blur(g, 3.0);
  for (double v : b.values) CHECK(v == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("blur: impulse response matches the normalized 2D kernel") {
  // direct kernel evaluation oracle: away from borders, blurring a unit
  // impulse must reproduce k1d(i) * k1d(j)
  const double sigma = 1.7;
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k[i + radius];
  }
  for (double& w : k) w /= sum;

  const int n = 31, mid = 15;
  RasterGrid g = make_grid(n, n, 0.0);
  g.at(mid, mid) = 1.0;
  RasterGrid b = gaussian_blur(g, sigma);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const int dr = r - mid, dc = c - mid;
      double expect = 0.0;
      if (std::abs(dr) <= radius && std::abs(dc) <= radius)
        expect = k[dr + radius] * k[dc + radius];
      CHECK(std::fabs(b.at(r, c) - expect) < 1e-9);
    }
  }
}

TEST_CASE("blur: total variation does not increase") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
    RasterGrid g = random_grid(32, 32, seed);
    RasterGrid b = gaussian_blur(g, 1.5);
    CHECK(total_variation(b) <= total_variation(g) + 1e-12);
  }
}

TEST_CASE("blur: mean preserved for constant-border grids") {
  const double sigma = 2.0;  // radius 6
  RasterGrid g = make_grid(48, 48, 0.75);
  Rng rng(11);
  for (int r = 8; r < 40; ++r)
    for (int c = 8; c < 40; ++c) g.at(r, c) = rng.uniform(-1.0, 1.0);
  RasterGrid b = gaussian_blur(g, sigma);
  CHECK(std::fabs(b.mean_value() - g.mean_value()) < 1e-9);
}

TEST_CASE("pyramid: ceil-halving level sizes") {
  RasterGrid g = random_grid(1000, 1000, 3);
  GaussianPyramid pyr = build_pyramid(g, 4, 4.0);
  REQUIRE(pyr.levels() == 4);
  CHECK(pyr.layers[0].width == 1000);
  CHECK(pyr.layers[1].width == 500);
  CHECK(pyr.layers[2].width == 250);
  CHECK(pyr.layers[3].width == 125);
  // level 0 is bit-identical to the input
  CHECK(pyr.layers[0].values == g.values);
}

TEST_CASE("pyramid: 2 levels on 16x16, constant invariance, level cap") {
  RasterGrid g = make_grid(16, 16, 4.0);
  GaussianPyramid pyr = build_pyramid(g, 2, 1.0);
  CHECK(pyr.layers[1].width == 8);
  CHECK(pyr.layers[1].height == 8);
  for (const RasterGrid& layer : pyr.layers)
    for (double v : layer.values) CHECK(v == doctest::Approx(4.0).epsilon(1e-12));
  CHECK_THROWS_AS(build_pyramid(g, 3, 1.0), DataError);  // coarsest would be 4x4
}

TEST_CASE("synth: rescaled endpoints and determinism") {
  RasterGrid a = synth_terrain(9, 256, 8, {0.0, 200.0});
  CHECK(a.min_value() == doctest::Approx(0.0));
  CHECK(a.max_value() == doctest::Approx(200.0));
  RasterGrid b = synth_terrain(9, 256, 8, {0.0, 200.0});
  CHECK(a.values == b.values);
  RasterGrid c = synth_terrain(10, 256, 8, {0.0, 200.0});
  CHECK(a.values != c.values);
}

TEST_CASE("synth: one positive bump gives exactly one interior discrete maximum") {
  // probe for a seed whose single bump has positive amplitude (global max
  // lands in the interior), then require a unique strict local maximum
  bool found = false;
  for (std::uint64_t seed = 1; seed <= 64 && !found; ++seed) {
    RasterGrid g = synth_terrain(seed, 64, 1, {0.0, 200.0});
    int br = -1, bc = -1;
    double best = -1.0;
    for (int r = 0; r < 64; ++r)
      for (int c = 0; c < 64; ++c)
        if (g.at(r, c) > best) {
          best = g.at(r, c);
          br = r;
          bc = c;
        }
    if (br == 0 || bc == 0 || br == 63 || bc == 63) continue;  // negative bump seed
    found = true;
    int maxima = 0;
    for (int r = 1; r < 63; ++r) {
      for (int c = 1; c < 63; ++c) {
        bool is_max = true;
        for (int dr = -1; dr <= 1 && is_max; ++dr)
          for (int dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            if (g.at(r + dr, c + dc) >= g.at(r, c)) {
              is_max = false;
              break;
            }
          }
        if (is_max) ++maxima;
      }
    }
    CHECK(maxima == 1);
  }
  CHECK(found);
}

TEST_CASE("noise: zero variance is the identity") {
  RasterGrid g = random_grid(16, 16, 5);
  RasterGrid n = add_gaussian_noise(g, 0.0, 123);
  CHECK(n.values == g.values);
}

TEST_CASE("noise: sample variance matches within 5% on a large grid") {
  RasterGrid g = make_grid(1000, 1000, 0.0);
  const double var = 1e-3;
  RasterGrid n = add_gaussian_noise(g, var, 77);
  double mean = n.mean_value();
  double ss = 0.0;
  for (double v : n.values) ss += (v - mean) * (v - mean);
  const double sample_var = ss / (n.values.size() - 1);
  CHECK(sample_var == doctest::Approx(var).epsilon(0.05));
  // determinism
  RasterGrid n2 = add_gaussian_noise(g, var, 77);
  CHECK(n.values == n2.values);
}

TEST_CASE("noise: doubling schedule from 1e-3 reaches 6.4e-2 in 7 levels") {
  std::vector<double> levels;
  for (int k = 0; k < 7; ++k) levels.push_back(1e-3 * std::pow(2.0, k));
  CHECK(levels.size() == 7);
  CHECK(levels.front() == doctest::Approx(1e-3));
  CHECK(levels.back() == doctest::Approx(6.4e-2));
}

TEST_CASE("finite differences: linear ramp and constant") {
  RasterGrid g = make_grid(9, 7);
  for (int r = 0; r < 7; ++r)
    for (int c = 0; c < 9; ++c) g.at(r, c) = static_cast<double>(c);
  auto [gx, gy] = finite_diff_gradient(g);
  for (double v : gx.values) CHECK(v == doctest::Approx(9.0 / 2.0));  // dv/dx_norm = W/2
  for (double v : gy.values) CHECK(v == doctest::Approx(0.0));

  RasterGrid c = make_grid(5, 5, 3.0);
  auto [cx, cy] = finite_diff_gradient(c);
  for (double v : cx.values) CHECK(v == 0.0);
  for (double v : cy.values) CHECK(v == 0.0);
}

TEST_CASE("finite differences: quadratic bowl matches analytic, O(h^2) decay") {
  // central differences are exact on quadratics, so interior error ~ 0
  auto fill_quad = [](RasterGrid& g) {
    for (int r = 0; r < g.height; ++r)
      for (int c = 0; c < g.width; ++c) {
        const double x = g.coord_x(c), y = g.coord_y(r);
        g.at(r, c) = 0.3 * x * x - 0.2 * x * y + 0.5 * y * y + 0.1 * x - 0.7 * y;
      }
  };
  RasterGrid q = make_grid(33, 33);
  fill_quad(q);
  auto [qx, qy] = finite_diff_gradient(q);
  for (int r = 1; r < 32; ++r)
    for (int c = 1; c < 32; ++c) {
      const double x = q.coord_x(c), y = q.coord_y(r);
      CHECK(std::fabs(qx.at(r, c) - (0.6 * x - 0.2 * y + 0.1)) < 1e-10);
      CHECK(std::fabs(qy.at(r, c) - (-0.2 * x + 1.0 * y - 0.7)) < 1e-10);
    }

  // halving h quarters the error on a non-polynomial field
  auto max_interior_err = [](int n) {
    RasterGrid g = make_grid(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        g.at(r, c) = std::sin(2.0 * g.coord_x(c)) * std::cos(g.coord_y(r));
    auto [gx, gy] = finite_diff_gradient(g);
    double err = 0.0;
    for (int r = 1; r < n - 1; ++r)
      for (int c = 1; c < n - 1; ++c) {
        const double x = g.coord_x(c), y = g.coord_y(r);
        err = std::max(err, std::fabs(gx.at(r, c) - 2.0 * std::cos(2.0 * x) * std::cos(y)));
        err = std::max(err, std::fabs(gy.at(r, c) + std::sin(2.0 * x) * std::sin(y)));
      }
    return err;
  };
  const double e1 = max_interior_err(64);
  const double e2 = max_interior_err(128);
  CHECK(e1 / e2 > 3.0);
  CHECK(e1 / e2 < 5.0);
}
