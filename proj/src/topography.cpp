#include "terra/topography.hpp"

#include <cmath>

#include "terra/error.hpp"

namespace terra {

namespace {

constexpr double kTwoPi = 6.28318530717958647692528676655900577;

void batch_jets(const FieldOracle& field, const RasterGrid& georef, std::vector<Jet2>& jets) {
  std::vector<double> xs(georef.size()), ys(georef.size());
  size_t i = 0;
  for (int r = 0; r < georef.height; ++r)
    for (int c = 0; c < georef.width; ++c, ++i) {
      xs[i] = georef.coord_x(c);
      ys[i] = georef.coord_y(r);
    }
  field.jets(xs, ys, jets);
}

}  // namespace

WorldDerivs to_world_derivs(const Jet2& jet, const RasterGrid& georef,
                            const NormalizeParams& norm) {
  const double sx = 2.0 / (georef.width * georef.cell_size);
  const double sy = 2.0 / (georef.height * georef.cell_size);
  const double dh = 0.5 * (norm.h_max - norm.h_min);
  WorldDerivs w;
  w.fx = jet.gx * dh * sx;
  w.fy = jet.gy * dh * sy;
  w.fxx = jet.hxx * dh * sx * sx;
  w.fxy = jet.hxy * dh * sx * sy;
  w.fyy = jet.hyy * dh * sy * sy;
  return w;
}

NormalMap normal_map(const FieldOracle& field, const RasterGrid& georef,
                     const NormalizeParams& norm) {
  std::vector<Jet2> jets;
  batch_jets(field, georef, jets);
  NormalMap nm;
  nm.width = georef.width;
  nm.height = georef.height;
  nm.normals.resize(jets.size());
  for (size_t i = 0; i < jets.size(); ++i) {
    const WorldDerivs w = to_world_derivs(jets[i], georef, norm);
    const double len = std::sqrt(w.fx * w.fx + w.fy * w.fy + 1.0);
    nm.normals[i] = {-w.fx / len, -w.fy / len, 1.0 / len};
  }
  return nm;
}

RasterGrid slope(const FieldOracle& field, const RasterGrid& georef,
                 const NormalizeParams& norm) {
  std::vector<Jet2> jets;
  batch_jets(field, georef, jets);
  RasterGrid out = georef;
  for (size_t i = 0; i < jets.size(); ++i) {
    const WorldDerivs w = to_world_derivs(jets[i], georef, norm);
    out.values[i] = std::atan(std::hypot(w.fx, w.fy));
  }
  return out;
}

RasterGrid aspect(const FieldOracle& field, const RasterGrid& georef,
                  const NormalizeParams& norm) {
  std::vector<Jet2> jets;
  batch_jets(field, georef, jets);
  RasterGrid out = georef;
  for (size_t i = 0; i < jets.size(); ++i) {
    const WorldDerivs w = to_world_derivs(jets[i], georef, norm);
    if (std::hypot(w.fx, w.fy) < 1e-9) {
      out.values[i] = -1.0;  // undefined on flat ground
      continue;
    }
    // downslope direction, clockwise from north
    double a = std::atan2(-w.fx, -w.fy);
    if (a < 0.0) a += kTwoPi;
    out.values[i] = a;
  }
  return out;
}

RasterGrid mean_curvature(const FieldOracle& field, const RasterGrid& georef,
                          const NormalizeParams& norm) {
  std::vector<Jet2> jets;
  batch_jets(field, georef, jets);
  RasterGrid out = georef;
  for (size_t i = 0; i < jets.size(); ++i) {
    const WorldDerivs w = to_world_derivs(jets[i], georef, norm);
    const double g2 = w.fx * w.fx + w.fy * w.fy;
    out.values[i] = ((1.0 + w.fy * w.fy) * w.fxx - 2.0 * w.fx * w.fy * w.fxy +
                     (1.0 + w.fx * w.fx) * w.fyy) /
                    (2.0 * std::pow(1.0 + g2, 1.5));
  }
  return out;
}

std::vector<std::uint8_t> hillshade(const NormalMap& normals, double azimuth_rad,
                                    double altitude_rad) {
  const double lx = std::sin(azimuth_rad) * std::cos(altitude_rad);
  const double ly = std::cos(azimuth_rad) * std::cos(altitude_rad);
  const double lz = std::sin(altitude_rad);
  std::vector<std::uint8_t> out(normals.normals.size());
  for (size_t i = 0; i < out.size(); ++i) {
    const auto& n = normals.normals[i];
    const double d = std::clamp(n[0] * lx + n[1] * ly + n[2] * lz, 0.0, 1.0);
    out[i] = static_cast<std::uint8_t>(std::lround(255.0 * d));
  }
  return out;
}

}  // namespace terra
