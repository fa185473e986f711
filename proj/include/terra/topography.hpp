#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "terra/field.hpp"
#include "terra/raster.hpp"

namespace terra {

// First and second derivatives converted from normalized units to world
// metres: d(norm x)/d(world x) = 2/extent, d(world h)/d(norm value) =
// (h_max - h_min)/2, composed by the chain rule.
struct WorldDerivs {
  double fx = 0.0, fy = 0.0;          // m height per m ground
  double fxx = 0.0, fxy = 0.0, fyy = 0.0;  // 1/m
};

WorldDerivs to_world_derivs(const Jet2& jet, const RasterGrid& georef,
                            const NormalizeParams& norm);

struct NormalMap {
  int width = 0, height = 0;
  std::vector<std::array<double, 3>> normals;  // unit, z up
};

// Attributes are sampled from the field at the pixel centres of the
// reference grid; spatial metadata is copied from it.
NormalMap normal_map(const FieldOracle& field, const RasterGrid& georef,
                     const NormalizeParams& norm);
RasterGrid slope(const FieldOracle& field, const RasterGrid& georef,
                 const NormalizeParams& norm);       // radians in [0, pi/2)
RasterGrid aspect(const FieldOracle& field, const RasterGrid& georef,
                  const NormalizeParams& norm);      // radians [0, 2pi) cw from north, -1 where flat
RasterGrid mean_curvature(const FieldOracle& field, const RasterGrid& georef,
                          const NormalizeParams& norm);  // 1/m

constexpr double kDefaultAzimuthRad = 5.497787143782138;   // 315 degrees
constexpr double kDefaultAltitudeRad = 0.7853981633974483; // 45 degrees

// Lambertian shade, 8-bit grayscale.
std::vector<std::uint8_t> hillshade(const NormalMap& normals,
                                    double azimuth_rad = kDefaultAzimuthRad,
                                    double altitude_rad = kDefaultAltitudeRad);

}  // namespace terra
