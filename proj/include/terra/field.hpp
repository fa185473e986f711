#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "terra/jet.hpp"
#include "terra/raster.hpp"

namespace terra {

// A twice-differentiable scalar field over [-1,1]^2 queried through its
// second-order jet. Implemented by the trained surface network and by
// closed-form test fields.
class FieldOracle {
public:
  virtual ~FieldOracle() = default;

  virtual Jet2 jet(double x, double y) const = 0;

  // batched evaluation; the default loops, network-backed oracles override
  virtual void jets(const std::vector<double>& xs, const std::vector<double>& ys,
                    std::vector<Jet2>& out) const {
    out.resize(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) out[i] = jet(xs[i], ys[i]);
  }

  // value + gradient only (separatrix tracing hot path)
  virtual void grad(double x, double y, double& value, double& gx, double& gy) const {
    const Jet2 j = jet(x, y);
    value = j.value;
    gx = j.gx;
    gy = j.gy;
  }

  double value(double x, double y) const {
    double v, gx, gy;
    grad(x, y, v, gx, gy);
    return v;
  }
};

// Closed-form field defined by a jet-valued callable.
class FunctionField : public FieldOracle {
public:
  explicit FunctionField(std::function<Jet2(double, double)> f) : f_(std::move(f)) {}
  Jet2 jet(double x, double y) const override { return f_(x, y); }

private:
  std::function<Jet2(double, double)> f_;
};

// One rotated anisotropic Gaussian bump, parameterized by the inverse
// covariance quadratic form q = qa*dx^2 + 2*qb*dx*dy + qc*dy^2.
struct GaussianBump {
  double cx = 0.0, cy = 0.0;
  double amp = 1.0;
  double qa = 1.0, qb = 0.0, qc = 1.0;
};

// Sum of Gaussian bumps followed by an affine value map. Jets are exact, so
// this field doubles as the analytic ground truth for the synthetic terrain.
class GaussianBumpField : public FieldOracle {
public:
  GaussianBumpField() = default;
  explicit GaussianBumpField(std::vector<GaussianBump> bumps)
      : bumps_(std::move(bumps)) {}

  Jet2 jet(double x, double y) const override;

  void set_affine(double scale, double offset) {
    scale_ = scale;
    offset_ = offset;
  }
  const std::vector<GaussianBump>& bumps() const { return bumps_; }

private:
  std::vector<GaussianBump> bumps_;
  double scale_ = 1.0;
  double offset_ = 0.0;
};

// The seeded bump set behind synth_terrain, in normalized [-1,1]^2
// coordinates with raw (pre-rescale) values.
GaussianBumpField synth_bump_field(std::uint64_t seed, int n_bumps,
                                   double axis_min_frac, double axis_max_frac);

}  // namespace terra
