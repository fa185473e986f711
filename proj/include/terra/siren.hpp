#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "terra/field.hpp"
#include "terra/jet.hpp"

namespace terra {

// Sinusoidal MLP: hidden layers compute sin(omega0 * (W a + b)), the final
// layer is affine. Weights are stored raw; omega0 scales every sine layer's
// pre-activation at application time.
struct SirenLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
  bool sine = true;
};

struct SirenNetwork {
  std::vector<SirenLayer> layers;
  double omega0 = 30.0;

  int input_dim() const { return static_cast<int>(layers.front().weight.cols()); }
  int output_dim() const { return static_cast<int>(layers.back().weight.rows()); }
  std::size_t parameter_count() const;
};

// First layer uniform in [-1/in_dim, 1/in_dim]; later layers uniform in
// [-sqrt(6/fan_in)/omega0, sqrt(6/fan_in)/omega0]; biases zero. Deterministic
// per seed.
SirenNetwork init_siren(int hidden_layers, int hidden_units, double omega0, std::uint64_t seed);

// Batch evaluation at arbitrary coordinates (columns of `coords`).
Eigen::VectorXd forward(const SirenNetwork& net, const Eigen::Matrix2Xd& coords);
double forward_one(const SirenNetwork& net, double x, double y);

// Value plus exact analytic input gradient, propagated layerwise.
void forward_grad(const SirenNetwork& net, double x, double y,
                  double& value, double& gx, double& gy);

// Value, gradient and Hessian with respect to the input coordinates.
Jet2 forward_jet(const SirenNetwork& net, double x, double y);
void forward_jet_batch(const SirenNetwork& net, const Eigen::Matrix2Xd& coords,
                       std::vector<Jet2>& out);

// Little-endian weight file: magic "ITRN", version u32, omega0 f64, layer
// count u32, then per layer in/out dims, activation tag, row-major weights
// and bias, with a trailing CRC32 of all preceding bytes.
void save_weights(const SirenNetwork& net, const std::filesystem::path& path);
SirenNetwork load_weights(const std::filesystem::path& path);

// FieldOracle adapter over a trained network.
class SirenField : public FieldOracle {
public:
  explicit SirenField(const SirenNetwork& net) : net_(&net) {}
  Jet2 jet(double x, double y) const override { return forward_jet(*net_, x, y); }
  void jets(const std::vector<double>& xs, const std::vector<double>& ys,
            std::vector<Jet2>& out) const override;
  void grad(double x, double y, double& value, double& gx, double& gy) const override {
    forward_grad(*net_, x, y, value, gx, gy);
  }

private:
  const SirenNetwork* net_;
};

}  // namespace terra
