#pragma once

#include <cmath>
#include <utility>

namespace terra {

// Second-order jet of a scalar field at one point: value, gradient and the
// symmetric 2x2 Hessian (single stored mixed term, so symmetry holds by
// construction).
struct Jet2 {
  double value = 0.0;
  double gx = 0.0, gy = 0.0;
  double hxx = 0.0, hxy = 0.0, hyy = 0.0;

  double grad_norm() const { return std::hypot(gx, gy); }

  // eigenvalues of [[hxx, hxy], [hxy, hyy]], ascending
  std::pair<double, double> hessian_eigenvalues() const {
    const double tr = hxx + hyy;
    const double det_disc = std::sqrt((hxx - hyy) * (hxx - hyy) + 4.0 * hxy * hxy);
    return {0.5 * (tr - det_disc), 0.5 * (tr + det_disc)};
  }

  // unit eigenvector for the given eigenvalue of the Hessian
  std::pair<double, double> hessian_eigenvector(double lambda) const {
    // v is orthogonal to both rows of (H - lambda I); use the larger row
    const double r1 = std::hypot(hxx - lambda, hxy);
    const double r2 = std::hypot(hxy, hyy - lambda);
    double vx, vy;
    if (r1 >= r2) {
      vx = -hxy;
      vy = hxx - lambda;
    } else {
      vx = hyy - lambda;
      vy = -hxy;
    }
    double n = std::hypot(vx, vy);
    if (n == 0.0) return {1.0, 0.0};  // isotropic Hessian, any direction works
    return {vx / n, vy / n};
  }

  bool finite() const {
    return std::isfinite(value) && std::isfinite(gx) && std::isfinite(gy) &&
           std::isfinite(hxx) && std::isfinite(hxy) && std::isfinite(hyy);
  }
};

}  // namespace terra
