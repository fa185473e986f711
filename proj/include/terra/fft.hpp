#pragma once

#include <complex>
#include <vector>

#include "terra/raster.hpp"

namespace terra {

// Dense complex spectrum, row-major height x width, sizes are powers of two.
struct Spectrum {
  int width = 0;
  int height = 0;
  std::vector<std::complex<double>> bins;

  std::complex<double>& at(int row, int col) {
    return bins[static_cast<size_t>(row) * width + col];
  }
  const std::complex<double>& at(int row, int col) const {
    return bins[static_cast<size_t>(row) * width + col];
  }
};

// In-place iterative radix-2 transform of one complex vector; n must be a
// power of two. inverse applies the conjugate transform and divides by n.
void fft_1d(std::vector<std::complex<double>>& a, bool inverse);

// Unnormalized 2D forward transform; the grid is zero-padded up to the next
// power of two per axis.
Spectrum fft2(const RasterGrid& grid);

// Inverse of fft2 (1/N scaling applied); returns the padded-size real part.
std::vector<double> ifft2(const Spectrum& spectrum);

int next_pow2(int n);

}  // namespace terra
