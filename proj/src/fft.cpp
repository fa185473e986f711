#include "terra/fft.hpp"

#include <cmath>

#include "terra/error.hpp"

namespace terra {

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft_1d(std::vector<std::complex<double>>& a, bool inverse) {
  const size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) throw DataError("fft_1d: length must be a power of two");

  // bit-reversal permutation
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * 3.14159265358979323846 / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& x : a) x *= inv;
  }
}

Spectrum fft2(const RasterGrid& grid) {
  Spectrum s;
  s.width = next_pow2(grid.width);
  s.height = next_pow2(grid.height);
  s.bins.assign(static_cast<size_t>(s.width) * s.height, {0.0, 0.0});
  for (int r = 0; r < grid.height; ++r)
    for (int c = 0; c < grid.width; ++c) s.at(r, c) = {grid.at(r, c), 0.0};

  std::vector<std::complex<double>> scratch;
  // rows
  scratch.resize(s.width);
  for (int r = 0; r < s.height; ++r) {
    for (int c = 0; c < s.width; ++c) scratch[c] = s.at(r, c);
    fft_1d(scratch, false);
    for (int c = 0; c < s.width; ++c) s.at(r, c) = scratch[c];
  }
  // columns
  scratch.resize(s.height);
  for (int c = 0; c < s.width; ++c) {
    for (int r = 0; r < s.height; ++r) scratch[r] = s.at(r, c);
    fft_1d(scratch, false);
    for (int r = 0; r < s.height; ++r) s.at(r, c) = scratch[r];
  }
  return s;
}

std::vector<double> ifft2(const Spectrum& spectrum) {
  Spectrum s = spectrum;
  std::vector<std::complex<double>> scratch;
  scratch.resize(s.height);
  for (int c = 0; c < s.width; ++c) {
    for (int r = 0; r < s.height; ++r) scratch[r] = s.at(r, c);
    fft_1d(scratch, true);
    for (int r = 0; r < s.height; ++r) s.at(r, c) = scratch[r];
  }
  scratch.resize(s.width);
  std::vector<double> out(static_cast<size_t>(s.width) * s.height);
  for (int r = 0; r < s.height; ++r) {
    for (int c = 0; c < s.width; ++c) scratch[c] = s.at(r, c);
    fft_1d(scratch, true);
    for (int c = 0; c < s.width; ++c) out[static_cast<size_t>(r) * s.width + c] = scratch[c].real();
  }
  return out;
}

}  // namespace terra
