#include "terra/siren.hpp"

#include <zlib.h>

#include <cmath>
#include <cstring>
#include <fstream>

#include "terra/error.hpp"
#include "terra/rng.hpp"

namespace terra {

namespace {

constexpr int kBlockCols = 16384;  // bounds scratch memory for large batches

void apply_sincos(const Eigen::MatrixXd& z, double omega, Eigen::MatrixXd& s, Eigen::MatrixXd& c) {
  s.resizeLike(z);
  c.resizeLike(z);
  const double* zp = z.data();
  double* sp = s.data();
  double* cp = c.data();
  const Eigen::Index n = z.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    sp[i] = std::sin(omega * zp[i]);
    cp[i] = std::cos(omega * zp[i]);
  }
}

}  // namespace

std::size_t SirenNetwork::parameter_count() const {
  std::size_t n = 0;
  for (const SirenLayer& l : layers) n += static_cast<std::size_t>(l.weight.size()) + l.bias.size();
  return n;
}

SirenNetwork init_siren(int hidden_layers, int hidden_units, double omega0, std::uint64_t seed) {
  if (hidden_layers < 1 || hidden_units < 1)
    throw DataError("init_siren: hidden_layers and hidden_units must be >= 1");
  Rng rng(seed);
  SirenNetwork net;
  net.omega0 = omega0;

  auto make_layer = [&](int in, int out, double bound, bool sine) {
    SirenLayer l;
    l.weight.resize(out, in);
    l.bias = Eigen::VectorXd::Zero(out);
    l.sine = sine;
    for (int r = 0; r < out; ++r)
      for (int c = 0; c < in; ++c) l.weight(r, c) = rng.uniform(-bound, bound);
    return l;
  };

  net.layers.push_back(make_layer(2, hidden_units, 1.0 / 2.0, true));
  for (int i = 1; i < hidden_layers; ++i)
    net.layers.push_back(
        make_layer(hidden_units, hidden_units, std::sqrt(6.0 / hidden_units) / omega0, true));
  net.layers.push_back(
      make_layer(hidden_units, 1, std::sqrt(6.0 / hidden_units) / omega0, false));
  return net;
}

Eigen::VectorXd forward(const SirenNetwork& net, const Eigen::Matrix2Xd& coords) {
  const Eigen::Index n = coords.cols();
  Eigen::VectorXd out(n);
  Eigen::MatrixXd a, z, s, c;
  for (Eigen::Index start = 0; start < n; start += kBlockCols) {
    const Eigen::Index nb = std::min<Eigen::Index>(kBlockCols, n - start);
    a = coords.middleCols(start, nb);
    for (const SirenLayer& l : net.layers) {
      z.noalias() = l.weight * a;
      z.colwise() += l.bias;
      if (l.sine) {
        apply_sincos(z, net.omega0, s, c);
        a = s;
      } else {
        a = z;
      }
    }
    out.segment(start, nb) = a.row(0).transpose();
  }
  return out;
}

double forward_one(const SirenNetwork& net, double x, double y) {
  Eigen::Matrix2Xd c(2, 1);
  c(0, 0) = x;
  c(1, 0) = y;
  return forward(net, c)(0);
}

void forward_grad(const SirenNetwork& net, double x, double y,
                  double& value, double& gx, double& gy) {
  // propagate [value | d/dx | d/dy] slices through the layers
  Eigen::MatrixXd a(2, 3);
  a << x, 1, 0,
       y, 0, 1;
  Eigen::MatrixXd z;
  const double w0 = net.omega0;
  for (const SirenLayer& l : net.layers) {
    z.noalias() = l.weight * a;
    z.col(0) += l.bias;
    if (l.sine) {
      a.resize(z.rows(), 3);
      for (Eigen::Index r = 0; r < z.rows(); ++r) {
        const double s = std::sin(w0 * z(r, 0));
        const double c = w0 * std::cos(w0 * z(r, 0));
        a(r, 0) = s;
        a(r, 1) = c * z(r, 1);
        a(r, 2) = c * z(r, 2);
      }
    } else {
      a = z;
    }
  }
  value = a(0, 0);
  gx = a(0, 1);
  gy = a(0, 2);
}

namespace {

// slice layout per point: [value, dx, dy, dxx, dxy, dyy]
constexpr int kJetSlices = 6;

void jet_block(const SirenNetwork& net, const Eigen::Matrix2Xd& coords,
               Eigen::Index start, Eigen::Index nb, std::vector<Jet2>& out) {
  const double w0 = net.omega0;
  Eigen::MatrixXd a(2, kJetSlices * nb);
  a.setZero();
  for (Eigen::Index i = 0; i < nb; ++i) {
    a(0, kJetSlices * i + 0) = coords(0, start + i);
    a(1, kJetSlices * i + 0) = coords(1, start + i);
    a(0, kJetSlices * i + 1) = 1.0;  // d/dx of input x
    a(1, kJetSlices * i + 2) = 1.0;  // d/dy of input y
  }
  Eigen::MatrixXd z;
  for (const SirenLayer& l : net.layers) {
    z.noalias() = l.weight * a;
    for (Eigen::Index i = 0; i < nb; ++i) z.col(kJetSlices * i) += l.bias;
    if (l.sine) {
      a.resize(z.rows(), z.cols());
      for (Eigen::Index i = 0; i < nb; ++i) {
        const Eigen::Index o = kJetSlices * i;
        for (Eigen::Index r = 0; r < z.rows(); ++r) {
          const double zv = z(r, o);
          const double s = std::sin(w0 * zv);
          const double c = std::cos(w0 * zv);
          const double g1 = w0 * c;        // first derivative of sin(w0 z)
          const double g2 = -w0 * w0 * s;  // second derivative
          const double zx = z(r, o + 1), zy = z(r, o + 2);
          a(r, o + 0) = s;
          a(r, o + 1) = g1 * zx;
          a(r, o + 2) = g1 * zy;
          a(r, o + 3) = g1 * z(r, o + 3) + g2 * zx * zx;
          a(r, o + 4) = g1 * z(r, o + 4) + g2 * zx * zy;
          a(r, o + 5) = g1 * z(r, o + 5) + g2 * zy * zy;
        }
      }
    } else {
      a = z;
    }
  }
  for (Eigen::Index i = 0; i < nb; ++i) {
    const Eigen::Index o = kJetSlices * i;
    Jet2& j = out[start + i];
    j.value = a(0, o + 0);
    j.gx = a(0, o + 1);
    j.gy = a(0, o + 2);
    j.hxx = a(0, o + 3);
    j.hxy = a(0, o + 4);
    j.hyy = a(0, o + 5);
  }
}

}  // namespace

void forward_jet_batch(const SirenNetwork& net, const Eigen::Matrix2Xd& coords,
                       std::vector<Jet2>& out) {
  const Eigen::Index n = coords.cols();
  out.resize(n);
  const Eigen::Index block = kBlockCols / kJetSlices;
  for (Eigen::Index start = 0; start < n; start += block)
    jet_block(net, coords, start, std::min<Eigen::Index>(block, n - start), out);
}

Jet2 forward_jet(const SirenNetwork& net, double x, double y) {
  Eigen::Matrix2Xd c(2, 1);
  c(0, 0) = x;
  c(1, 0) = y;
  std::vector<Jet2> out;
  forward_jet_batch(net, c, out);
  return out[0];
}

void SirenField::jets(const std::vector<double>& xs, const std::vector<double>& ys,
                      std::vector<Jet2>& out) const {
  Eigen::Matrix2Xd coords(2, xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    coords(0, i) = xs[i];
    coords(1, i) = ys[i];
  }
  forward_jet_batch(*net_, coords, out);
}

namespace {

constexpr char kMagic[4] = {'I', 'T', 'R', 'N'};
constexpr std::uint32_t kVersion = 1;

struct CrcWriter {
  std::ofstream out;
  uLong crc = crc32(0L, Z_NULL, 0);

  void write(const void* p, std::size_t n) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    crc = crc32(crc, static_cast<const Bytef*>(p), static_cast<uInt>(n));
  }
  template <typename T>
  void write_pod(const T& v) {
    write(&v, sizeof v);
  }
};

struct CrcReader {
  std::ifstream in;
  uLong crc = crc32(0L, Z_NULL, 0);

  void read(void* p, std::size_t n, const char* what) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n)
      throw DataError(std::string("weight file truncated while reading ") + what);
    crc = crc32(crc, static_cast<const Bytef*>(p), static_cast<uInt>(n));
  }
  template <typename T>
  T read_pod(const char* what) {
    T v;
    read(&v, sizeof v, what);
    return v;
  }
};

}  // namespace

void save_weights(const SirenNetwork& net, const std::filesystem::path& path) {
  CrcWriter w;
  w.out.open(path, std::ios::binary);
  if (!w.out) throw IoError("cannot write " + path.string());

  w.write(kMagic, 4);
  w.write_pod(kVersion);
  w.write_pod(net.omega0);
  w.write_pod(static_cast<std::uint32_t>(net.layers.size()));
  for (const SirenLayer& l : net.layers) {
    w.write_pod(static_cast<std::uint32_t>(l.weight.cols()));
    w.write_pod(static_cast<std::uint32_t>(l.weight.rows()));
    w.write_pod(static_cast<std::uint8_t>(l.sine ? 1 : 0));
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) w.write_pod(l.weight(r, c));
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) w.write_pod(l.bias(r));
  }
  const std::uint32_t crc = static_cast<std::uint32_t>(w.crc);
  w.out.write(reinterpret_cast<const char*>(&crc), sizeof crc);
  if (!w.out) throw IoError("write failed for " + path.string());
}

SirenNetwork load_weights(const std::filesystem::path& path) {
  CrcReader r;
  r.in.open(path, std::ios::binary);
  if (!r.in) throw IoError("cannot open " + path.string());

  char magic[4];
  r.read(magic, 4, "magic");
  if (std::memcmp(magic, kMagic, 4) != 0) throw DataError("bad magic in weight file");
  const auto version = r.read_pod<std::uint32_t>("version");
  if (version != kVersion)
    throw DataError("unsupported weight file version " + std::to_string(version));

  SirenNetwork net;
  net.omega0 = r.read_pod<double>("omega0");
  const auto n_layers = r.read_pod<std::uint32_t>("layer count");
  if (n_layers == 0 || n_layers > 1024) throw DataError("implausible layer count");
  net.layers.resize(n_layers);
  for (SirenLayer& l : net.layers) {
    const auto in = r.read_pod<std::uint32_t>("in_dim");
    const auto out = r.read_pod<std::uint32_t>("out_dim");
    if (in == 0 || out == 0 || in > (1u << 20) || out > (1u << 20))
      throw DataError("implausible layer dimensions");
    l.sine = r.read_pod<std::uint8_t>("activation tag") != 0;
    l.weight.resize(out, in);
    l.bias.resize(out);
    for (std::uint32_t rr = 0; rr < out; ++rr)
      for (std::uint32_t cc = 0; cc < in; ++cc) l.weight(rr, cc) = r.read_pod<double>("weights");
    for (std::uint32_t rr = 0; rr < out; ++rr) l.bias(rr) = r.read_pod<double>("bias");
  }
  const uLong computed = r.crc;
  std::uint32_t stored;
  r.in.read(reinterpret_cast<char*>(&stored), sizeof stored);
  if (r.in.gcount() != sizeof stored) throw DataError("weight file truncated while reading CRC");
  if (stored != static_cast<std::uint32_t>(computed)) throw DataError("weight file CRC mismatch");

  // structural checks: 2 -> ... -> 1 chain
  if (net.layers.front().weight.cols() != 2) throw DataError("weight file: input dim must be 2");
  if (net.layers.back().weight.rows() != 1) throw DataError("weight file: output dim must be 1");
  for (size_t i = 1; i < net.layers.size(); ++i)
    if (net.layers[i].weight.cols() != net.layers[i - 1].weight.rows())
      throw DataError("weight file: layer dimensions do not chain");
  return net;
}

}  // namespace terra
