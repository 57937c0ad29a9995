#include "bcpinn/net.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

namespace bcpinn {

DomainBox::DomainBox(double x0, double x1, double t0, double t1)
    : x_min(x0), x_max(x1), t_min(t0), t_max(t1) {
  if (!(x_min < x_max) || !(t_min < t_max))
    throw std::invalid_argument("DomainBox: requires x_min < x_max and t_min < t_max");
}

std::pair<double, double> normalize(double x, double t, const DomainBox& box) {
  return {(x - box.x_min) * box.x_scale(), (t - box.t_min) * box.t_scale()};
}

std::int64_t MlpParameters::parameter_count() const {
  std::int64_t n = 0;
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l)
    n += std::int64_t(layer_dims[l]) * layer_dims[l + 1] + layer_dims[l + 1];
  return n;
}

bool MlpParameters::all_finite() const {
  for (const auto& w : weights)
    if (!w.allFinite()) return false;
  for (const auto& b : biases)
    if (!b.allFinite()) return false;
  return true;
}

Eigen::VectorXd MlpParameters::to_flat() const {
  Eigen::VectorXd theta(parameter_count());
  Eigen::Index pos = 0;
  for (int l = 0; l < layer_count(); ++l) {
    const auto& w = weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) theta[pos++] = w(r, c);
    theta.segment(pos, biases[l].size()) = biases[l];
    pos += biases[l].size();
  }
  return theta;
}

void MlpParameters::set_from_flat(const Eigen::VectorXd& theta) {
  if (theta.size() != parameter_count())
    throw std::invalid_argument("set_from_flat: size mismatch");
  Eigen::Index pos = 0;
  for (int l = 0; l < layer_count(); ++l) {
    auto& w = weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = theta[pos++];
    biases[l] = theta.segment(pos, biases[l].size());
    pos += biases[l].size();
  }
}

namespace {

// Uniform in [0,1) from the full 64-bit state; kept explicit so streams are
// identical across standard library implementations.
inline double unit_uniform(std::mt19937_64& rng) {
  return double(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

MlpParameters xavier_init(const std::vector<int>& layer_dims, std::uint64_t seed) {
  if (layer_dims.size() < 3)
    throw std::invalid_argument("xavier_init: need at least 3 layer dims");
  for (int d : layer_dims)
    if (d <= 0) throw std::invalid_argument("xavier_init: layer dims must be positive");

  MlpParameters p;
  p.layer_dims = layer_dims;
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const int fan_in = layer_dims[l], fan_out = layer_dims[l + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    Eigen::MatrixXd w(fan_out, fan_in);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c)
        w(r, c) = limit * (2.0 * unit_uniform(rng) - 1.0);
    p.weights.push_back(std::move(w));
    p.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return p;
}

Eigen::VectorXd forward(const MlpParameters& params, double x_norm, double t_norm) {
  Eigen::VectorXd a(2);
  a << x_norm, t_norm;
  const int last = params.layer_count() - 1;
  for (int l = 0; l <= last; ++l) {
    Eigen::VectorXd z = params.weights[l] * a + params.biases[l];
    if (l < last)
      a = z.unaryExpr([](double v) { return tanh_eval(v); });
    else
      a = std::move(z);
  }
  return a;
}

namespace {

constexpr char kCheckpointMagic[4] = {'M', 'L', 'P', 'C'};
constexpr std::uint32_t kCheckpointVersion = 1;

void write_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::ifstream& in, const char* what) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw std::runtime_error(std::string("checkpoint: truncated reading ") + what);
  return v;
}

}  // namespace

void write_checkpoint(const MlpParameters& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot open " + path);
  out.write(kCheckpointMagic, 4);
  write_u32(out, kCheckpointVersion);
  write_u32(out, std::uint32_t(params.layer_dims.size()));
  for (int d : params.layer_dims) write_u32(out, std::uint32_t(d));
  for (int l = 0; l < params.layer_count(); ++l) {
    const auto& w = params.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        double v = w(r, c);
        out.write(reinterpret_cast<const char*>(&v), sizeof v);
      }
    out.write(reinterpret_cast<const char*>(params.biases[l].data()),
              std::streamsize(params.biases[l].size() * sizeof(double)));
  }
  if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

MlpParameters read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kCheckpointMagic, 4) != 0)
    throw std::runtime_error("checkpoint: bad magic in " + path);
  const std::uint32_t version = read_u32(in, "version");
  if (version != kCheckpointVersion)
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  const std::uint32_t ndims = read_u32(in, "layer count");
  if (ndims < 3 || ndims > 64) throw std::runtime_error("checkpoint: implausible layer count");
  std::vector<int> dims(ndims);
  for (auto& d : dims) d = int(read_u32(in, "layer dim"));

  MlpParameters p;
  p.layer_dims = dims;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    Eigen::MatrixXd w(dims[l + 1], dims[l]);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        double v;
        in.read(reinterpret_cast<char*>(&v), sizeof v);
        w(r, c) = v;
      }
    Eigen::VectorXd b(dims[l + 1]);
    in.read(reinterpret_cast<char*>(b.data()), std::streamsize(b.size() * sizeof(double)));
    if (!in) throw std::runtime_error("checkpoint: truncated payload in " + path);
    p.weights.push_back(std::move(w));
    p.biases.push_back(std::move(b));
  }
  return p;
}

}  // namespace bcpinn
