#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace bcpinn {

/// Rectangular space-time domain; min-max normalization maps it onto [0,1]^2.
struct DomainBox {
  double x_min = -1.0;
  double x_max = 1.0;
  double t_min = 0.0;
  double t_max = 1.0;

  DomainBox() = default;
  DomainBox(double x0, double x1, double t0, double t1);

  /// d(normalized)/d(physical), the chain-rule factor per spatial order.
  double x_scale() const { return 1.0 / (x_max - x_min); }
  double t_scale() const { return 1.0 / (t_max - t_min); }
};

/// Affine map of a physical point onto the unit square. Points outside the
/// box are mapped without clamping.
std::pair<double, double> normalize(double x, double t, const DomainBox& box);

/// Dense tanh network parameters. weights[l] has shape dims[l+1] x dims[l];
/// hidden layers are affine-tanh, the output layer stays affine.
struct MlpParameters {
  std::vector<int> layer_dims;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  int input_width() const { return layer_dims.front(); }
  int output_width() const { return layer_dims.back(); }
  int layer_count() const { return static_cast<int>(weights.size()); }
  std::int64_t parameter_count() const;
  bool all_finite() const;

  /// Canonical flattening: W0 row-major, b0, W1, b1, ... Gradient vectors
  /// and checkpoints follow this order.
  Eigen::VectorXd to_flat() const;
  void set_from_flat(const Eigen::VectorXd& theta);
};

/// Glorot-uniform weights (variance 2/(fan_in+fan_out)), zero biases.
/// Identical (layer_dims, seed) yield bit-identical parameters.
MlpParameters xavier_init(const std::vector<int>& layer_dims, std::uint64_t seed);

/// Forward pass at an already-normalized input point.
Eigen::VectorXd forward(const MlpParameters& params, double x_norm, double t_norm);

/// Flat binary checkpoint: magic "MLPC", version, layer_dims, then row-major
/// weight matrices and bias vectors in layer order, little-endian f64.
void write_checkpoint(const MlpParameters& params, const std::string& path);
MlpParameters read_checkpoint(const std::string& path);

/// tanh through exp, so the scalar and the vectorized evaluation paths share
/// one definition. Absolute error vs std::tanh is a few ulp.
inline double tanh_eval(double x) { return 1.0 - 2.0 / (std::exp(2.0 * x) + 1.0); }

}  // namespace bcpinn
