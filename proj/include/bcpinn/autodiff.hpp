#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bcpinn/net.hpp"

namespace bcpinn {

inline constexpr int kMaxSpatialOrder = 4;

/// Network output at one physical point together with its input derivatives:
/// dx[j-1] = d^j h / dx^j for j = 1..order, dt = dh/dt. Derivatives are in
/// physical (unnormalized) coordinates.
struct Jet {
  double value = 0.0;
  int order = 0;
  bool has_dt = false;
  std::array<double, kMaxSpatialOrder> dx{};
  double dt = 0.0;

  /// Spatial derivative of the given order (1-based).
  double dx_order(int j) const;
};

/// Cotangent of a Jet, same slot layout.
struct JetAdjoint {
  double value = 0.0;
  std::array<double, kMaxSpatialOrder> dx{};
  double dt = 0.0;
};

/// Flat gradient aligned with MlpParameters::to_flat().
using GradientVector = Eigen::VectorXd;

/// Thrown when a loss or residual evaluates to a non-finite value; carries
/// the offending component and point where known.
class NonFiniteLossError : public std::runtime_error {
 public:
  NonFiniteLossError(std::string component, double x, double t);
  explicit NonFiniteLossError(std::string component);
  const std::string& component() const { return component_; }
  double x() const { return x_; }
  double t() const { return t_; }

 private:
  std::string component_;
  double x_ = 0.0, t_ = 0.0;
};

/// Per-layer gradient accumulator matching an MlpParameters shape.
struct GradAccumulator {
  std::vector<Eigen::MatrixXd> w_bar;
  std::vector<Eigen::VectorXd> b_bar;

  explicit GradAccumulator(const MlpParameters& params);
  void reset();
  void add_to_flat(Eigen::VectorXd& grad) const;
};

/// Evaluates an MLP over batches of physical points, propagating truncated
/// Taylor coefficients in x (orders 0..k) with an optional first-order t
/// component, then back-propagates output cotangents into parameter space.
/// The reverse pass runs over the stored jet-augmented activations of the
/// current batch; buffers are rebuilt on every forward call.
class JetBatchEvaluator {
 public:
  JetBatchEvaluator(const MlpParameters& params, const DomainBox& box);

  /// Evaluates `count` points (physical coordinates). spatial_order in 0..4.
  void forward(const double* xs, const double* ts, int count, int spatial_order,
               bool with_dt);

  int count() const { return count_; }
  int output_width() const { return params_.output_width(); }

  /// Assembles the physical-coordinate jet of one output at one point.
  Jet output_jet(int point, int output_index) const;

  /// Adds a cotangent on one point's output jet. Call after forward(),
  /// before backward(). Slots beyond the evaluated order are ignored.
  void add_output_adjoint(int point, int output_index, const JetAdjoint& bar);

  /// Runs the reverse pass for the current batch, accumulating into `grad`,
  /// then clears the pending output cotangents.
  void backward(GradAccumulator& grad);

 private:
  template <int K, bool DT>
  void forward_impl(const double* xs, const double* ts, int count);
  template <int K, bool DT>
  void backward_impl(GradAccumulator& grad);

  const MlpParameters& params_;
  DomainBox box_;
  int count_ = 0;
  int order_ = 0;
  bool with_dt_ = false;
  int channels_ = 1;
  Eigen::MatrixXd input_;                 // 2 x (C*count)
  std::vector<Eigen::MatrixXd> pre_;      // per hidden layer, width x (C*count)
  std::vector<Eigen::MatrixXd> act_;      // per hidden layer, width x (C*count)
  Eigen::MatrixXd out_;                   // out_width x (C*count)
  Eigen::MatrixXd out_bar_;               // cotangent of out_
  std::vector<Eigen::MatrixXd> scratch_;  // reverse-pass buffers
};

/// Jets of every network output at one physical point; exact derivatives of
/// the tanh MLP (no numerical differencing). spatial_order above 4 is
/// rejected.
std::vector<Jet> eval_jet(const MlpParameters& params, const DomainBox& box, double x,
                          double t, int spatial_order, bool with_dt);

/// Shared block size of every batched evaluation. Snapshots and the compat
/// loss must see identical GEMM shapes so stored targets reproduce bitwise.
inline constexpr int kBatchBlockPoints = 2048;

/// Output values over a flat point list (n x output_width), evaluated through
/// the same blocked path the losses use.
Eigen::MatrixXd batch_values(const MlpParameters& params, const DomainBox& box,
                             const double* xs, const double* ts, Eigen::Index n);

/// Loss components of one objective evaluation. total is their plain sum;
/// mse_s stays zero for segment 1 and for standard training.
struct LossBreakdown {
  double mse_i = 0.0;
  double mse_b = 0.0;
  double mse_r = 0.0;
  double mse_s = 0.0;
  double total() const { return mse_i + mse_b + mse_r + mse_s; }
  bool finite() const;
};

/// Deterministic scalar objective over flat parameters with optional exact
/// gradient output. The optimizer-facing contract.
using LossObjective =
    std::function<LossBreakdown(const Eigen::VectorXd& theta, Eigen::VectorXd* grad)>;

/// Evaluates an objective with its exact reverse-mode gradient.
std::pair<double, GradientVector> loss_gradient(const LossObjective& objective,
                                                const Eigen::VectorXd& theta);

}  // namespace bcpinn
