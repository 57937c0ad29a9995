#pragma once

#include <Eigen/Dense>

#include "bcpinn/autodiff.hpp"
#include "bcpinn/pde.hpp"
#include "bcpinn/sampling.hpp"

namespace bcpinn {

struct LossOptions {
  bool log_residual = false;  // ln(1 + R^2) on the residual term only
};

/// Mean of squared prediction-target mismatch over the initial points; for
/// two-field problems the h and mu sums share the single 1/N_i factor.
double mse_initial(const MlpParameters& params, const DomainBox& box,
                   const Eigen::VectorXd& x, const Eigen::MatrixXd& targets,
                   Eigen::VectorXd* grad = nullptr);

/// Periodicity mismatch summed over derivative orders 0..n_d-1 between
/// x_max and x_min, averaged over time instants; applied to every output
/// field.
double mse_boundary(const MlpParameters& params, const DomainBox& box,
                    const Eigen::VectorXd& t_points, int boundary_order,
                    int output_fields, Eigen::VectorXd* grad = nullptr);

/// Sum of squared boundary mismatches of one +/- jet pair over orders
/// 1..n_d (derivative orders 0..n_d-1). Shared by mse_boundary and tests.
double boundary_pair_mismatch(const Jet& plus, const Jet& minus, int boundary_order);

/// Mean squared PDE residual over collocation points (both residual
/// components for the phase-space system). The log variant applies
/// ln(1 + R^2) per residual component.
double mse_residual(const MlpParameters& params, const DomainBox& box,
                    const PdeProblem& problem, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& t, bool log_residual = false,
                    Eigen::VectorXd* grad = nullptr);

/// Mean squared departure of the h field from stored earlier-segment
/// predictions. Empty point set evaluates to 0.
double mse_compat(const MlpParameters& params, const DomainBox& box,
                  const Eigen::VectorXd& x, const Eigen::VectorXd& t,
                  const Eigen::VectorXd& stored_h, Eigen::VectorXd* grad = nullptr);

/// All components over one segment's point sets.
LossBreakdown total_loss(const MlpParameters& params, const DomainBox& box,
                         const PdeProblem& problem, const PointSets& sets,
                         const Eigen::VectorXd& compat_targets, const LossOptions& opts,
                         Eigen::VectorXd* grad = nullptr);

/// The optimizer-facing objective of one segment: owns its point sets and
/// compat targets, evaluates components and exact gradients in a fixed
/// point order (bit-reproducible).
class SegmentObjective {
 public:
  SegmentObjective(const PdeProblem& problem, const DomainBox& box,
                   std::vector<int> layer_dims, PointSets sets,
                   Eigen::VectorXd compat_targets, LossOptions opts);

  LossBreakdown evaluate(const Eigen::VectorXd& theta, Eigen::VectorXd* grad) const;
  LossObjective as_objective() const;

  const PointSets& sets() const { return sets_; }

 private:
  PdeProblem problem_;
  DomainBox box_;
  std::vector<int> layer_dims_;
  PointSets sets_;
  Eigen::VectorXd compat_targets_;
  LossOptions opts_;
  mutable MlpParameters scratch_;
};

}  // namespace bcpinn
