#pragma once

#include <Eigen/Dense>

namespace bcpinn {

/// ||pred - ref||_2 / ||ref||_2 over all grid points (RMS ratio). Throws on
/// incongruent grids or a zero reference norm.
double relative_total_error(const Eigen::MatrixXd& predicted,
                            const Eigen::MatrixXd& reference);

/// Pointwise eps(x,t) = |pred - ref| / sqrt(sum ref^2), the error-map field.
Eigen::MatrixXd relative_error_field(const Eigen::MatrixXd& predicted,
                                     const Eigen::MatrixXd& reference);

/// Relative L2 error per snapshot row.
Eigen::VectorXd per_snapshot_errors(const Eigen::MatrixXd& predicted,
                                    const Eigen::MatrixXd& reference);

struct ErrorReport {
  double epsilon_total = 0.0;
  Eigen::MatrixXd epsilon_field;
  Eigen::VectorXd per_snapshot;
};

ErrorReport error_report(const Eigen::MatrixXd& predicted,
                         const Eigen::MatrixXd& reference);

}  // namespace bcpinn
