#include "bcpinn/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace bcpinn {

namespace {
void require_congruent(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("metrics: predicted and reference grids are incongruent");
  if (a.size() == 0) throw std::invalid_argument("metrics: empty grids");
}
}  // namespace

double relative_total_error(const Eigen::MatrixXd& predicted,
                            const Eigen::MatrixXd& reference) {
  require_congruent(predicted, reference);
  const double ref_norm = reference.norm();
  if (ref_norm == 0.0) throw std::invalid_argument("metrics: zero reference norm");
  return (predicted - reference).norm() / ref_norm;
}

Eigen::MatrixXd relative_error_field(const Eigen::MatrixXd& predicted,
                                     const Eigen::MatrixXd& reference) {
  require_congruent(predicted, reference);
  const double ref_norm = reference.norm();
  if (ref_norm == 0.0) throw std::invalid_argument("metrics: zero reference norm");
  return (predicted - reference).cwiseAbs() / ref_norm;
}

Eigen::VectorXd per_snapshot_errors(const Eigen::MatrixXd& predicted,
                                    const Eigen::MatrixXd& reference) {
  require_congruent(predicted, reference);
  Eigen::VectorXd errors(reference.rows());
  for (Eigen::Index r = 0; r < reference.rows(); ++r) {
    const double ref_norm = reference.row(r).norm();
    const double diff_norm = (predicted.row(r) - reference.row(r)).norm();
    errors[r] = ref_norm > 0.0 ? diff_norm / ref_norm
                               : (diff_norm == 0.0 ? 0.0 : INFINITY);
  }
  return errors;
}

ErrorReport error_report(const Eigen::MatrixXd& predicted,
                         const Eigen::MatrixXd& reference) {
  ErrorReport report;
  report.epsilon_total = relative_total_error(predicted, reference);
  report.epsilon_field = relative_error_field(predicted, reference);
  report.per_snapshot = per_snapshot_errors(predicted, reference);
  return report;
}

}  // namespace bcpinn
