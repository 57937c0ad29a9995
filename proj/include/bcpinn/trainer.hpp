#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "bcpinn/loss.hpp"
#include "bcpinn/optim.hpp"

namespace bcpinn {

/// Network predictions stored on the fixed spatial grid over all completed
/// segments; the backward-compatibility target. Rows are snapshots in time
/// order, a prefix of the global snapshot grid.
struct SolutionGrid {
  Eigen::VectorXd x;
  std::vector<double> t;
  Eigen::MatrixXd h;   // (#t) x (#x)
  Eigen::MatrixXd mu;  // same shape for two-field problems, else empty
  int fields = 1;

  bool empty() const { return t.empty(); }
  double t_max() const { return t.empty() ? 0.0 : t.back(); }
};

/// Evaluates the network on grid.x at the given times and appends the rows.
/// Times already present are rejected.
void snapshot_solution(const MlpParameters& params, const DomainBox& box,
                       const std::vector<double>& times, SolutionGrid& grid);

/// Dense prediction of the h field (column 0) or any field on x times t.
Eigen::MatrixXd predict_grid(const MlpParameters& params, const DomainBox& box,
                             const Eigen::VectorXd& x, const Eigen::VectorXd& t,
                             int field = 0);

struct TrainOptions {
  std::vector<int> hidden_layers = {64, 64, 64};
  std::uint64_t seed = 1;
  AdamConfig adam;
  LbfgsConfig lbfgs;
  bool log_residual = false;
  bool reset_adam_per_segment = true;
  int log_stride = 1;
};

struct IterationRecord {
  int segment = 0;
  char phase = 'a';  // 'a' adam, 'l' lbfgs
  int iteration = 0;
  LossBreakdown loss;
};

struct SegmentRecord {
  int index = 0;
  double t_begin = 0.0, t_end = 0.0;
  int adam_iterations = 0;
  int lbfgs_iterations = 0;
  int lbfgs_function_evals = 0;
  LbfgsStop lbfgs_reason = LbfgsStop::MaxIterations;
  std::string lbfgs_detail;
  LossBreakdown final_loss;
  double adam_seconds = 0.0, lbfgs_seconds = 0.0;
  bool aborted = false;
  std::string diagnostic;
};

struct TrainedRun {
  MlpParameters params;
  SolutionGrid grid;
  std::vector<SegmentRecord> segments;
  std::vector<IterationRecord> iteration_log;
  bool completed = true;
  std::uint64_t seed = 0;
};

/// Sequential backward-compatible training: one network retrained over
/// successive segments, each loss pinning the stored predictions of all
/// earlier snapshots; parameters carry over between segments (no
/// reinitialization). A segment that fails to reach a finite loss aborts
/// the run with the completed prefix.
TrainedRun train_bc_pinn(const PdeProblem& problem, const DomainBox& box,
                         const SegmentSchedule& schedule, const TrainOptions& options);

/// Single-segment baseline over the whole domain (no compat term).
TrainedRun train_standard_pinn(const PdeProblem& problem, const DomainBox& box,
                               const SegmentSchedule& schedule,
                               const TrainOptions& options);

/// Solution-grid sidecar: magic "BCSG", version, nx, nt, fields, x, t, h
/// (t-major), then mu when present; little-endian f64.
void write_solution_grid(const SolutionGrid& grid, const std::string& path);
SolutionGrid read_solution_grid(const std::string& path);

void write_loss_log_csv(const std::vector<IterationRecord>& log, const std::string& path);

}  // namespace bcpinn
