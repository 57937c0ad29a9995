#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bcpinn/pde.hpp"

namespace bcpinn {

/// Uniform partition of [0, t_final] into segments, with per-segment sampling
/// and iteration budgets. Snapshot times form a global grid of spacing
/// snapshot_dt; each segment spans steps_per_segment of them.
struct SegmentSchedule {
  double t_final = 1.0;
  int segments = 5;
  int steps_per_segment = 40;
  double snapshot_dt = 0.005;
  int n_initial = 512;
  int n_boundary = 40;
  int n_collocation = 20000;
  int adam_iterations = 10000;
  int lbfgs_iterations = 2000;

  int total_snapshots() const { return segments * steps_per_segment + 1; }
  double snapshot_time(int i) const { return i * snapshot_dt; }
  double segment_begin(int n) const { return snapshot_time((n - 1) * steps_per_segment); }
  double segment_end(int n) const { return snapshot_time(n * steps_per_segment); }

  /// Times snapshotted after segment n: (T_{n-1}, T_n], plus t=0 for n=1.
  std::vector<double> segment_snapshot_times(int n) const;
  /// Times of the stored solution a segment-n loss pins to: [0, T_{n-1}].
  std::vector<double> compat_snapshot_times(int n) const;

  void validate() const;
};

/// Point sets of one training segment. Boundary points live at x = x_max with
/// the mirror at x = x_min implied; compat targets are attached later from
/// the stored solution grid.
struct PointSets {
  Eigen::VectorXd initial_x;        // N_i points at t = 0
  Eigen::MatrixXd initial_targets;  // N_i x output_width
  Eigen::VectorXd boundary_t;       // N_b time instants
  Eigen::VectorXd colloc_x, colloc_t;
  Eigen::VectorXd compat_x, compat_t;  // empty for segment 1
};

/// Stratified sample: n points, one per equal stratum in every dimension,
/// each stratum sampled on its half-open interval (lo, hi]. Deterministic for
/// a fixed seed.
Eigen::MatrixXd latin_hypercube(int n,
                                const std::vector<std::pair<double, double>>& bounds,
                                std::uint64_t seed);

/// n uniform nodes on [lo, hi) (periodic convention, endpoint excluded).
Eigen::VectorXd uniform_grid(double lo, double hi, int n);

/// Builds the four point sets of segment n (1-based). Segments derive
/// independent seeds as seed XOR segment index.
PointSets build_segment_sets(const SegmentSchedule& schedule, const PdeProblem& problem,
                             const DomainBox& box, int segment, std::uint64_t seed);

/// Debug dump, columns x,t,set-tag.
void dump_point_sets_csv(const PointSets& sets, const std::string& path);

}  // namespace bcpinn
