#include "bcpinn/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

namespace bcpinn {

std::vector<double> SegmentSchedule::segment_snapshot_times(int n) const {
  std::vector<double> times;
  if (n == 1) times.push_back(snapshot_time(0));
  for (int i = (n - 1) * steps_per_segment + 1; i <= n * steps_per_segment; ++i)
    times.push_back(snapshot_time(i));
  return times;
}

std::vector<double> SegmentSchedule::compat_snapshot_times(int n) const {
  std::vector<double> times;
  if (n <= 1) return times;
  for (int i = 0; i <= (n - 1) * steps_per_segment; ++i) times.push_back(snapshot_time(i));
  return times;
}

void SegmentSchedule::validate() const {
  if (segments < 1 || steps_per_segment < 1)
    throw std::invalid_argument("SegmentSchedule: segments and steps must be positive");
  if (!(t_final > 0) || !(snapshot_dt > 0))
    throw std::invalid_argument("SegmentSchedule: t_final and snapshot_dt must be positive");
  const double covered = segments * steps_per_segment * snapshot_dt;
  if (std::abs(covered - t_final) > 1e-9 * std::max(1.0, t_final))
    throw std::invalid_argument(
        "SegmentSchedule: segments * steps * snapshot_dt must equal t_final");
  if (n_initial < 1 || n_boundary < 1 || n_collocation < 1)
    throw std::invalid_argument("SegmentSchedule: point counts must be positive");
}

namespace {
inline double unit_uniform(std::mt19937_64& rng) {
  return double(rng() >> 11) * 0x1.0p-53;
}
}  // namespace

Eigen::MatrixXd latin_hypercube(int n,
                                const std::vector<std::pair<double, double>>& bounds,
                                std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("latin_hypercube: need at least one point");
  for (const auto& [lo, hi] : bounds)
    if (!(lo < hi)) throw std::invalid_argument("latin_hypercube: invalid bounds");

  const int dims = int(bounds.size());
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd points(n, dims);
  std::vector<int> strata(n);
  for (int d = 0; d < dims; ++d) {
    std::iota(strata.begin(), strata.end(), 0);
    std::shuffle(strata.begin(), strata.end(), rng);
    const auto [lo, hi] = bounds[d];
    const double width = (hi - lo) / n;
    for (int i = 0; i < n; ++i) {
      // (0,1] within the stratum keeps every sample inside the half-open
      // interval (lo, hi]
      const double u = 1.0 - unit_uniform(rng);
      points(i, d) = lo + (strata[i] + u) * width;
    }
  }
  return points;
}

Eigen::VectorXd uniform_grid(double lo, double hi, int n) {
  Eigen::VectorXd x(n);
  const double dx = (hi - lo) / n;
  for (int i = 0; i < n; ++i) x[i] = lo + i * dx;
  return x;
}

PointSets build_segment_sets(const SegmentSchedule& schedule, const PdeProblem& problem,
                             const DomainBox& box, int segment, std::uint64_t seed) {
  schedule.validate();
  if (segment < 1 || segment > schedule.segments)
    throw std::out_of_range("build_segment_sets: segment index out of range");

  const std::uint64_t segment_seed = seed ^ std::uint64_t(segment);
  const double t_lo = schedule.segment_begin(segment);
  const double t_hi = schedule.segment_end(segment);

  PointSets sets;
  sets.initial_x = uniform_grid(box.x_min, box.x_max, schedule.n_initial);
  sets.initial_targets.resize(schedule.n_initial, problem.output_width());
  for (int i = 0; i < schedule.n_initial; ++i) {
    if (problem.kind == PdeKind::AllenCahn) {
      sets.initial_targets(i, 0) = ac_initial(sets.initial_x[i]);
    } else {
      const auto [h0, mu0] = ch_initial(sets.initial_x[i]);
      sets.initial_targets(i, 0) = h0;
      if (problem.output_width() == 2) sets.initial_targets(i, 1) = mu0;
    }
  }

  const Eigen::MatrixXd bt =
      latin_hypercube(schedule.n_boundary, {{t_lo, t_hi}}, segment_seed);
  sets.boundary_t = bt.col(0);

  const Eigen::MatrixXd colloc = latin_hypercube(
      schedule.n_collocation, {{box.x_min, box.x_max}, {t_lo, t_hi}}, segment_seed + 0x9e3779b97f4a7c15ull);
  sets.colloc_x = colloc.col(0);
  sets.colloc_t = colloc.col(1);

  const std::vector<double> compat_times = schedule.compat_snapshot_times(segment);
  if (!compat_times.empty()) {
    const Eigen::VectorXd grid = sets.initial_x;
    const int nx = int(grid.size());
    const int nt = int(compat_times.size());
    sets.compat_x.resize(Eigen::Index(nx) * nt);
    sets.compat_t.resize(Eigen::Index(nx) * nt);
    Eigen::Index k = 0;
    for (int it = 0; it < nt; ++it)
      for (int ix = 0; ix < nx; ++ix, ++k) {
        sets.compat_x[k] = grid[ix];
        sets.compat_t[k] = compat_times[it];
      }
  }
  return sets;
}

void dump_point_sets_csv(const PointSets& sets, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("dump_point_sets_csv: cannot open " + path);
  out << "x,t,set\n";
  out.precision(17);
  for (Eigen::Index i = 0; i < sets.initial_x.size(); ++i)
    out << sets.initial_x[i] << ",0,initial\n";
  for (Eigen::Index i = 0; i < sets.boundary_t.size(); ++i)
    out << 1 << "," << sets.boundary_t[i] << ",boundary\n";
  for (Eigen::Index i = 0; i < sets.colloc_x.size(); ++i)
    out << sets.colloc_x[i] << "," << sets.colloc_t[i] << ",collocation\n";
  for (Eigen::Index i = 0; i < sets.compat_x.size(); ++i)
    out << sets.compat_x[i] << "," << sets.compat_t[i] << ",compat\n";
}

}  // namespace bcpinn
