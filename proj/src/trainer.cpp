#include "bcpinn/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>

namespace bcpinn {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Flattens (times x grid.x) t-major and evaluates through the shared batched
// path, so stored rows reproduce later loss-side evaluations bit-exactly.
Eigen::MatrixXd evaluate_rows(const MlpParameters& params, const DomainBox& box,
                              const Eigen::VectorXd& x, const std::vector<double>& times,
                              int field) {
  const Eigen::Index nx = x.size();
  const Eigen::Index nt = Eigen::Index(times.size());
  Eigen::VectorXd xs(nx * nt), ts(nx * nt);
  Eigen::Index k = 0;
  for (Eigen::Index it = 0; it < nt; ++it)
    for (Eigen::Index ix = 0; ix < nx; ++ix, ++k) {
      xs[k] = x[ix];
      ts[k] = times[size_t(it)];
    }
  const Eigen::MatrixXd values = batch_values(params, box, xs.data(), ts.data(), nx * nt);
  Eigen::MatrixXd rows(nt, nx);
  k = 0;
  for (Eigen::Index it = 0; it < nt; ++it)
    for (Eigen::Index ix = 0; ix < nx; ++ix, ++k) rows(it, ix) = values(k, field);
  return rows;
}

}  // namespace

void snapshot_solution(const MlpParameters& params, const DomainBox& box,
                       const std::vector<double>& times, SolutionGrid& grid) {
  if (times.empty()) return;
  for (double t : times)
    for (double existing : grid.t)
      if (std::abs(existing - t) < 1e-12)
        throw std::invalid_argument("snapshot_solution: time " + std::to_string(t) +
                                    " already stored");

  const Eigen::Index nx = grid.x.size();
  const Eigen::Index old_rows = Eigen::Index(grid.t.size());
  const Eigen::Index new_rows = Eigen::Index(times.size());

  const Eigen::MatrixXd h_rows = evaluate_rows(params, box, grid.x, times, 0);
  grid.h.conservativeResize(old_rows + new_rows, nx);
  grid.h.bottomRows(new_rows) = h_rows;
  if (grid.fields == 2) {
    const Eigen::MatrixXd mu_rows = evaluate_rows(params, box, grid.x, times, 1);
    grid.mu.conservativeResize(old_rows + new_rows, nx);
    grid.mu.bottomRows(new_rows) = mu_rows;
  }
  grid.t.insert(grid.t.end(), times.begin(), times.end());
}

Eigen::MatrixXd predict_grid(const MlpParameters& params, const DomainBox& box,
                             const Eigen::VectorXd& x, const Eigen::VectorXd& t,
                             int field) {
  std::vector<double> times(t.data(), t.data() + t.size());
  return evaluate_rows(params, box, x, times, field);
}

namespace {

// Stored targets for the compat point set of segment n, in the same t-major
// order build_segment_sets emits. Every compat time must already be present
// in the grid.
Eigen::VectorXd compat_targets_from_grid(const SolutionGrid& grid,
                                         const std::vector<double>& compat_times) {
  const Eigen::Index nx = grid.x.size();
  Eigen::VectorXd targets(nx * Eigen::Index(compat_times.size()));
  Eigen::Index k = 0;
  for (double t : compat_times) {
    Eigen::Index row = -1;
    for (std::size_t r = 0; r < grid.t.size(); ++r)
      if (std::abs(grid.t[r] - t) < 1e-12) {
        row = Eigen::Index(r);
        break;
      }
    if (row < 0)
      throw std::runtime_error("compat point at t=" + std::to_string(t) +
                               " missing from the stored solution grid");
    for (Eigen::Index ix = 0; ix < nx; ++ix, ++k) targets[k] = grid.h(row, ix);
  }
  return targets;
}

TrainedRun run_segmented(const PdeProblem& problem, const DomainBox& box,
                         const SegmentSchedule& schedule, const TrainOptions& options,
                         bool backward_compatible) {
  schedule.validate();
  problem.validate();

  std::vector<int> dims;
  dims.push_back(2);
  for (int h : options.hidden_layers) dims.push_back(h);
  dims.push_back(problem.output_width());

  TrainedRun run;
  run.seed = options.seed;
  run.params = xavier_init(dims, options.seed);
  run.grid.x = uniform_grid(box.x_min, box.x_max, schedule.n_initial);
  run.grid.fields = problem.output_width();

  Eigen::VectorXd theta = run.params.to_flat();

  for (int segment = 1; segment <= schedule.segments; ++segment) {
    PointSets sets = build_segment_sets(schedule, problem, box, segment, options.seed);
    Eigen::VectorXd compat_targets;
    if (backward_compatible && segment > 1)
      compat_targets =
          compat_targets_from_grid(run.grid, schedule.compat_snapshot_times(segment));
    else if (!backward_compatible) {
      sets.compat_x.resize(0);
      sets.compat_t.resize(0);
    }

    SegmentObjective objective(problem, box, dims, std::move(sets),
                               std::move(compat_targets), {options.log_residual});

    SegmentRecord record;
    record.index = segment;
    record.t_begin = schedule.segment_begin(segment);
    record.t_end = schedule.segment_end(segment);

    AdamConfig adam = options.adam;
    adam.iterations = schedule.adam_iterations;
    const auto adam_start = Clock::now();
    AdamResult adam_result =
        adam_run(objective.as_objective(), std::move(theta), adam,
                 [&](int iter, const LossBreakdown& loss) {
                   if (iter % options.log_stride == 0)
                     run.iteration_log.push_back({segment, 'a', iter, loss});
                 });
    record.adam_seconds = seconds_since(adam_start);
    record.adam_iterations = adam_result.iterations_run;
    theta = std::move(adam_result.theta);

    if (adam_result.aborted) {
      record.aborted = true;
      record.diagnostic = adam_result.diagnostic;
      record.final_loss = adam_result.final_loss;
      run.segments.push_back(std::move(record));
      run.completed = false;
      break;
    }

    LbfgsConfig lbfgs = options.lbfgs;
    lbfgs.max_iterations = schedule.lbfgs_iterations;
    const auto lbfgs_start = Clock::now();
    LbfgsResult lbfgs_result =
        lbfgs_run(objective.as_objective(), std::move(theta), lbfgs,
                  [&](int iter, const LossBreakdown& loss) {
                    if (iter % options.log_stride == 0)
                      run.iteration_log.push_back({segment, 'l', iter, loss});
                  });
    record.lbfgs_seconds = seconds_since(lbfgs_start);
    record.lbfgs_iterations = lbfgs_result.iterations_run;
    record.lbfgs_function_evals = lbfgs_result.function_evals;
    record.lbfgs_reason = lbfgs_result.reason;
    record.lbfgs_detail = lbfgs_result.detail;
    record.final_loss = lbfgs_result.final_loss;
    theta = std::move(lbfgs_result.theta);

    run.params.set_from_flat(theta);
    if (!record.final_loss.finite() || !run.params.all_finite()) {
      record.aborted = true;
      record.diagnostic = "segment ended with non-finite state";
      run.segments.push_back(std::move(record));
      run.completed = false;
      break;
    }

    snapshot_solution(run.params, box, schedule.segment_snapshot_times(segment), run.grid);
    run.segments.push_back(std::move(record));
  }
  return run;
}

}  // namespace

TrainedRun train_bc_pinn(const PdeProblem& problem, const DomainBox& box,
                         const SegmentSchedule& schedule, const TrainOptions& options) {
  return run_segmented(problem, box, schedule, options, true);
}

TrainedRun train_standard_pinn(const PdeProblem& problem, const DomainBox& box,
                               const SegmentSchedule& schedule,
                               const TrainOptions& options) {
  if (schedule.segments != 1)
    throw std::invalid_argument("train_standard_pinn: expects a single segment");
  return run_segmented(problem, box, schedule, options, false);
}

namespace {
constexpr char kGridMagic[4] = {'B', 'C', 'S', 'G'};
constexpr std::uint32_t kGridVersion = 1;
}  // namespace

void write_solution_grid(const SolutionGrid& grid, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("solution grid: cannot open " + path);
  out.write(kGridMagic, 4);
  const std::uint32_t version = kGridVersion;
  const std::uint32_t nx = std::uint32_t(grid.x.size());
  const std::uint32_t nt = std::uint32_t(grid.t.size());
  const std::uint32_t fields = std::uint32_t(grid.fields);
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(&nx), 4);
  out.write(reinterpret_cast<const char*>(&nt), 4);
  out.write(reinterpret_cast<const char*>(&fields), 4);
  out.write(reinterpret_cast<const char*>(grid.x.data()), std::streamsize(nx * 8));
  out.write(reinterpret_cast<const char*>(grid.t.data()), std::streamsize(nt * 8));
  auto write_rows = [&](const Eigen::MatrixXd& m) {
    for (std::uint32_t it = 0; it < nt; ++it)
      for (std::uint32_t ix = 0; ix < nx; ++ix) {
        const double v = m(it, ix);
        out.write(reinterpret_cast<const char*>(&v), 8);
      }
  };
  write_rows(grid.h);
  if (fields == 2) write_rows(grid.mu);
  if (!out) throw std::runtime_error("solution grid: write failed for " + path);
}

SolutionGrid read_solution_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("solution grid: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kGridMagic, 4) != 0)
    throw std::runtime_error("solution grid: bad magic in " + path);
  std::uint32_t version = 0, nx = 0, nt = 0, fields = 0;
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(&nx), 4);
  in.read(reinterpret_cast<char*>(&nt), 4);
  in.read(reinterpret_cast<char*>(&fields), 4);
  if (!in) throw std::runtime_error("solution grid: truncated header in " + path);
  if (version != kGridVersion)
    throw std::runtime_error("solution grid: incompatible version " +
                             std::to_string(version));
  if (fields != 1 && fields != 2)
    throw std::runtime_error("solution grid: bad field count");

  SolutionGrid grid;
  grid.fields = int(fields);
  grid.x.resize(nx);
  grid.t.resize(nt);
  in.read(reinterpret_cast<char*>(grid.x.data()), std::streamsize(nx * 8));
  in.read(reinterpret_cast<char*>(grid.t.data()), std::streamsize(nt * 8));
  auto read_rows = [&](Eigen::MatrixXd& m) {
    m.resize(nt, nx);
    for (std::uint32_t it = 0; it < nt; ++it)
      for (std::uint32_t ix = 0; ix < nx; ++ix) {
        double v;
        in.read(reinterpret_cast<char*>(&v), 8);
        m(it, ix) = v;
      }
  };
  read_rows(grid.h);
  if (fields == 2) read_rows(grid.mu);
  if (!in) throw std::runtime_error("solution grid: truncated payload in " + path);
  return grid;
}

void write_loss_log_csv(const std::vector<IterationRecord>& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("loss log: cannot open " + path);
  out << "segment,phase,iteration,mse_i,mse_b,mse_r,mse_s,total\n";
  out.precision(17);
  for (const auto& rec : log)
    out << rec.segment << "," << (rec.phase == 'a' ? "adam" : "lbfgs") << ","
        << rec.iteration << "," << rec.loss.mse_i << "," << rec.loss.mse_b << ","
        << rec.loss.mse_r << "," << rec.loss.mse_s << "," << rec.loss.total() << "\n";
}

}  // namespace bcpinn
