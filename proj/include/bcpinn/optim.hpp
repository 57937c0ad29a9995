#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "bcpinn/autodiff.hpp"

namespace bcpinn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int iterations = 0;
};

struct LbfgsConfig {
  int max_iterations = 50000;
  int max_function_evals = 50000;
  int max_line_search = 50;  // trial steps per iteration
  int history = 50;          // variable metric corrections
  double ftol = 2.22044604925e-16;
  // Safety-net extension beyond the listed criteria, off by default.
  bool gradient_norm_stop = false;
  double gradient_norm_tol = 1e-12;
};

enum class LbfgsStop {
  FtolConverged,     // (f_k - f_{k+1}) / max(|f_k|, |f_{k+1}|, 1) <= ftol
  MaxIterations,
  MaxFunctionEvals,
  MaxLineSearch,     // line search exhausted its trial budget or failed
  GradientNorm,      // extension, only when enabled
};

const char* to_string(LbfgsStop reason);

/// Per-iteration progress hook (accepted iterates only for L-BFGS).
using IterationSink = std::function<void(int iteration, const LossBreakdown&)>;

struct AdamResult {
  Eigen::VectorXd theta;
  int iterations_run = 0;
  bool aborted = false;       // non-finite loss/gradient; theta is last good
  std::string diagnostic;
  LossBreakdown final_loss;
};

struct LbfgsResult {
  Eigen::VectorXd theta;      // best accepted iterate
  int iterations_run = 0;
  int function_evals = 0;
  LbfgsStop reason = LbfgsStop::MaxIterations;
  std::string detail;
  LossBreakdown final_loss;
};

/// Bias-corrected Adam for a fixed iteration count.
AdamResult adam_run(const LossObjective& objective, Eigen::VectorXd theta,
                    const AdamConfig& config, const IterationSink& sink = {});

/// L-BFGS with two-loop recursion and a strong-Wolfe line search
/// (c1 = 1e-4, c2 = 0.9). Stops on whichever configured criterion fires
/// first and reports which.
LbfgsResult lbfgs_run(const LossObjective& objective, Eigen::VectorXd theta,
                      const LbfgsConfig& config, const IterationSink& sink = {});

}  // namespace bcpinn
