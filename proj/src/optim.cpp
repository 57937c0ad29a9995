#include "bcpinn/optim.hpp"

#include <cmath>
#include <deque>

namespace bcpinn {

const char* to_string(LbfgsStop reason) {
  switch (reason) {
    case LbfgsStop::FtolConverged: return "ftol_converged";
    case LbfgsStop::MaxIterations: return "max_iterations";
    case LbfgsStop::MaxFunctionEvals: return "max_function_evals";
    case LbfgsStop::MaxLineSearch: return "max_line_search";
    case LbfgsStop::GradientNorm: return "gradient_norm";
  }
  return "?";
}

AdamResult adam_run(const LossObjective& objective, Eigen::VectorXd theta,
                    const AdamConfig& config, const IterationSink& sink) {
  const Eigen::Index n = theta.size();
  Eigen::VectorXd grad(n);
  Eigen::VectorXd m = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd last_good = theta;

  AdamResult result;
  double b1_pow = 1.0, b2_pow = 1.0;
  for (int iter = 1; iter <= config.iterations; ++iter) {
    LossBreakdown loss;
    try {
      grad.setZero();
      loss = objective(theta, &grad);
    } catch (const NonFiniteLossError& err) {
      result.aborted = true;
      result.diagnostic = err.what();
      theta = last_good;
      break;
    }
    if (!loss.finite() || !grad.allFinite()) {
      result.aborted = true;
      result.diagnostic = "non-finite loss or gradient at iteration " + std::to_string(iter);
      theta = last_good;
      break;
    }
    result.final_loss = loss;
    result.iterations_run = iter;
    if (sink) sink(iter, loss);

    last_good = theta;
    b1_pow *= config.beta1;
    b2_pow *= config.beta2;
    m = config.beta1 * m + (1.0 - config.beta1) * grad;
    v = config.beta2 * v + (1.0 - config.beta2) * grad.cwiseProduct(grad);
    const double m_scale = 1.0 / (1.0 - b1_pow);
    const double v_scale = 1.0 / (1.0 - b2_pow);
    theta.array() -= config.learning_rate * (m.array() * m_scale) /
                     ((v.array() * v_scale).sqrt() + config.epsilon);
  }
  result.theta = std::move(theta);
  return result;
}

namespace {

struct HistoryPair {
  Eigen::VectorXd s, y;
  double rho;
};

Eigen::VectorXd two_loop_direction(const Eigen::VectorXd& grad,
                                   const std::deque<HistoryPair>& history) {
  Eigen::VectorXd q = grad;
  std::vector<double> alpha(history.size());
  for (int i = int(history.size()) - 1; i >= 0; --i) {
    alpha[i] = history[i].rho * history[i].s.dot(q);
    q -= alpha[i] * history[i].y;
  }
  if (!history.empty()) {
    const auto& last = history.back();
    const double gamma = last.s.dot(last.y) / last.y.dot(last.y);
    q *= gamma;
  }
  for (std::size_t i = 0; i < history.size(); ++i) {
    const double beta = history[i].rho * history[i].y.dot(q);
    q += (alpha[i] - beta) * history[i].s;
  }
  return -q;
}

struct ProbeResult {
  bool finite = false;
  double f = 0.0;
  double dphi = 0.0;
  LossBreakdown breakdown;
};

}  // namespace

LbfgsResult lbfgs_run(const LossObjective& objective, Eigen::VectorXd theta,
                      const LbfgsConfig& config, const IterationSink& sink) {
  constexpr double kArmijo = 1e-4;
  constexpr double kCurvature = 0.9;

  LbfgsResult result;
  const Eigen::Index n = theta.size();
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd trial(n), trial_grad(n);

  int evals = 0;
  bool eval_budget_hit = false;
  auto probe = [&](const Eigen::VectorXd& point, const Eigen::VectorXd& direction,
                   Eigen::VectorXd& grad_out) -> ProbeResult {
    ProbeResult r;
    if (evals >= config.max_function_evals) {
      eval_budget_hit = true;
      return r;
    }
    ++evals;
    try {
      grad_out.setZero();
      r.breakdown = objective(point, &grad_out);
    } catch (const NonFiniteLossError&) {
      return r;
    }
    r.f = r.breakdown.total();
    r.finite = r.breakdown.finite() && grad_out.allFinite();
    r.dphi = r.finite ? grad_out.dot(direction) : 0.0;
    return r;
  };

  // initial evaluation
  LossBreakdown breakdown;
  {
    Eigen::VectorXd dummy_dir = Eigen::VectorXd::Zero(n);
    const ProbeResult r0 = probe(theta, dummy_dir, grad);
    if (!r0.finite) {
      result.theta = std::move(theta);
      result.reason = eval_budget_hit ? LbfgsStop::MaxFunctionEvals : LbfgsStop::MaxLineSearch;
      result.detail = "initial evaluation not finite";
      result.function_evals = evals;
      return result;
    }
    breakdown = r0.breakdown;
  }
  double f = breakdown.total();
  result.final_loss = breakdown;

  std::deque<HistoryPair> history;
  result.reason = LbfgsStop::MaxIterations;

  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    if (config.gradient_norm_stop && grad.lpNorm<Eigen::Infinity>() < config.gradient_norm_tol) {
      result.reason = LbfgsStop::GradientNorm;
      break;
    }

    Eigen::VectorXd dir = two_loop_direction(grad, history);
    double dphi0 = grad.dot(dir);
    if (dphi0 >= 0.0) {
      // fall back to steepest descent when the metric lost positivity
      dir = -grad;
      dphi0 = -grad.squaredNorm();
      history.clear();
    }
    if (dphi0 == 0.0) {
      // stationary point: zero decrease satisfies the relative-decrease test
      result.iterations_run = iter;
      result.reason = LbfgsStop::FtolConverged;
      result.detail = "zero directional derivative";
      break;
    }

    const double alpha_init =
        history.empty() ? std::min(1.0, 1.0 / std::max(1e-12, grad.norm())) : 1.0;

    // strong-Wolfe search: bracketing walk, then bisection zoom
    double alpha = alpha_init;
    double alpha_prev = 0.0, f_prev_ls = f, dphi_prev = dphi0;
    double alpha_lo = -1.0, alpha_hi = -1.0, f_lo = 0.0;
    bool have_bracket = false, accepted = false, search_failed = false;
    double f_new = f, dphi_new = 0.0;
    LossBreakdown breakdown_new;
    int trials = 0;

    while (trials < config.max_line_search) {
      ++trials;
      trial = theta + alpha * dir;
      const ProbeResult pr = probe(trial, dir, trial_grad);
      if (eval_budget_hit) break;
      if (!pr.finite || pr.f > f + kArmijo * alpha * dphi0 ||
          (trials > 1 && pr.f >= f_prev_ls)) {
        alpha_lo = alpha_prev;
        f_lo = f_prev_ls;
        alpha_hi = alpha;
        have_bracket = true;
        break;
      }
      if (std::abs(pr.dphi) <= -kCurvature * dphi0) {
        accepted = true;
        f_new = pr.f;
        dphi_new = pr.dphi;
        breakdown_new = pr.breakdown;
        break;
      }
      if (pr.dphi >= 0.0) {
        alpha_lo = alpha;
        f_lo = pr.f;
        alpha_hi = alpha_prev;
        have_bracket = true;
        break;
      }
      alpha_prev = alpha;
      f_prev_ls = pr.f;
      dphi_prev = pr.dphi;
      alpha *= 2.0;
    }
    (void)dphi_prev;

    if (have_bracket && !accepted) {
      while (trials < config.max_line_search) {
        ++trials;
        alpha = 0.5 * (alpha_lo + alpha_hi);
        if (std::abs(alpha_hi - alpha_lo) <
            1e-16 * std::max(1.0, std::abs(alpha_lo))) {
          search_failed = true;
          break;
        }
        trial = theta + alpha * dir;
        const ProbeResult pr = probe(trial, dir, trial_grad);
        if (eval_budget_hit) break;
        if (!pr.finite || pr.f > f + kArmijo * alpha * dphi0 || pr.f >= f_lo) {
          alpha_hi = alpha;
        } else {
          if (std::abs(pr.dphi) <= -kCurvature * dphi0) {
            accepted = true;
            f_new = pr.f;
            dphi_new = pr.dphi;
            breakdown_new = pr.breakdown;
            break;
          }
          if (pr.dphi * (alpha_hi - alpha_lo) >= 0.0) alpha_hi = alpha_lo;
          alpha_lo = alpha;
          f_lo = pr.f;
        }
      }
    }

    if (eval_budget_hit) {
      result.reason = LbfgsStop::MaxFunctionEvals;
      break;
    }
    if (!accepted) {
      result.reason = LbfgsStop::MaxLineSearch;
      result.detail = search_failed ? "line-search interval collapsed"
                                    : "line search exhausted its trial budget";
      break;
    }

    // accepted step
    Eigen::VectorXd s = alpha * dir;
    Eigen::VectorXd y = trial_grad - grad;
    theta += s;
    grad = trial_grad;
    result.iterations_run = iter;
    result.final_loss = breakdown_new;
    if (sink) sink(iter, breakdown_new);

    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      history.push_back({std::move(s), std::move(y), 1.0 / sy});
      if (int(history.size()) > config.history) history.pop_front();
    }

    const double decrease = (f - f_new) / std::max({std::abs(f), std::abs(f_new), 1.0});
    f = f_new;
    (void)dphi_new;
    if (decrease <= config.ftol) {
      result.reason = LbfgsStop::FtolConverged;
      break;
    }
    if (evals >= config.max_function_evals) {
      result.reason = LbfgsStop::MaxFunctionEvals;
      break;
    }
  }

  result.theta = std::move(theta);
  result.function_evals = evals;
  return result;
}

}  // namespace bcpinn
