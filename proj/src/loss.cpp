#include "bcpinn/loss.hpp"

#include <cmath>

namespace bcpinn {

namespace {

double initial_term(JetBatchEvaluator& eval, GradAccumulator* gacc,
                    const Eigen::VectorXd& x, const Eigen::MatrixXd& targets) {
  const Eigen::Index n = x.size();
  if (n == 0) throw std::invalid_argument("mse_initial: empty point set");
  const int fields = int(targets.cols());
  const Eigen::VectorXd zeros = Eigen::VectorXd::Zero(n);
  double sum = 0.0;
  for (Eigen::Index off = 0; off < n; off += kBatchBlockPoints) {
    const int chunk = int(std::min<Eigen::Index>(kBatchBlockPoints, n - off));
    eval.forward(x.data() + off, zeros.data() + off, chunk, 0, false);
    for (int p = 0; p < chunk; ++p) {
      for (int o = 0; o < fields; ++o) {
        const double d = eval.output_jet(p, o).value - targets(off + p, o);
        sum += d * d;
        if (gacc) {
          JetAdjoint bar;
          bar.value = 2.0 * d / double(n);
          eval.add_output_adjoint(p, o, bar);
        }
      }
    }
    if (gacc) eval.backward(*gacc);
  }
  const double value = sum / double(n);
  if (!std::isfinite(value)) throw NonFiniteLossError("mse_initial");
  return value;
}

double boundary_term(JetBatchEvaluator& eval, GradAccumulator* gacc,
                     const DomainBox& box, const Eigen::VectorXd& t_points,
                     int boundary_order, int fields) {
  const Eigen::Index n = t_points.size();
  if (n == 0) throw std::invalid_argument("mse_boundary: empty point set");
  if (boundary_order < 1 || boundary_order > 2)
    throw std::invalid_argument("mse_boundary: boundary order must be 1 or 2");

  // pair layout: even index = x_max side, odd = mirrored x_min side
  Eigen::VectorXd xs(2 * n), ts(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    xs[2 * i] = box.x_max;
    xs[2 * i + 1] = box.x_min;
    ts[2 * i] = t_points[i];
    ts[2 * i + 1] = t_points[i];
  }

  const int order = boundary_order - 1;
  const int block_pairs = kBatchBlockPoints / 2;
  double sum = 0.0;
  for (Eigen::Index off = 0; off < n; off += block_pairs) {
    const int pairs = int(std::min<Eigen::Index>(block_pairs, n - off));
    eval.forward(xs.data() + 2 * off, ts.data() + 2 * off, 2 * pairs, order, false);
    for (int p = 0; p < pairs; ++p) {
      for (int o = 0; o < fields; ++o) {
        const Jet plus = eval.output_jet(2 * p, o);
        const Jet minus = eval.output_jet(2 * p + 1, o);
        const double d0 = plus.value - minus.value;
        sum += d0 * d0;
        double d1 = 0.0;
        if (boundary_order >= 2) {
          d1 = plus.dx[0] - minus.dx[0];
          sum += d1 * d1;
        }
        if (gacc) {
          JetAdjoint bp, bm;
          bp.value = 2.0 * d0 / double(n);
          bm.value = -bp.value;
          if (boundary_order >= 2) {
            bp.dx[0] = 2.0 * d1 / double(n);
            bm.dx[0] = -bp.dx[0];
          }
          eval.add_output_adjoint(2 * p, o, bp);
          eval.add_output_adjoint(2 * p + 1, o, bm);
        }
      }
    }
    if (gacc) eval.backward(*gacc);
  }
  const double value = sum / double(n);
  if (!std::isfinite(value)) throw NonFiniteLossError("mse_boundary");
  return value;
}

double residual_term(JetBatchEvaluator& eval, GradAccumulator* gacc,
                     const PdeProblem& problem, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& t, bool log_residual) {
  const Eigen::Index n = x.size();
  if (n == 0) throw std::invalid_argument("mse_residual: empty point set");
  const int order = problem.residual_spatial_order();
  const double inv_n = 1.0 / double(n);

  double sum = 0.0;
  for (Eigen::Index off = 0; off < n; off += kBatchBlockPoints) {
    const int chunk = int(std::min<Eigen::Index>(kBatchBlockPoints, n - off));
    eval.forward(x.data() + off, t.data() + off, chunk, order, true);
    for (int p = 0; p < chunk; ++p) {
      double contrib = 0.0;
      if (problem.kind == PdeKind::CahnHilliardPhaseSpace) {
        const Jet h = eval.output_jet(p, 0);
        const Jet mu = eval.output_jet(p, 1);
        const auto [r1, r2] = ch_phase_residuals(h, mu, problem.ch);
        contrib = log_residual ? std::log1p(r1 * r1) + std::log1p(r2 * r2)
                               : r1 * r1 + r2 * r2;
        if (gacc) {
          const double b1 = (log_residual ? 2.0 * r1 / (1.0 + r1 * r1) : 2.0 * r1) * inv_n;
          const double b2 = (log_residual ? 2.0 * r2 / (1.0 + r2 * r2) : 2.0 * r2) * inv_n;
          JetAdjoint h_bar, mu_bar;
          ch_phase_residuals_vjp(h, mu, problem.ch, b1, b2, h_bar, mu_bar);
          eval.add_output_adjoint(p, 0, h_bar);
          eval.add_output_adjoint(p, 1, mu_bar);
        }
      } else {
        const Jet h = eval.output_jet(p, 0);
        const double r = problem.kind == PdeKind::AllenCahn ? ac_residual(h, problem.ac)
                                                            : ch4_residual(h, problem.ch);
        contrib = log_residual ? std::log1p(r * r) : r * r;
        if (gacc) {
          const double b = (log_residual ? 2.0 * r / (1.0 + r * r) : 2.0 * r) * inv_n;
          JetAdjoint h_bar;
          if (problem.kind == PdeKind::AllenCahn)
            ac_residual_vjp(h, problem.ac, b, h_bar);
          else
            ch4_residual_vjp(h, problem.ch, b, h_bar);
          eval.add_output_adjoint(p, 0, h_bar);
        }
      }
      if (!std::isfinite(contrib))
        throw NonFiniteLossError("mse_residual", x[off + p], t[off + p]);
      sum += contrib;
    }
    if (gacc) eval.backward(*gacc);
  }
  return sum * inv_n;
}

double compat_term(JetBatchEvaluator& eval, GradAccumulator* gacc,
                   const Eigen::VectorXd& x, const Eigen::VectorXd& t,
                   const Eigen::VectorXd& stored_h) {
  const Eigen::Index n = x.size();
  if (n == 0) return 0.0;  // segment 1 has no stored solution
  if (stored_h.size() != n)
    throw std::invalid_argument("mse_compat: stored values do not cover the point set");
  double sum = 0.0;
  for (Eigen::Index off = 0; off < n; off += kBatchBlockPoints) {
    const int chunk = int(std::min<Eigen::Index>(kBatchBlockPoints, n - off));
    eval.forward(x.data() + off, t.data() + off, chunk, 0, false);
    for (int p = 0; p < chunk; ++p) {
      const double d = eval.output_jet(p, 0).value - stored_h[off + p];
      sum += d * d;
      if (gacc) {
        JetAdjoint bar;
        bar.value = 2.0 * d / double(n);
        eval.add_output_adjoint(p, 0, bar);
      }
    }
    if (gacc) eval.backward(*gacc);
  }
  const double value = sum / double(n);
  if (!std::isfinite(value)) throw NonFiniteLossError("mse_compat");
  return value;
}

void flatten_gradient(const GradAccumulator& gacc, const MlpParameters& params,
                      Eigen::VectorXd* grad) {
  grad->setZero(params.parameter_count());
  gacc.add_to_flat(*grad);
}

}  // namespace

double boundary_pair_mismatch(const Jet& plus, const Jet& minus, int boundary_order) {
  if (boundary_order < 1 || boundary_order > 2)
    throw std::invalid_argument("boundary_pair_mismatch: boundary order must be 1 or 2");
  if (plus.order < boundary_order - 1 || minus.order < boundary_order - 1)
    throw std::invalid_argument("boundary_pair_mismatch: jet order below n_d - 1");
  const double d0 = plus.value - minus.value;
  double sum = d0 * d0;
  if (boundary_order >= 2) {
    const double d1 = plus.dx[0] - minus.dx[0];
    sum += d1 * d1;
  }
  return sum;
}

double mse_initial(const MlpParameters& params, const DomainBox& box,
                   const Eigen::VectorXd& x, const Eigen::MatrixXd& targets,
                   Eigen::VectorXd* grad) {
  JetBatchEvaluator eval(params, box);
  GradAccumulator gacc(params);
  const double v = initial_term(eval, grad ? &gacc : nullptr, x, targets);
  if (grad) flatten_gradient(gacc, params, grad);
  return v;
}

double mse_boundary(const MlpParameters& params, const DomainBox& box,
                    const Eigen::VectorXd& t_points, int boundary_order,
                    int output_fields, Eigen::VectorXd* grad) {
  JetBatchEvaluator eval(params, box);
  GradAccumulator gacc(params);
  const double v = boundary_term(eval, grad ? &gacc : nullptr, box, t_points,
                                 boundary_order, output_fields);
  if (grad) flatten_gradient(gacc, params, grad);
  return v;
}

double mse_residual(const MlpParameters& params, const DomainBox& box,
                    const PdeProblem& problem, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& t, bool log_residual, Eigen::VectorXd* grad) {
  JetBatchEvaluator eval(params, box);
  GradAccumulator gacc(params);
  const double v =
      residual_term(eval, grad ? &gacc : nullptr, problem, x, t, log_residual);
  if (grad) flatten_gradient(gacc, params, grad);
  return v;
}

double mse_compat(const MlpParameters& params, const DomainBox& box,
                  const Eigen::VectorXd& x, const Eigen::VectorXd& t,
                  const Eigen::VectorXd& stored_h, Eigen::VectorXd* grad) {
  JetBatchEvaluator eval(params, box);
  GradAccumulator gacc(params);
  const double v = compat_term(eval, grad ? &gacc : nullptr, x, t, stored_h);
  if (grad) flatten_gradient(gacc, params, grad);
  return v;
}

LossBreakdown total_loss(const MlpParameters& params, const DomainBox& box,
                         const PdeProblem& problem, const PointSets& sets,
                         const Eigen::VectorXd& compat_targets, const LossOptions& opts,
                         Eigen::VectorXd* grad) {
  JetBatchEvaluator eval(params, box);
  GradAccumulator gacc(params);
  GradAccumulator* g = grad ? &gacc : nullptr;

  LossBreakdown loss;
  loss.mse_i = initial_term(eval, g, sets.initial_x, sets.initial_targets);
  loss.mse_b = boundary_term(eval, g, box, sets.boundary_t, problem.boundary_order,
                             problem.output_width());
  loss.mse_r =
      residual_term(eval, g, problem, sets.colloc_x, sets.colloc_t, opts.log_residual);
  loss.mse_s = compat_term(eval, g, sets.compat_x, sets.compat_t, compat_targets);
  if (grad) flatten_gradient(gacc, params, grad);
  return loss;
}

SegmentObjective::SegmentObjective(const PdeProblem& problem, const DomainBox& box,
                                   std::vector<int> layer_dims, PointSets sets,
                                   Eigen::VectorXd compat_targets, LossOptions opts)
    : problem_(problem),
      box_(box),
      layer_dims_(std::move(layer_dims)),
      sets_(std::move(sets)),
      compat_targets_(std::move(compat_targets)),
      opts_(opts) {
  scratch_.layer_dims = layer_dims_;
  for (std::size_t l = 0; l + 1 < layer_dims_.size(); ++l) {
    scratch_.weights.emplace_back(Eigen::MatrixXd::Zero(layer_dims_[l + 1], layer_dims_[l]));
    scratch_.biases.emplace_back(Eigen::VectorXd::Zero(layer_dims_[l + 1]));
  }
}

LossBreakdown SegmentObjective::evaluate(const Eigen::VectorXd& theta,
                                         Eigen::VectorXd* grad) const {
  scratch_.set_from_flat(theta);
  return total_loss(scratch_, box_, problem_, sets_, compat_targets_, opts_, grad);
}

LossObjective SegmentObjective::as_objective() const {
  return [this](const Eigen::VectorXd& theta, Eigen::VectorXd* grad) {
    return evaluate(theta, grad);
  };
}

}  // namespace bcpinn
