#include "bcpinn/autodiff.hpp"

#include <cmath>
#include <sstream>

namespace bcpinn {

namespace {
constexpr double kFactorial[5] = {1.0, 1.0, 2.0, 6.0, 24.0};
}

double Jet::dx_order(int j) const {
  if (j < 1 || j > order) throw std::out_of_range("Jet::dx_order: order out of range");
  return dx[j - 1];
}

NonFiniteLossError::NonFiniteLossError(std::string component, double x, double t)
    : std::runtime_error("non-finite " + component + " at (x=" + std::to_string(x) +
                         ", t=" + std::to_string(t) + ")"),
      component_(std::move(component)),
      x_(x),
      t_(t) {}

NonFiniteLossError::NonFiniteLossError(std::string component)
    : std::runtime_error("non-finite " + component), component_(std::move(component)) {}

GradAccumulator::GradAccumulator(const MlpParameters& params) {
  for (int l = 0; l < params.layer_count(); ++l) {
    w_bar.emplace_back(Eigen::MatrixXd::Zero(params.weights[l].rows(),
                                             params.weights[l].cols()));
    b_bar.emplace_back(Eigen::VectorXd::Zero(params.biases[l].size()));
  }
}

void GradAccumulator::reset() {
  for (auto& w : w_bar) w.setZero();
  for (auto& b : b_bar) b.setZero();
}

void GradAccumulator::add_to_flat(Eigen::VectorXd& grad) const {
  Eigen::Index pos = 0;
  for (std::size_t l = 0; l < w_bar.size(); ++l) {
    const auto& w = w_bar[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) grad[pos++] += w(r, c);
    grad.segment(pos, b_bar[l].size()) += b_bar[l];
    pos += b_bar[l].size();
  }
}

JetBatchEvaluator::JetBatchEvaluator(const MlpParameters& params, const DomainBox& box)
    : params_(params), box_(box) {
  const int hidden = params_.layer_count() - 1;
  pre_.resize(hidden);
  act_.resize(hidden);
  scratch_.resize(2);
}

// Taylor-coefficient propagation of y = tanh(z) per unit, driven by the
// series identity y' = (1 - y^2) z'. Channel j holds coefficient
// d^j/dx^j / j!; the trailing channel holds d/dt when DT.
template <int K, bool DT>
static void tanh_channels(const double* z, double* y, int width, int channel_stride) {
  const double* z0 = z;
  double* y0 = y;
  for (int u = 0; u < width; ++u) {
    const double t0 = y0[u];
    const double w0 = 1.0 - t0 * t0;
    double y1 = 0, y2 = 0, y3 = 0;
    if constexpr (K >= 1) {
      y1 = w0 * z0[u + channel_stride];
      y0[u + channel_stride] = y1;
    }
    if constexpr (K >= 2) {
      const double w1 = -2.0 * t0 * y1;
      y2 = w0 * z0[u + 2 * channel_stride] + 0.5 * w1 * z0[u + channel_stride];
      y0[u + 2 * channel_stride] = y2;
      if constexpr (K >= 3) {
        const double w2 = -(2.0 * t0 * y2 + y1 * y1);
        y3 = w0 * z0[u + 3 * channel_stride] +
             (2.0 * w1 * z0[u + 2 * channel_stride] + w2 * z0[u + channel_stride]) / 3.0;
        y0[u + 3 * channel_stride] = y3;
        if constexpr (K >= 4) {
          const double w3 = -2.0 * (t0 * y3 + y1 * y2);
          const double y4 = w0 * z0[u + 4 * channel_stride] +
                            (3.0 * w1 * z0[u + 3 * channel_stride] +
                             2.0 * w2 * z0[u + 2 * channel_stride] +
                             w3 * z0[u + channel_stride]) /
                                4.0;
          y0[u + 4 * channel_stride] = y4;
        }
      }
    }
    if constexpr (DT) {
      constexpr int t_ch = K + 1;
      y0[u + t_ch * channel_stride] = w0 * z0[u + t_ch * channel_stride];
    }
  }
}

// Reverse of tanh_channels: distributes cotangents of the y channels onto the
// z channels, walking the recurrence in reverse topological order.
template <int K, bool DT>
static void tanh_channels_vjp(const double* z, const double* y, const double* ybar,
                              double* zbar, int width, int channel_stride) {
  const int cs = channel_stride;
  for (int u = 0; u < width; ++u) {
    const double y0 = y[u];
    const double w0 = 1.0 - y0 * y0;
    double g0 = ybar[u];
    double wb0 = 0;

    if constexpr (DT) {
      constexpr int t_ch = K + 1;
      const double gt = ybar[u + t_ch * cs];
      wb0 += gt * z[u + t_ch * cs];
      zbar[u + t_ch * cs] = w0 * gt;
    }

    if constexpr (K >= 1) {
      const double z1 = z[u + cs];
      const double y1 = y[u + cs];
      double g1 = ybar[u + cs];
      double zb1 = 0, wb1 = 0;

      if constexpr (K >= 2) {
        const double z2 = z[u + 2 * cs];
        const double y2 = y[u + 2 * cs];
        double g2 = ybar[u + 2 * cs];
        double zb2 = 0, wb2 = 0;
        const double w1 = -2.0 * y0 * y1;

        if constexpr (K >= 3) {
          const double z3 = z[u + 3 * cs];
          const double y3 = y[u + 3 * cs];
          double g3 = ybar[u + 3 * cs];
          double zb3 = 0, wb3 = 0;
          const double w2 = -(2.0 * y0 * y2 + y1 * y1);

          if constexpr (K >= 4) {
            const double z4 = z[u + 4 * cs];
            const double g4 = ybar[u + 4 * cs];
            const double w3 = -2.0 * (y0 * y3 + y1 * y2);
            // y4 = w0 z4 + (3 w1 z3 + 2 w2 z2 + w3 z1)/4
            wb0 += g4 * z4;
            zbar[u + 4 * cs] = g4 * w0;
            wb1 += g4 * 0.75 * z3;
            zb3 += g4 * 0.75 * w1;
            wb2 += g4 * 0.5 * z2;
            zb2 += g4 * 0.5 * w2;
            wb3 += g4 * 0.25 * z1;
            zb1 += g4 * 0.25 * w3;
            // w3 = -2 (y0 y3 + y1 y2)
            g0 += wb3 * (-2.0 * y3);
            g3 += wb3 * (-2.0 * y0);
            g1 += wb3 * (-2.0 * y2);
            g2 += wb3 * (-2.0 * y1);
          }
          // y3 = w0 z3 + (2 w1 z2 + w2 z1)/3
          wb0 += g3 * z3;
          zb3 += g3 * w0;
          wb1 += g3 * (2.0 / 3.0) * z2;
          zb2 += g3 * (2.0 / 3.0) * w1;
          wb2 += g3 * (1.0 / 3.0) * z1;
          zb1 += g3 * (1.0 / 3.0) * w2;
          zbar[u + 3 * cs] = zb3;
          // w2 = -(2 y0 y2 + y1^2)
          g0 += wb2 * (-2.0 * y2);
          g2 += wb2 * (-2.0 * y0);
          g1 += wb2 * (-2.0 * y1);
        }
        // y2 = w0 z2 + (1/2) w1 z1
        wb0 += g2 * z2;
        zb2 += g2 * w0;
        wb1 += g2 * 0.5 * z1;
        zb1 += g2 * 0.5 * w1;
        zbar[u + 2 * cs] = zb2;
        // w1 = -2 y0 y1
        g0 += wb1 * (-2.0 * y1);
        g1 += wb1 * (-2.0 * y0);
      }
      // y1 = w0 z1
      wb0 += g1 * z1;
      zb1 += g1 * w0;
      zbar[u + cs] = zb1;
    }
    // w0 = 1 - y0^2, then y0 = tanh(z0)
    g0 += wb0 * (-2.0 * y0);
    zbar[u] = g0 * w0;
  }
}

template <int K, bool DT>
void JetBatchEvaluator::forward_impl(const double* xs, const double* ts, int count) {
  constexpr int C = K + 1 + (DT ? 1 : 0);
  const int cols = C * count;
  const int layers = params_.layer_count();
  const int hidden = layers - 1;
  const double sx = box_.x_scale();
  const double st = box_.t_scale();

  input_.setZero(2, cols);
  for (int p = 0; p < count; ++p) {
    const auto [xn, tn] = normalize(xs[p], ts[p], box_);
    input_(0, p * C) = xn;
    input_(1, p * C) = tn;
    if constexpr (K >= 1) input_(0, p * C + 1) = sx;
    if constexpr (DT) input_(1, p * C + K + 1) = st;
  }

  const Eigen::MatrixXd* prev = &input_;
  for (int l = 0; l < hidden; ++l) {
    const int w = int(params_.weights[l].rows());
    pre_[l].resize(w, cols);
    pre_[l].noalias() = params_.weights[l] * (*prev);
    // bias contributes to the value channel only
    Eigen::Map<Eigen::MatrixXd, 0, Eigen::OuterStride<>> z0(
        pre_[l].data(), w, count, Eigen::OuterStride<>(Eigen::Index(C) * w));
    z0.colwise() += params_.biases[l];

    act_[l].resize(w, cols);
    Eigen::Map<Eigen::MatrixXd, 0, Eigen::OuterStride<>> y0(
        act_[l].data(), w, count, Eigen::OuterStride<>(Eigen::Index(C) * w));
    if constexpr (C == 1) {
      act_[l].array() = 1.0 - 2.0 / ((2.0 * pre_[l].array()).exp() + 1.0);
    } else {
      y0.array() = 1.0 - 2.0 / ((2.0 * z0.array()).exp() + 1.0);
      for (int p = 0; p < count; ++p)
        tanh_channels<K, DT>(pre_[l].data() + Eigen::Index(p) * C * w,
                             act_[l].data() + Eigen::Index(p) * C * w, w, w);
    }
    prev = &act_[l];
  }

  const int ow = params_.output_width();
  out_.resize(ow, cols);
  out_.noalias() = params_.weights[hidden] * (*prev);
  Eigen::Map<Eigen::MatrixXd, 0, Eigen::OuterStride<>> o0(
      out_.data(), ow, count, Eigen::OuterStride<>(Eigen::Index(C) * ow));
  o0.colwise() += params_.biases[hidden];

  out_bar_.setZero(ow, cols);
  count_ = count;
  order_ = K;
  with_dt_ = DT;
  channels_ = C;
}

void JetBatchEvaluator::forward(const double* xs, const double* ts, int count,
                                int spatial_order, bool with_dt) {
  if (spatial_order < 0 || spatial_order > kMaxSpatialOrder)
    throw std::invalid_argument("JetBatchEvaluator: unsupported spatial order " +
                                std::to_string(spatial_order));
  switch (spatial_order * 2 + (with_dt ? 1 : 0)) {
    case 0: return forward_impl<0, false>(xs, ts, count);
    case 1: return forward_impl<0, true>(xs, ts, count);
    case 2: return forward_impl<1, false>(xs, ts, count);
    case 3: return forward_impl<1, true>(xs, ts, count);
    case 4: return forward_impl<2, false>(xs, ts, count);
    case 5: return forward_impl<2, true>(xs, ts, count);
    case 6: return forward_impl<3, false>(xs, ts, count);
    case 7: return forward_impl<3, true>(xs, ts, count);
    case 8: return forward_impl<4, false>(xs, ts, count);
    case 9: return forward_impl<4, true>(xs, ts, count);
    default: throw std::logic_error("unreachable");
  }
}

Jet JetBatchEvaluator::output_jet(int point, int output_index) const {
  Jet jet;
  jet.order = order_;
  jet.has_dt = with_dt_;
  const int base = point * channels_;
  jet.value = out_(output_index, base);
  for (int j = 1; j <= order_; ++j) jet.dx[j - 1] = kFactorial[j] * out_(output_index, base + j);
  if (with_dt_) jet.dt = out_(output_index, base + order_ + 1);
  return jet;
}

void JetBatchEvaluator::add_output_adjoint(int point, int output_index,
                                           const JetAdjoint& bar) {
  const int base = point * channels_;
  out_bar_(output_index, base) += bar.value;
  for (int j = 1; j <= order_; ++j)
    out_bar_(output_index, base + j) += kFactorial[j] * bar.dx[j - 1];
  if (with_dt_) out_bar_(output_index, base + order_ + 1) += bar.dt;
}

template <int K, bool DT>
void JetBatchEvaluator::backward_impl(GradAccumulator& grad) {
  constexpr int C = K + 1 + (DT ? 1 : 0);
  const int cols = C * count_;
  const int hidden = params_.layer_count() - 1;

  const Eigen::MatrixXd* cur_bar = &out_bar_;
  for (int l = hidden; l >= 0; --l) {
    const Eigen::MatrixXd& a_prev = (l == 0) ? input_ : act_[l - 1];
    grad.w_bar[l].noalias() += (*cur_bar) * a_prev.transpose();
    const int w = int(params_.weights[l].rows());
    Eigen::Map<const Eigen::MatrixXd, 0, Eigen::OuterStride<>> zb0(
        cur_bar->data(), w, count_, Eigen::OuterStride<>(Eigen::Index(C) * w));
    grad.b_bar[l].noalias() += zb0.rowwise().sum();
    if (l == 0) break;

    const int pw = int(params_.weights[l].cols());
    Eigen::MatrixXd& abar = scratch_[l % 2];
    abar.resize(pw, cols);
    abar.noalias() = params_.weights[l].transpose() * (*cur_bar);
    // reverse through the tanh of layer l-1, in place over abar
    Eigen::MatrixXd& zbar = abar;
    if constexpr (C == 1) {
      zbar.array() = abar.array() * (1.0 - act_[l - 1].array().square());
    } else {
      for (int p = 0; p < count_; ++p) {
        const Eigen::Index off = Eigen::Index(p) * C * pw;
        tanh_channels_vjp<K, DT>(pre_[l - 1].data() + off, act_[l - 1].data() + off,
                                 abar.data() + off, zbar.data() + off, pw, pw);
      }
    }
    cur_bar = &zbar;
  }
  out_bar_.setZero();
}

void JetBatchEvaluator::backward(GradAccumulator& grad) {
  switch (order_ * 2 + (with_dt_ ? 1 : 0)) {
    case 0: return backward_impl<0, false>(grad);
    case 1: return backward_impl<0, true>(grad);
    case 2: return backward_impl<1, false>(grad);
    case 3: return backward_impl<1, true>(grad);
    case 4: return backward_impl<2, false>(grad);
    case 5: return backward_impl<2, true>(grad);
    case 6: return backward_impl<3, false>(grad);
    case 7: return backward_impl<3, true>(grad);
    case 8: return backward_impl<4, false>(grad);
    case 9: return backward_impl<4, true>(grad);
    default: throw std::logic_error("unreachable");
  }
}

std::vector<Jet> eval_jet(const MlpParameters& params, const DomainBox& box, double x,
                          double t, int spatial_order, bool with_dt) {
  if (spatial_order < 0 || spatial_order > kMaxSpatialOrder)
    throw std::invalid_argument("eval_jet: unsupported spatial order " +
                                std::to_string(spatial_order));
  JetBatchEvaluator eval(params, box);
  eval.forward(&x, &t, 1, spatial_order, with_dt);
  std::vector<Jet> jets;
  jets.reserve(params.output_width());
  for (int o = 0; o < params.output_width(); ++o) jets.push_back(eval.output_jet(0, o));
  return jets;
}

Eigen::MatrixXd batch_values(const MlpParameters& params, const DomainBox& box,
                             const double* xs, const double* ts, Eigen::Index n) {
  Eigen::MatrixXd values(n, params.output_width());
  JetBatchEvaluator eval(params, box);
  for (Eigen::Index off = 0; off < n; off += kBatchBlockPoints) {
    const int chunk = int(std::min<Eigen::Index>(kBatchBlockPoints, n - off));
    eval.forward(xs + off, ts + off, chunk, 0, false);
    for (int p = 0; p < chunk; ++p)
      for (int o = 0; o < params.output_width(); ++o)
        values(off + p, o) = eval.output_jet(p, o).value;
  }
  return values;
}

bool LossBreakdown::finite() const {
  return std::isfinite(mse_i) && std::isfinite(mse_b) && std::isfinite(mse_r) &&
         std::isfinite(mse_s);
}

std::pair<double, GradientVector> loss_gradient(const LossObjective& objective,
                                                const Eigen::VectorXd& theta) {
  GradientVector grad = GradientVector::Zero(theta.size());
  const LossBreakdown loss = objective(theta, &grad);
  if (!loss.finite()) throw NonFiniteLossError("total loss");
  return {loss.total(), std::move(grad)};
}

}  // namespace bcpinn
