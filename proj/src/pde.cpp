#include "bcpinn/pde.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "fft_util.hpp"

namespace bcpinn {

namespace {
constexpr double kPi = std::numbers::pi;

void require_jet(const Jet& jet, int order, bool needs_dt, const char* who) {
  if (jet.order < order)
    throw std::invalid_argument(std::string(who) + ": jet order " +
                                std::to_string(jet.order) + " below required " +
                                std::to_string(order));
  if (needs_dt && !jet.has_dt)
    throw std::invalid_argument(std::string(who) + ": jet lacks the time derivative");
}
}  // namespace

PdeProblem PdeProblem::allen_cahn(AllenCahnParams p, int n_d) {
  PdeProblem prob;
  prob.kind = PdeKind::AllenCahn;
  prob.ac = p;
  prob.boundary_order = n_d;
  prob.validate();
  return prob;
}

PdeProblem PdeProblem::cahn_hilliard4(CahnHilliardParams p, int n_d) {
  PdeProblem prob;
  prob.kind = PdeKind::CahnHilliard4;
  prob.ch = p;
  prob.boundary_order = n_d;
  prob.validate();
  return prob;
}

PdeProblem PdeProblem::cahn_hilliard_phase_space(CahnHilliardParams p, int n_d) {
  PdeProblem prob;
  prob.kind = PdeKind::CahnHilliardPhaseSpace;
  prob.ch = p;
  prob.boundary_order = n_d;
  prob.validate();
  return prob;
}

const char* PdeProblem::name() const {
  switch (kind) {
    case PdeKind::AllenCahn: return "allen_cahn";
    case PdeKind::CahnHilliard4: return "cahn_hilliard4";
    case PdeKind::CahnHilliardPhaseSpace: return "cahn_hilliard_phase_space";
  }
  return "?";
}

void PdeProblem::validate() const {
  if (boundary_order < 1 || boundary_order > 2)
    throw std::invalid_argument("PdeProblem: boundary order must be 1 or 2");
  if (kind == PdeKind::AllenCahn && !(ac.c1_sq > 0))
    throw std::invalid_argument("PdeProblem: c1_sq must be positive");
  if (kind != PdeKind::AllenCahn && !(ch.alpha > 0 && ch.kappa > 0))
    throw std::invalid_argument("PdeProblem: alpha and kappa must be positive");
}

double ac_initial(double x) { return x * x * std::cos(kPi * x); }

std::pair<double, double> ch_initial(double x) {
  const double g = 4.0 * kPi * kPi;  // exponent coefficient
  const double e = std::exp(-g * x * x);
  const double h0 = std::cos(kPi * x) - e;
  // analytic second derivative of h0
  const double mu0 = -kPi * kPi * std::cos(kPi * x) +
                     (8.0 * kPi * kPi - 64.0 * std::pow(kPi, 4) * x * x) * e;
  return {h0, mu0};
}

double ac_residual(const Jet& h, const AllenCahnParams& p) {
  require_jet(h, 2, true, "ac_residual");
  const double v = h.value;
  return h.dt - p.c1_sq * h.dx[1] + p.c2 * (v * v * v - v);
}

void ac_residual_vjp(const Jet& h, const AllenCahnParams& p, double r_bar,
                     JetAdjoint& h_bar) {
  const double v = h.value;
  h_bar.dt += r_bar;
  h_bar.dx[1] += -p.c1_sq * r_bar;
  h_bar.value += r_bar * p.c2 * (3.0 * v * v - 1.0);
}

std::pair<double, double> ch_phase_residuals(const Jet& h, const Jet& mu,
                                             const CahnHilliardParams& p) {
  require_jet(h, 2, true, "ch_phase_residuals(h)");
  require_jet(mu, 2, false, "ch_phase_residuals(mu)");
  const double v = h.value, hx = h.dx[0], hxx = h.dx[1];
  const double r1 = h.dt + p.alpha * p.kappa * mu.dx[1] -
                    p.kappa * (6.0 * v * hx * hx + (3.0 * v * v - 1.0) * hxx);
  const double r2 = mu.value - hxx;
  return {r1, r2};
}

void ch_phase_residuals_vjp(const Jet& h, [[maybe_unused]] const Jet& mu,
                            const CahnHilliardParams& p, double r1_bar, double r2_bar,
                            JetAdjoint& h_bar, JetAdjoint& mu_bar) {
  const double v = h.value, hx = h.dx[0], hxx = h.dx[1];
  const double k = p.kappa;
  h_bar.dt += r1_bar;
  mu_bar.dx[1] += r1_bar * p.alpha * k;
  h_bar.value += r1_bar * (-k) * (6.0 * hx * hx + 6.0 * v * hxx);
  h_bar.dx[0] += r1_bar * (-k) * (12.0 * v * hx);
  h_bar.dx[1] += r1_bar * (-k) * (3.0 * v * v - 1.0) - r2_bar;
  mu_bar.value += r2_bar;
}

double ch4_residual(const Jet& h, const CahnHilliardParams& p) {
  require_jet(h, 4, true, "ch4_residual");
  const double v = h.value, hx = h.dx[0], hxx = h.dx[1];
  return h.dt + p.alpha * p.kappa * h.dx[3] -
         p.kappa * (6.0 * v * hx * hx + (3.0 * v * v - 1.0) * hxx);
}

void ch4_residual_vjp(const Jet& h, const CahnHilliardParams& p, double r_bar,
                      JetAdjoint& h_bar) {
  const double v = h.value, hx = h.dx[0], hxx = h.dx[1];
  const double k = p.kappa;
  h_bar.dt += r_bar;
  h_bar.dx[3] += r_bar * p.alpha * k;
  h_bar.value += r_bar * (-k) * (6.0 * hx * hx + 6.0 * v * hxx);
  h_bar.dx[0] += r_bar * (-k) * (12.0 * v * hx);
  h_bar.dx[1] += r_bar * (-k) * (3.0 * v * v - 1.0);
}

double free_energy(const Eigen::VectorXd& h, double c1_sq, double domain_length) {
  const int n = int(h.size());
  detail::RealFft fft(n);
  std::vector<std::complex<double>> spec(fft.spectrum_size());
  fft.forward(h.data(), spec.data());
  for (int i = 0; i < fft.spectrum_size(); ++i) {
    const double k = 2.0 * kPi * i / domain_length;
    spec[i] *= std::complex<double>(0.0, k);
  }
  if (n % 2 == 0) spec[n / 2] = 0.0;  // odd derivative kills the Nyquist mode
  Eigen::VectorXd hx(n);
  fft.inverse(spec.data(), hx.data());

  const double dx = domain_length / n;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double fh = 5.0 * (h[i] * h[i] - 1.0) * (h[i] * h[i] - 1.0) / 4.0;
    acc += 0.5 * hx[i] * hx[i] + fh / c1_sq;
  }
  return acc * dx;
}

}  // namespace bcpinn
