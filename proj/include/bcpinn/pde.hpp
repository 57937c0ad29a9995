#pragma once

#include <Eigen/Dense>
#include <utility>

#include "bcpinn/autodiff.hpp"

namespace bcpinn {

struct AllenCahnParams {
  double c1_sq = 1e-4;  // interface parameter
  double c2 = 5.0;      // reaction coefficient, f(h) = c2 (h^3 - h)
};

struct CahnHilliardParams {
  double alpha = 0.02;  // surface tension
  double kappa = 1.0;   // mobility, f(h) = h (h^2 - 1)
};

enum class PdeKind {
  AllenCahn,               // 2nd order, one field
  CahnHilliard4,           // 4th order, one field
  CahnHilliardPhaseSpace,  // two coupled 2nd-order fields (h, mu)
};

struct PdeProblem {
  PdeKind kind = PdeKind::AllenCahn;
  AllenCahnParams ac;
  CahnHilliardParams ch;
  int boundary_order = 2;  // n_d, highest derivative with enforced periodicity

  static PdeProblem allen_cahn(AllenCahnParams p = {}, int n_d = 2);
  static PdeProblem cahn_hilliard4(CahnHilliardParams p = {}, int n_d = 2);
  static PdeProblem cahn_hilliard_phase_space(CahnHilliardParams p = {}, int n_d = 1);

  int output_width() const { return kind == PdeKind::CahnHilliardPhaseSpace ? 2 : 1; }
  int residual_spatial_order() const { return kind == PdeKind::CahnHilliard4 ? 4 : 2; }
  const char* name() const;
  void validate() const;
};

/// h(x,0) = x^2 cos(pi x)
double ac_initial(double x);

/// h(x,0) = cos(pi x) - exp(-4 (pi x)^2); mu(x,0) is its analytic second
/// derivative.
std::pair<double, double> ch_initial(double x);

/// R = h_t - c1^2 h_xx + c2 (h^3 - h). Requires order >= 2 with dt.
double ac_residual(const Jet& h, const AllenCahnParams& p);
void ac_residual_vjp(const Jet& h, const AllenCahnParams& p, double r_bar,
                     JetAdjoint& h_bar);

/// Phase-space residuals:
///   R1 = h_t - (-alpha kappa mu_xx + kappa (f''(h) h_x^2 + f'(h) h_xx))
///   R2 = mu - h_xx
/// with f(h) = h^3 - h. Requires both jets of order >= 2, h with dt.
std::pair<double, double> ch_phase_residuals(const Jet& h, const Jet& mu,
                                             const CahnHilliardParams& p);
void ch_phase_residuals_vjp(const Jet& h, const Jet& mu, const CahnHilliardParams& p,
                            double r1_bar, double r2_bar, JetAdjoint& h_bar,
                            JetAdjoint& mu_bar);

/// Fourth-order form: R = h_t + alpha kappa h_xxxx - kappa (f''(h) h_x^2 +
/// f'(h) h_xx). Requires order 4 with dt.
double ch4_residual(const Jet& h, const CahnHilliardParams& p);
void ch4_residual_vjp(const Jet& h, const CahnHilliardParams& p, double r_bar,
                      JetAdjoint& h_bar);

/// Free-energy diagnostic 1/2 int |grad h|^2 + (1/c1^2) int F(h) with
/// F(h) = 5 (h^2-1)^2 / 4, on a uniform periodic grid (spectral gradient,
/// trapezoidal quadrature).
double free_energy(const Eigen::VectorXd& h, double c1_sq, double domain_length = 2.0);

}  // namespace bcpinn
