#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bcpinn/pde.hpp"

using namespace bcpinn;

namespace {
constexpr double kPi = std::numbers::pi;

Jet make_jet(double value, double dx1 = 0, double dx2 = 0, double dx3 = 0,
             double dx4 = 0, double dt = 0, int order = 4, bool has_dt = true) {
  Jet j;
  j.value = value;
  j.dx = {dx1, dx2, dx3, dx4};
  j.dt = dt;
  j.order = order;
  j.has_dt = has_dt;
  return j;
}
}  // namespace

TEST_CASE("Allen-Cahn initial condition") {
  CHECK(ac_initial(0.0) == 0.0);
  CHECK(ac_initial(1.0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(ac_initial(0.5) == doctest::Approx(0.0));
  CHECK(ac_initial(-0.5) == doctest::Approx(0.0));
}

TEST_CASE("Cahn-Hilliard initial condition and its analytic curvature") {
  const auto [h0_0, mu0_0] = ch_initial(0.0);
  CHECK(h0_0 == doctest::Approx(0.0));
  CHECK(mu0_0 == doctest::Approx(7.0 * kPi * kPi).epsilon(1e-12));  // 69.0873...

  const auto [h0_1, mu0_1] = ch_initial(1.0);
  CHECK(h0_1 == doctest::Approx(-1.0).epsilon(1e-7));
  CHECK(std::abs(h0_1 + 1.0) < 1e-10);  // exp(-4 pi^2) ~ 7e-18

  // mu0 is the second derivative of h0: check against finite differences
  for (double x : {-0.73, -0.2, 0.11, 0.64}) {
    const double h = 1e-5;
    const double fd =
        (ch_initial(x + h).first - 2.0 * ch_initial(x).first + ch_initial(x - h).first) /
        (h * h);
    CHECK(ch_initial(x).second == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("Allen-Cahn residual on reference jets") {
  const AllenCahnParams p;
  CHECK(ac_residual(make_jet(1.0), p) == doctest::Approx(0.0));
  CHECK(ac_residual(make_jet(0.0), p) == doctest::Approx(0.0));
  CHECK(ac_residual(make_jet(-1.0), p) == doctest::Approx(0.0));
  // h(x,t) = t at t=0: value 0, dt 1, spatial derivatives 0
  CHECK(ac_residual(make_jet(0.0, 0, 0, 0, 0, 1.0), p) == doctest::Approx(1.0));

  Jet low = make_jet(0.0);
  low.order = 1;
  CHECK_THROWS_AS(ac_residual(low, p), std::invalid_argument);
  Jet no_dt = make_jet(0.0);
  no_dt.has_dt = false;
  CHECK_THROWS_AS(ac_residual(no_dt, p), std::invalid_argument);
}

TEST_CASE("phase-space residuals on reference jets") {
  const CahnHilliardParams p;
  {
    const auto [r1, r2] = ch_phase_residuals(make_jet(1.0), make_jet(0.0), p);
    CHECK(r1 == doctest::Approx(0.0));
    CHECK(r2 == doctest::Approx(0.0));
  }
  {
    const auto [r1, r2] = ch_phase_residuals(make_jet(0.0), make_jet(3.5), p);
    CHECK(r2 == doctest::Approx(3.5));
  }
  {
    // h = cos(pi x), mu = -pi^2 cos(pi x) at x=0, frozen in time; the hand
    // expansion of grad^2(-alpha kappa mu + kappa f(h)) gives
    // R1 = alpha kappa pi^4 + 2 kappa pi^2
    const Jet h = make_jet(1.0, 0.0, -kPi * kPi, 0, 0, 0.0);
    const Jet mu = make_jet(-kPi * kPi, 0.0, kPi * kPi * kPi * kPi);
    const auto [r1, r2] = ch_phase_residuals(h, mu, p);
    const double expected = p.alpha * p.kappa * std::pow(kPi, 4) + 2.0 * p.kappa * kPi * kPi;
    CHECK(r1 == doctest::Approx(expected).epsilon(1e-12));  // 21.6874...
    CHECK(r2 == doctest::Approx(0.0));
  }
  // R2 vanishes whenever mu equals the curvature of h
  for (double hxx : {-3.0, 0.25, 11.0}) {
    const auto [r1, r2] =
        ch_phase_residuals(make_jet(0.3, 0.7, hxx), make_jet(hxx, 1.0, -2.0), p);
    (void)r1;
    CHECK(r2 == 0.0);
  }
}

TEST_CASE("fourth-order residual on reference jets") {
  const CahnHilliardParams p;
  CHECK(ch4_residual(make_jet(-1.0), p) == doctest::Approx(0.0));
  CHECK(ch4_residual(make_jet(0.0), p) == doctest::Approx(0.0));
  CHECK(ch4_residual(make_jet(1.0), p) == doctest::Approx(0.0));
  // h(x,t) = t at t=0
  CHECK(ch4_residual(make_jet(0.0, 0, 0, 0, 0, 1.0), p) == doctest::Approx(1.0));
  // h = x^2/2 frozen in time, at x=0: h_xx=1, f'(0) = -1
  CHECK(ch4_residual(make_jet(0.0, 0.0, 1.0, 0.0, 0.0, 0.0), p) == doctest::Approx(1.0));

  Jet low = make_jet(0.0);
  low.order = 3;
  CHECK_THROWS_AS(ch4_residual(low, p), std::invalid_argument);
}

TEST_CASE("residual cotangents match finite differences through the jets") {
  const AllenCahnParams ac;
  const CahnHilliardParams ch;
  const Jet h = make_jet(0.42, -1.3, 2.1, 0.7, -0.9, 0.31);
  const Jet mu = make_jet(-5.0, 0.4, 1.9, 0, 0, 0);

  auto probe = [](Jet j, int slot, double d) {
    if (slot == 0)
      j.value += d;
    else if (slot <= 4)
      j.dx[slot - 1] += d;
    else
      j.dt += d;
    return j;
  };
  const double eps = 1e-7;

  JetAdjoint hb{};
  ac_residual_vjp(h, ac, 1.0, hb);
  for (int slot : {0, 2, 5}) {
    const double fd = (ac_residual(probe(h, slot, eps), ac) -
                       ac_residual(probe(h, slot, -eps), ac)) /
                      (2 * eps);
    const double an = slot == 0 ? hb.value : (slot == 5 ? hb.dt : hb.dx[slot - 1]);
    CHECK(an == doctest::Approx(fd).epsilon(1e-6));
  }

  JetAdjoint hb4{};
  ch4_residual_vjp(h, ch, 1.0, hb4);
  for (int slot : {0, 1, 2, 4, 5}) {
    const double fd = (ch4_residual(probe(h, slot, eps), ch) -
                       ch4_residual(probe(h, slot, -eps), ch)) /
                      (2 * eps);
    const double an = slot == 0 ? hb4.value : (slot == 5 ? hb4.dt : hb4.dx[slot - 1]);
    CHECK(an == doctest::Approx(fd).epsilon(1e-6));
  }

  JetAdjoint hbp{}, mbp{};
  ch_phase_residuals_vjp(h, mu, ch, 1.0, 0.5, hbp, mbp);
  for (int slot : {0, 1, 2, 5}) {
    auto f = [&](const Jet& hh, const Jet& mm) {
      const auto [r1, r2] = ch_phase_residuals(hh, mm, ch);
      return r1 + 0.5 * r2;
    };
    const double fd_h = (f(probe(h, slot, eps), mu) - f(probe(h, slot, -eps), mu)) / (2 * eps);
    const double an_h = slot == 0 ? hbp.value : (slot == 5 ? hbp.dt : hbp.dx[slot - 1]);
    CHECK(an_h == doctest::Approx(fd_h).epsilon(1e-6));
    if (slot != 5) {
      const double fd_m = (f(h, probe(mu, slot, eps)) - f(h, probe(mu, slot, -eps))) / (2 * eps);
      const double an_m = slot == 0 ? mbp.value : mbp.dx[slot - 1];
      CHECK(an_m == doctest::Approx(fd_m).epsilon(1e-6));
    }
  }
}

TEST_CASE("free energy of constant states") {
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(512);
  CHECK(free_energy(ones, 1e-4) == doctest::Approx(0.0));
  const Eigen::VectorXd zeros = Eigen::VectorXd::Zero(512);
  // (1/c1^2) * F(0) * |domain| = 2.5 / c1^2
  CHECK(free_energy(zeros, 1e-4) == doctest::Approx(2.5e4).epsilon(1e-12));
  CHECK(free_energy(zeros, 0.01) == doctest::Approx(250.0).epsilon(1e-12));
}

TEST_CASE("problem validation") {
  CHECK_THROWS_AS(PdeProblem::allen_cahn({-1.0, 5.0}), std::invalid_argument);
  CHECK_THROWS_AS(PdeProblem::cahn_hilliard_phase_space({0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(PdeProblem::allen_cahn({}, 3), std::invalid_argument);
  CHECK(PdeProblem::allen_cahn().output_width() == 1);
  CHECK(PdeProblem::cahn_hilliard_phase_space().output_width() == 2);
  CHECK(PdeProblem::cahn_hilliard_phase_space().boundary_order == 1);
  CHECK(PdeProblem::cahn_hilliard4().residual_spatial_order() == 4);
}
