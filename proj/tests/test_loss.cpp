#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "bcpinn/loss.hpp"

using namespace bcpinn;

namespace {
const DomainBox kBox(-1.0, 1.0, 0.0, 1.0);

MlpParameters constant_net(double value, int outputs = 1) {
  MlpParameters p = xavier_init({2, 4, outputs}, 1);
  for (auto& w : p.weights) w.setZero();
  for (auto& b : p.biases) b.setZero();
  p.biases.back().setConstant(value);
  return p;
}
}  // namespace

TEST_CASE("initial loss of the zero network against the Allen-Cahn IC") {
  const auto p = constant_net(0.0);
  const Eigen::VectorXd x = uniform_grid(-1.0, 1.0, 512);
  Eigen::MatrixXd targets(512, 1);
  for (int i = 0; i < 512; ++i) targets(i, 0) = ac_initial(x[i]);

  // direct-summation oracle on the same grid
  double direct = 0.0;
  for (int i = 0; i < 512; ++i) direct += targets(i, 0) * targets(i, 0);
  direct /= 512.0;

  const double value = mse_initial(p, kBox, x, targets);
  CHECK(value == doctest::Approx(direct).epsilon(1e-13));
  // closed form 1/5 + 1/pi^2 - 3/(2 pi^4) over the unit-density domain
  CHECK(value == doctest::Approx(0.142961).epsilon(1e-4));
}

TEST_CASE("initial loss of perfect and offset fits") {
  const auto fit = constant_net(0.75);
  Eigen::VectorXd x(3);
  x << -0.5, 0.1, 0.8;
  Eigen::MatrixXd targets = Eigen::MatrixXd::Constant(3, 1, 0.75);
  CHECK(mse_initial(fit, kBox, x, targets) == 0.0);

  const auto off = constant_net(1.75);
  CHECK(mse_initial(off, kBox, x, targets) == doctest::Approx(1.0));

  CHECK_THROWS_AS(mse_initial(fit, kBox, Eigen::VectorXd(), Eigen::MatrixXd()),
                  std::invalid_argument);
}

TEST_CASE("two-field initial loss shares the single 1/N factor") {
  const auto p = constant_net(0.0, 2);
  Eigen::VectorXd x(4);
  x << -0.5, 0.0, 0.25, 0.75;
  Eigen::MatrixXd targets(4, 2);
  targets.col(0).setConstant(1.0);
  targets.col(1).setConstant(2.0);
  // sum of the h and mu squared mismatches over N: (1 + 4)
  CHECK(mse_initial(p, kBox, x, targets) == doctest::Approx(5.0));
}

TEST_CASE("boundary mismatch of hand-built jets") {
  Jet plus, minus;
  plus.order = minus.order = 1;
  plus.value = 1.0;
  plus.dx[0] = 2.0;  // h = x^2 at x=+1
  minus.value = 1.0;
  minus.dx[0] = -2.0;  // and at x=-1
  CHECK(boundary_pair_mismatch(plus, minus, 1) == doctest::Approx(0.0));
  CHECK(boundary_pair_mismatch(plus, minus, 2) == doctest::Approx(16.0));
  CHECK_THROWS_AS(boundary_pair_mismatch(plus, minus, 3), std::invalid_argument);
}

TEST_CASE("boundary loss vanishes for constant networks") {
  const auto p = constant_net(4.2);
  Eigen::VectorXd t(5);
  t << 0.1, 0.3, 0.5, 0.7, 0.9;
  CHECK(mse_boundary(p, kBox, t, 1, 1) == 0.0);
  CHECK(mse_boundary(p, kBox, t, 2, 1) == 0.0);
}

TEST_CASE("residual loss on steady states and a unit residual") {
  Eigen::VectorXd x(1), t(1);
  x << 0.3;
  t << 0.4;

  // steady state h = 1 for the Allen-Cahn reaction
  CHECK(mse_residual(constant_net(1.0), kBox, PdeProblem::allen_cahn(), x, t) ==
        doctest::Approx(0.0));

  // constant h = 2 with c2 = 1/6 gives R = (2^3 - 2)/6 = 1 exactly
  const auto problem = PdeProblem::allen_cahn({1.0, 1.0 / 6.0});
  const auto p = constant_net(2.0);
  CHECK(mse_residual(p, kBox, problem, x, t, false) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mse_residual(p, kBox, problem, x, t, true) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));

  // zero residual: the log variant is exactly zero too
  CHECK(mse_residual(constant_net(1.0), kBox, PdeProblem::allen_cahn(), x, t, true) ==
        doctest::Approx(0.0));
}

TEST_CASE("log-residual never exceeds the plain residual") {
  const auto p = xavier_init({2, 16, 16, 1}, 99);
  const auto problem = PdeProblem::allen_cahn();
  const auto pts = latin_hypercube(64, {{-1.0, 1.0}, {0.0, 1.0}}, 5);
  const Eigen::VectorXd x = pts.col(0), t = pts.col(1);
  const double plain = mse_residual(p, kBox, problem, x, t, false);
  const double logv = mse_residual(p, kBox, problem, x, t, true);
  CHECK(logv <= plain);
  CHECK(logv > 0.0);
}

TEST_CASE("compat loss against stored values") {
  Eigen::VectorXd x(4), t(4);
  x << -1.0, -0.5, 0.0, 0.5;
  t.setConstant(0.1);

  // stored zeros against a constant-2 network
  const Eigen::VectorXd zeros = Eigen::VectorXd::Zero(4);
  CHECK(mse_compat(constant_net(2.0), kBox, x, t, zeros) == doctest::Approx(4.0));

  // empty set is zero by definition (segment 1)
  CHECK(mse_compat(constant_net(2.0), kBox, {}, {}, {}) == 0.0);

  CHECK_THROWS_AS(mse_compat(constant_net(2.0), kBox, x, t, Eigen::VectorXd::Zero(3)),
                  std::invalid_argument);
}

TEST_CASE("total loss is the plain sum of its components") {
  const auto p = xavier_init({2, 12, 12, 1}, 4242);
  const auto problem = PdeProblem::allen_cahn();
  SegmentSchedule schedule;
  schedule.n_initial = 32;
  schedule.n_boundary = 8;
  schedule.n_collocation = 24;
  schedule.segments = 2;
  schedule.steps_per_segment = 100;
  auto sets = build_segment_sets(schedule, problem, kBox, 2, 21);
  sets.compat_x = sets.compat_x.head(40).eval();
  sets.compat_t = sets.compat_t.head(40).eval();
  const Eigen::VectorXd stored = Eigen::VectorXd::Constant(40, 0.2);

  const LossBreakdown b = total_loss(p, kBox, problem, sets, stored, {false});
  const double i = mse_initial(p, kBox, sets.initial_x, sets.initial_targets);
  const double bo = mse_boundary(p, kBox, sets.boundary_t, problem.boundary_order, 1);
  const double r = mse_residual(p, kBox, problem, sets.colloc_x, sets.colloc_t, false);
  const double s = mse_compat(p, kBox, sets.compat_x, sets.compat_t, stored);

  CHECK(b.mse_i == doctest::Approx(i).epsilon(1e-15));
  CHECK(b.mse_b == doctest::Approx(bo).epsilon(1e-15));
  CHECK(b.mse_r == doctest::Approx(r).epsilon(1e-15));
  CHECK(b.mse_s == doctest::Approx(s).epsilon(1e-15));
  CHECK(b.total() == doctest::Approx(i + bo + r + s).epsilon(1e-15));
  CHECK(b.mse_i >= 0.0);
  CHECK(b.mse_b >= 0.0);
  CHECK(b.mse_r >= 0.0);
  CHECK(b.mse_s >= 0.0);
}

TEST_CASE("identical inputs give bit-identical losses; permutations only round") {
  const auto p = xavier_init({2, 16, 16, 1}, 606);
  const auto problem = PdeProblem::allen_cahn();
  const auto pts = latin_hypercube(256, {{-1.0, 1.0}, {0.0, 1.0}}, 50);
  Eigen::VectorXd x = pts.col(0), t = pts.col(1);

  const double a = mse_residual(p, kBox, problem, x, t);
  const double b = mse_residual(p, kBox, problem, x, t);
  CHECK(a == b);

  std::vector<int> idx(256);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), std::mt19937_64(3));
  Eigen::VectorXd xp(256), tp(256);
  for (int i = 0; i < 256; ++i) {
    xp[i] = x[idx[i]];
    tp[i] = t[idx[i]];
  }
  const double c = mse_residual(p, kBox, problem, xp, tp);
  CHECK(c == doctest::Approx(a).epsilon(1e-12));
}

TEST_CASE("phase-space residual loss sums both component means") {
  // constant fields: h = 0, mu = c. R1 = 0, R2 = c, so the loss is c^2.
  const auto p = constant_net(0.0, 2);
  auto q = p;
  q.biases.back()[1] = 3.0;
  Eigen::VectorXd x(2), t(2);
  x << -0.4, 0.6;
  t << 0.2, 0.8;
  const auto problem = PdeProblem::cahn_hilliard_phase_space();
  CHECK(mse_residual(q, kBox, problem, x, t) == doctest::Approx(9.0).epsilon(1e-12));
}

TEST_CASE("non-finite parameters surface as a diagnostic") {
  auto p = constant_net(0.0);
  p.biases.back()[0] = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd x(1), t(1);
  x << 0.0;
  t << 0.5;
  CHECK_THROWS_AS(mse_residual(p, kBox, PdeProblem::allen_cahn(), x, t),
                  NonFiniteLossError);
}
