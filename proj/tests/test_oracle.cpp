#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "bcpinn/oracle.hpp"

using namespace bcpinn;

namespace {
constexpr double kPi = std::numbers::pi;

// one full-budget Allen-Cahn reference shared across cases
const ReferenceSolution& ac_reference() {
  static const ReferenceSolution sol = solve_reference(PdeProblem::allen_cahn());
  return sol;
}

// trigonometric interpolation of a periodic sample at an arbitrary x
double trig_interpolate(const Eigen::VectorXd& values, double x, double x_min,
                        double length) {
  const int n = int(values.size());
  std::vector<std::complex<double>> spec(n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      spec[k] += values[j] *
                 std::exp(std::complex<double>(0, -2.0 * kPi * k * j / n));
  std::complex<double> acc = 0.0;
  const double theta = 2.0 * kPi * (x - x_min) / length;
  for (int k = 0; k < n; ++k) {
    const int mode = k <= n / 2 ? k : k - n;  // signed frequency
    const double w = (k == n / 2) ? 0.5 : 1.0;
    acc += w * spec[k] * std::exp(std::complex<double>(0, mode * theta));
    if (k == n / 2) acc += 0.5 * spec[k] * std::exp(std::complex<double>(0, -mode * theta));
  }
  return acc.real() / n;
}
}  // namespace

TEST_CASE("zero initial condition stays identically zero") {
  OracleOptions opt;
  opt.dt = 1e-4;
  opt.snapshots = 11;
  opt.t_final = 0.1;
  opt.initial_override = [](double) { return 0.0; };
  const auto sol = solve_reference(PdeProblem::allen_cahn(), opt);
  CHECK(sol.h.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("linear heat decay matches the analytic amplitude") {
  OracleOptions opt;
  opt.dt = 1e-4;  // exact for a pure linear problem at any step
  const auto sol = solve_linear_heat(1e-4, opt);
  const double expected = std::exp(-1e-4 * kPi * kPi);
  // x = 0 is grid index nx/2
  CHECK(std::abs(sol.h(200, 256) - expected) < 1e-8);
  // full-profile check at the final time
  for (int i = 0; i < 512; ++i)
    CHECK(std::abs(sol.h(200, i) - expected * std::cos(kPi * sol.x[i])) < 1e-8);
}

TEST_CASE("Allen-Cahn self-convergence at fourth order") {
  // steps chosen so truncation error sits well above the roundoff floor
  OracleOptions coarse;
  coarse.t_final = 0.2;
  coarse.snapshots = 2;
  coarse.dt = 4e-3;
  OracleOptions mid = coarse;
  mid.dt = 2e-3;
  OracleOptions fine = coarse;
  fine.dt = 1e-3;

  const auto problem = PdeProblem::allen_cahn();
  const auto a = solve_reference(problem, coarse);
  const auto b = solve_reference(problem, mid);
  const auto c = solve_reference(problem, fine);
  const double d1 = (a.h - b.h).cwiseAbs().maxCoeff();
  const double d2 = (b.h - c.h).cwiseAbs().maxCoeff();
  const double order = std::log2(d1 / d2);
  CHECK(order > 3.5);
  CHECK(order < 4.5);
}

TEST_CASE("Allen-Cahn consecutive-step agreement near the production step" *
          doctest::skip(false)) {
  OracleOptions a;
  a.t_final = 1.0;
  a.snapshots = 201;
  a.dt = 1e-5;
  OracleOptions b = a;
  b.dt = 5e-6;
  const auto problem = PdeProblem::allen_cahn();
  const auto va = solve_reference(problem, a);
  const auto vb = solve_reference(problem, b);
  CHECK((va.h - vb.h).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("Cahn-Hilliard conserves the spatial mean") {
  OracleOptions opt;
  opt.t_final = 0.05;
  opt.snapshots = 11;
  opt.dt = 1e-5;
  const auto sol = solve_reference(PdeProblem::cahn_hilliard_phase_space(), opt);
  const double mean0 = sol.h.row(0).mean();
  for (int r = 1; r < sol.h.rows(); ++r)
    CHECK(std::abs(sol.h.row(r).mean() - mean0) < 1e-8);
}

TEST_CASE("Allen-Cahn free energy decreases along the flow") {
  const auto& sol = ac_reference();
  double prev = free_energy(sol.h.row(0).transpose(), 1e-4);
  int violations = 0;
  for (int r = 1; r < sol.h.rows(); ++r) {
    const double e = free_energy(sol.h.row(r).transpose(), 1e-4);
    if (e > prev + 1e-10 * std::abs(prev)) ++violations;
    prev = e;
  }
  CHECK(violations == 0);

  const double e_01 = free_energy(sol.h.row(20).transpose(), 1e-4);   // t = 0.1
  const double e_05 = free_energy(sol.h.row(100).transpose(), 1e-4);  // t = 0.5
  CHECK(e_05 < e_01);
}

TEST_CASE("spectral solution is periodic under trigonometric interpolation") {
  const auto& sol = ac_reference();
  for (int r : {0, 100, 200}) {
    const double at_one = trig_interpolate(sol.h.row(r).transpose(), 1.0, -1.0, 2.0);
    CHECK(std::abs(at_one - sol.h(r, 0)) < 1e-6);
  }
}

TEST_CASE("solution amplitude stays physical") {
  const auto& sol = ac_reference();
  CHECK(sol.h.cwiseAbs().maxCoeff() < 1.05);
}

TEST_CASE("reference file round-trips bitwise and rejects damage") {
  namespace fs = std::filesystem;
  OracleOptions opt;
  opt.t_final = 0.02;
  opt.snapshots = 5;
  opt.dt = 1e-4;
  opt.nx = 64;
  const auto sol = solve_reference(PdeProblem::allen_cahn(), opt);

  const std::string path = (fs::temp_directory_path() / "bcpinn_ref_test.bin").string();
  write_reference(sol, path);
  const auto back = read_reference(path);
  CHECK(back.x == sol.x);
  CHECK(back.t == sol.t);
  CHECK(back.h == sol.h);

  SUBCASE("truncation") {
    fs::resize_file(path, fs::file_size(path) - 16);
    CHECK_THROWS_WITH_AS(read_reference(path), doctest::Contains("truncated"),
                         std::runtime_error);
  }
  SUBCASE("version bump") {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(4);
    const std::uint32_t bad = 99;
    f.write(reinterpret_cast<const char*>(&bad), 4);
    f.close();
    CHECK_THROWS_WITH_AS(read_reference(path), doctest::Contains("version"),
                         std::runtime_error);
  }
  SUBCASE("bad magic") {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.write("ZZZZ", 4);
    f.close();
    CHECK_THROWS_WITH_AS(read_reference(path), doctest::Contains("magic"),
                         std::runtime_error);
  }
  fs::remove(path);
}

TEST_CASE("csv export is well-formed") {
  namespace fs = std::filesystem;
  OracleOptions opt;
  opt.t_final = 0.01;
  opt.snapshots = 2;
  opt.dt = 1e-4;
  opt.nx = 8;
  const auto sol = solve_reference(PdeProblem::allen_cahn(), opt);
  const std::string path = (fs::temp_directory_path() / "bcpinn_ref_test.csv").string();
  write_reference_csv(sol, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "x,t,h");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 16);
  fs::remove(path);
}

TEST_CASE("blow-up aborts with the offending time") {
  OracleOptions opt;
  opt.t_final = 0.01;
  opt.snapshots = 2;
  opt.dt = 1e-4;
  opt.initial_override = [](double x) { return 100.0 * std::cos(kPi * x); };
  CHECK_THROWS_AS(solve_reference(PdeProblem::allen_cahn(), opt), OracleBlowupError);
}

TEST_CASE("dt must divide the snapshot spacing") {
  OracleOptions opt;
  opt.dt = 3e-4;  // does not divide 0.005
  CHECK_THROWS_AS(solve_reference(PdeProblem::allen_cahn(), opt), std::invalid_argument);
}
