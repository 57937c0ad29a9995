#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <string>

#include "bcpinn/pde.hpp"

namespace bcpinn {

/// Reference solution on a uniform periodic grid (endpoint excluded) with
/// uniformly spaced snapshots.
struct ReferenceSolution {
  Eigen::VectorXd x;  // nx nodes
  Eigen::VectorXd t;  // nt snapshot times
  Eigen::MatrixXd h;  // nt x nx, row per snapshot
};

struct OracleOptions {
  int nx = 512;
  double dt = 1e-5;
  int snapshots = 201;
  double t_final = 1.0;
  double x_min = -1.0;
  double x_max = 1.0;
  double blowup_threshold = 10.0;
  std::function<double(double)> initial_override;  // replaces the problem IC
};

class OracleBlowupError : public std::runtime_error {
 public:
  OracleBlowupError(double time, double amplitude);
  double time() const { return time_; }

 private:
  double time_;
};

/// Fourier pseudospectral ETDRK4 integration of the Allen-Cahn or
/// Cahn-Hilliard problem (both Cahn-Hilliard forms share one reference).
/// The stiff linear symbol is treated exactly; the nonlinear part is
/// dealiased with the 2/3 rule; the ETDRK4 scalar coefficients come from a
/// 32-point complex contour mean.
ReferenceSolution solve_reference(const PdeProblem& problem,
                                  const OracleOptions& options = {});

/// u_t = c_sq u_xx with u(x,0) = cos(pi x); validation problem with a known
/// analytic decay.
ReferenceSolution solve_linear_heat(double c_sq, const OracleOptions& options = {});

/// Binary format: magic "BCPN", version u32, nx u32, nt u32, x grid, t grid,
/// h row-major (t-major), all 64-bit little-endian floats.
void write_reference(const ReferenceSolution& solution, const std::string& path);
ReferenceSolution read_reference(const std::string& path);

/// Long-form CSV export (x,t,h).
void write_reference_csv(const ReferenceSolution& solution, const std::string& path);

}  // namespace bcpinn
