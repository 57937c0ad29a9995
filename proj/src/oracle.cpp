#include "bcpinn/oracle.hpp"

#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <numbers>
#include <vector>

#include "fft_util.hpp"

namespace bcpinn {

namespace {
constexpr double kPi = std::numbers::pi;

enum class Nonlinearity { None, AllenCahnReaction, CahnHilliardFlux };

struct SpectralSetup {
  std::vector<double> linear_symbol;  // L(k) per r2c bin
  Nonlinearity nonlinearity = Nonlinearity::None;
  double c2 = 0.0;     // Allen-Cahn reaction coefficient
  double kappa = 0.0;  // Cahn-Hilliard mobility
  std::vector<double> ic;
};

struct EtdrkCoeffs {
  std::vector<double> E, E2, Q, f1, f2, f3;
};

// Scalar ETDRK4 coefficients per mode, evaluated as the mean over a 32-point
// complex contour around z = dt*L so small-|z| cancellation never surfaces.
EtdrkCoeffs etdrk4_coefficients(const std::vector<double>& symbol, double dt) {
  const int n = int(symbol.size());
  constexpr int M = 32;
  std::array<std::complex<double>, M> ring;
  for (int j = 0; j < M; ++j)
    ring[j] = std::exp(std::complex<double>(0.0, 2.0 * kPi * (j + 0.5) / M));

  EtdrkCoeffs c;
  c.E.resize(n);
  c.E2.resize(n);
  c.Q.resize(n);
  c.f1.resize(n);
  c.f2.resize(n);
  c.f3.resize(n);
  for (int i = 0; i < n; ++i) {
    const double z = dt * symbol[i];
    c.E[i] = std::exp(z);
    c.E2[i] = std::exp(0.5 * z);
    std::complex<double> q = 0, f1 = 0, f2 = 0, f3 = 0;
    for (int j = 0; j < M; ++j) {
      const std::complex<double> lr = z + ring[j];
      const std::complex<double> elr = std::exp(lr);
      const std::complex<double> lr2 = lr * lr;
      const std::complex<double> lr3 = lr2 * lr;
      q += (std::exp(0.5 * lr) - 1.0) / lr;
      f1 += (-4.0 - lr + elr * (4.0 - 3.0 * lr + lr2)) / lr3;
      f2 += (2.0 + lr + elr * (-2.0 + lr)) / lr3;
      f3 += (-4.0 - 3.0 * lr - lr2 + elr * (4.0 - lr)) / lr3;
    }
    c.Q[i] = dt * q.real() / M;
    c.f1[i] = dt * f1.real() / M;
    c.f2[i] = dt * f2.real() / M;
    c.f3[i] = dt * f3.real() / M;
  }
  return c;
}

ReferenceSolution integrate(const SpectralSetup& setup, const OracleOptions& opt) {
  const int nx = opt.nx;
  const int nt = opt.snapshots;
  const double length = opt.x_max - opt.x_min;
  const double snap_dt = opt.t_final / (nt - 1);
  const long steps_per_snap = std::lround(snap_dt / opt.dt);
  if (steps_per_snap < 1 ||
      std::abs(steps_per_snap * opt.dt - snap_dt) > 1e-9 * snap_dt)
    throw std::invalid_argument("oracle: dt must divide the snapshot spacing");

  detail::RealFft fft(nx);
  const int ns = fft.spectrum_size();
  const int dealias_cutoff = nx / 3;

  std::vector<double> k2(ns);
  for (int i = 0; i < ns; ++i) {
    const double k = 2.0 * kPi * i / length;
    k2[i] = k * k;
  }

  const EtdrkCoeffs c = etdrk4_coefficients(setup.linear_symbol, opt.dt);

  using Spectrum = std::vector<std::complex<double>>;
  Spectrum v(ns), nv(ns), na(ns), nb(ns), nc(ns), a(ns), b(ns), cc(ns);
  std::vector<double> u(nx), g(nx);

  fft.forward(setup.ic.data(), v.data());

  auto apply_nonlinearity = [&](const Spectrum& state, Spectrum& out) {
    switch (setup.nonlinearity) {
      case Nonlinearity::None:
        std::fill(out.begin(), out.end(), std::complex<double>(0.0));
        return;
      case Nonlinearity::AllenCahnReaction:
        fft.inverse(state.data(), u.data());
        for (int i = 0; i < nx; ++i) g[i] = setup.c2 * (u[i] - u[i] * u[i] * u[i]);
        fft.forward(g.data(), out.data());
        break;
      case Nonlinearity::CahnHilliardFlux:
        fft.inverse(state.data(), u.data());
        for (int i = 0; i < nx; ++i) g[i] = setup.kappa * (u[i] * u[i] * u[i] - u[i]);
        fft.forward(g.data(), out.data());
        for (int i = 0; i < ns; ++i) out[i] *= -k2[i];
        break;
    }
    for (int i = dealias_cutoff + 1; i < ns; ++i) out[i] = 0.0;
  };

  ReferenceSolution sol;
  sol.x.resize(nx);
  for (int i = 0; i < nx; ++i) sol.x[i] = opt.x_min + i * length / nx;
  sol.t.resize(nt);
  sol.h.resize(nt, nx);

  auto store_snapshot = [&](int row, double time) {
    fft.inverse(v.data(), u.data());
    double amax = 0.0;
    for (int i = 0; i < nx; ++i) {
      sol.h(row, i) = u[i];
      amax = std::max(amax, std::abs(u[i]));
    }
    if (!(amax < opt.blowup_threshold)) throw OracleBlowupError(time, amax);
    sol.t[row] = time;
  };

  store_snapshot(0, 0.0);
  for (int snap = 1; snap < nt; ++snap) {
    for (long s = 0; s < steps_per_snap; ++s) {
      apply_nonlinearity(v, nv);
      for (int i = 0; i < ns; ++i) a[i] = c.E2[i] * v[i] + c.Q[i] * nv[i];
      apply_nonlinearity(a, na);
      for (int i = 0; i < ns; ++i) b[i] = c.E2[i] * v[i] + c.Q[i] * na[i];
      apply_nonlinearity(b, nb);
      for (int i = 0; i < ns; ++i) cc[i] = c.E2[i] * a[i] + c.Q[i] * (2.0 * nb[i] - nv[i]);
      apply_nonlinearity(cc, nc);
      for (int i = 0; i < ns; ++i)
        v[i] = c.E[i] * v[i] + c.f1[i] * nv[i] + 2.0 * c.f2[i] * (na[i] + nb[i]) +
               c.f3[i] * nc[i];
    }
    store_snapshot(snap, snap * snap_dt);
  }
  return sol;
}

}  // namespace

OracleBlowupError::OracleBlowupError(double time, double amplitude)
    : std::runtime_error("reference solution blow-up: |h| reached " +
                         std::to_string(amplitude) + " at t=" + std::to_string(time)),
      time_(time) {}

ReferenceSolution solve_reference(const PdeProblem& problem, const OracleOptions& opt) {
  const double length = opt.x_max - opt.x_min;
  detail::RealFft fft(opt.nx);
  const int ns = fft.spectrum_size();

  SpectralSetup setup;
  setup.linear_symbol.resize(ns);
  setup.ic.resize(opt.nx);
  for (int i = 0; i < opt.nx; ++i) {
    const double x = opt.x_min + i * length / opt.nx;
    if (opt.initial_override)
      setup.ic[i] = opt.initial_override(x);
    else
      setup.ic[i] = problem.kind == PdeKind::AllenCahn ? ac_initial(x) : ch_initial(x).first;
  }
  for (int i = 0; i < ns; ++i) {
    const double k = 2.0 * kPi * i / length;
    if (problem.kind == PdeKind::AllenCahn)
      setup.linear_symbol[i] = -problem.ac.c1_sq * k * k;
    else
      setup.linear_symbol[i] = -problem.ch.alpha * problem.ch.kappa * k * k * k * k;
  }
  if (problem.kind == PdeKind::AllenCahn) {
    setup.nonlinearity = Nonlinearity::AllenCahnReaction;
    setup.c2 = problem.ac.c2;
  } else {
    setup.nonlinearity = Nonlinearity::CahnHilliardFlux;
    setup.kappa = problem.ch.kappa;
  }
  return integrate(setup, opt);
}

ReferenceSolution solve_linear_heat(double c_sq, const OracleOptions& opt) {
  const double length = opt.x_max - opt.x_min;
  detail::RealFft fft(opt.nx);
  const int ns = fft.spectrum_size();

  SpectralSetup setup;
  setup.nonlinearity = Nonlinearity::None;
  setup.linear_symbol.resize(ns);
  setup.ic.resize(opt.nx);
  for (int i = 0; i < opt.nx; ++i) {
    const double x = opt.x_min + i * length / opt.nx;
    setup.ic[i] = opt.initial_override ? opt.initial_override(x) : std::cos(kPi * x);
  }
  for (int i = 0; i < ns; ++i) {
    const double k = 2.0 * kPi * i / length;
    setup.linear_symbol[i] = -c_sq * k * k;
  }
  return integrate(setup, opt);
}

namespace {
constexpr char kReferenceMagic[4] = {'B', 'C', 'P', 'N'};
constexpr std::uint32_t kReferenceVersion = 1;
}  // namespace

void write_reference(const ReferenceSolution& sol, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("reference: cannot open " + path);
  out.write(kReferenceMagic, 4);
  const std::uint32_t version = kReferenceVersion;
  const std::uint32_t nx = std::uint32_t(sol.x.size());
  const std::uint32_t nt = std::uint32_t(sol.t.size());
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(&nx), 4);
  out.write(reinterpret_cast<const char*>(&nt), 4);
  out.write(reinterpret_cast<const char*>(sol.x.data()), std::streamsize(nx * 8));
  out.write(reinterpret_cast<const char*>(sol.t.data()), std::streamsize(nt * 8));
  for (std::uint32_t it = 0; it < nt; ++it)
    for (std::uint32_t ix = 0; ix < nx; ++ix) {
      const double v = sol.h(it, ix);
      out.write(reinterpret_cast<const char*>(&v), 8);
    }
  if (!out) throw std::runtime_error("reference: write failed for " + path);
}

ReferenceSolution read_reference(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("reference: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kReferenceMagic, 4) != 0)
    throw std::runtime_error("reference: bad magic in " + path);
  std::uint32_t version = 0, nx = 0, nt = 0;
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(&nx), 4);
  in.read(reinterpret_cast<char*>(&nt), 4);
  if (!in) throw std::runtime_error("reference: truncated header in " + path);
  if (version != kReferenceVersion)
    throw std::runtime_error("reference: incompatible version " + std::to_string(version));
  if (nx == 0 || nt == 0 || nx > (1u << 20) || nt > (1u << 20))
    throw std::runtime_error("reference: implausible dimensions in " + path);

  ReferenceSolution sol;
  sol.x.resize(nx);
  sol.t.resize(nt);
  sol.h.resize(nt, nx);
  in.read(reinterpret_cast<char*>(sol.x.data()), std::streamsize(nx * 8));
  in.read(reinterpret_cast<char*>(sol.t.data()), std::streamsize(nt * 8));
  for (std::uint32_t it = 0; it < nt; ++it)
    for (std::uint32_t ix = 0; ix < nx; ++ix) {
      double v;
      in.read(reinterpret_cast<char*>(&v), 8);
      sol.h(it, ix) = v;
    }
  if (!in) throw std::runtime_error("reference: truncated payload in " + path);
  return sol;
}

void write_reference_csv(const ReferenceSolution& sol, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("reference: cannot open " + path);
  out << "x,t,h\n";
  out.precision(17);
  for (Eigen::Index it = 0; it < sol.t.size(); ++it)
    for (Eigen::Index ix = 0; ix < sol.x.size(); ++ix)
      out << sol.x[ix] << "," << sol.t[it] << "," << sol.h(it, ix) << "\n";
}

}  // namespace bcpinn
