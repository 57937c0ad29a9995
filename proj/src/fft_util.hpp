#pragma once

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <stdexcept>

namespace bcpinn::detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

/// RAII real<->complex transform pair of fixed size (double precision,
/// unnormalized forward; inverse divides by n).
class RealFft {
 public:
  explicit RealFft(int n) : n_(n) {
    if (n < 2) throw std::invalid_argument("RealFft: size too small");
    real_ = fftw_alloc_real(n);
    cplx_ = fftw_alloc_complex(n / 2 + 1);
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fwd_ = fftw_plan_dft_r2c_1d(n, real_, cplx_, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_c2r_1d(n, cplx_, real_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
    fftw_free(real_);
    fftw_free(cplx_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  int size() const { return n_; }
  int spectrum_size() const { return n_ / 2 + 1; }

  void forward(const double* in, std::complex<double>* out) {
    for (int i = 0; i < n_; ++i) real_[i] = in[i];
    fftw_execute(fwd_);
    for (int i = 0; i < spectrum_size(); ++i) out[i] = {cplx_[i][0], cplx_[i][1]};
  }

  void inverse(const std::complex<double>* in, double* out) {
    for (int i = 0; i < spectrum_size(); ++i) {
      cplx_[i][0] = in[i].real();
      cplx_[i][1] = in[i].imag();
    }
    fftw_execute(inv_);
    const double scale = 1.0 / n_;
    for (int i = 0; i < n_; ++i) out[i] = real_[i] * scale;
  }

 private:
  int n_;
  double* real_;
  fftw_complex* cplx_;
  fftw_plan fwd_, inv_;
};

}  // namespace bcpinn::detail
