#include "cbjj/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace cbjj {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Fft::Fft(std::vector<std::complex<double>>& buf) {
  auto* p = reinterpret_cast<fftw_complex*>(buf.data());
  const int n = (int)buf.size();
  std::lock_guard<std::mutex> lock(planner_mutex());
  fwd_ = fftw_plan_dft_1d(n, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
  bwd_ = fftw_plan_dft_1d(n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft::~Fft() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
}

void Fft::forward() { fftw_execute(static_cast<fftw_plan>(fwd_)); }
void Fft::backward_raw() { fftw_execute(static_cast<fftw_plan>(bwd_)); }

}  // namespace cbjj
