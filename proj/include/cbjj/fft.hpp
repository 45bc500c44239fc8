#pragma once
#include <complex>
#include <vector>

namespace cbjj {

// In-place complex-to-complex FFT bound to a fixed caller-owned buffer.
// Plans are created with FFTW_ESTIMATE so the algorithm depends only on the
// transform size; results are then bit-reproducible across runs and threads.
// Plan creation/destruction is serialized internally (the FFTW planner is not
// thread safe); execution is not locked.
class Fft {
 public:
  explicit Fft(std::vector<std::complex<double>>& buf);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  void forward();       // unnormalized
  void backward_raw();  // unnormalized; caller folds the 1/n elsewhere

 private:
  void* fwd_;
  void* bwd_;
};

}  // namespace cbjj
