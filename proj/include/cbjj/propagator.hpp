#pragma once
#include <complex>
#include <vector>

#include "cbjj/absorber.hpp"
#include "cbjj/fft.hpp"
#include "cbjj/junction.hpp"
#include "cbjj/wavefunction.hpp"

namespace cbjj {

struct BiasSchedule {
  double I0 = 0.95;
  double rate = 0.0;
  double operator()(double t) const { return I0 + rate * t; }
};

struct StepLosses {
  double tunnel = 0.0;
  double friction = 0.0;
};

struct StopSpec {
  double norm_floor = 1e-4;
  double I_ceiling = 0.999;
  double t_max = 1e12;
};

enum class StopReason { norm_floor, bias_ceiling, time_limit };

// Strided samples of one propagation. Losses are sums over the sample window;
// gamma_t is the window tunnel loss divided by (window duration * norm2).
struct TrajectoryRecord {
  std::vector<double> t, bias, norm2, gamma_t, phi_mean, tunnel_loss, friction_loss;
  StopReason stop = StopReason::time_limit;
  double total_tunnel_loss = 0.0;
  double total_friction_loss = 0.0;
  int size() const { return (int)t.size(); }
};

struct GroundStateResult {
  Wavefunction psi;
  double energy = 0.0;
  int iterations = 0;
};

// Split-operator engine on a fixed grid. One step is
//   kinetic(dt/2) -> potential(dt at the midpoint time) -> kinetic(dt/2),
// second order in dt and spectral in dphi. The potential stage applies, in
// order: the real washboard + microwave phase, the absorber decay (recording
// tunnel loss), and the friction decay about the frozen <phi> followed by a
// global rescale that restores the pre-friction norm.
class Propagator {
 public:
  Propagator(const JunctionConfig& cfg, BiasSchedule schedule);

  // Imaginary-time relaxation in the static well at bias I with the potential
  // continued as a confining linear rise beyond the outer turning point.
  // Converges when the relative energy change per step drops below 1e-12.
  GroundStateResult ground_state(double I);

  void load(const Wavefunction& start);
  StepLosses step();
  void kinetic_half_step();          // exposed for tests
  StepLosses potential_step(double t_mid);

  TrajectoryRecord propagate(const Wavefunction& start, const StopSpec& stop,
                             int stride);

  double time() const { return t_; }
  double norm2() const;
  Wavefunction state() const;        // copies the live buffer out
  double last_phi_turn() const { return cur_phi_turn_; }

  const JunctionConfig& config() const { return cfg_; }
  const BiasSchedule& schedule() const { return sched_; }

 private:
  void apply_tilt_phase(double tilt);
  double energy_static(const std::vector<double>& u) const;

  JunctionConfig cfg_;
  BiasSchedule sched_;
  GridSpec grid_;
  int n_;
  double mass_, dphi_;
  std::vector<std::complex<double>> psi_;
  mutable std::vector<std::complex<double>> scratch_;
  Fft fft_;
  mutable Fft fft_scratch_;
  std::vector<double> phi_, k2_;
  std::vector<std::complex<double>> khalf_;     // exp(-i k^2/(2M) dt/2) / sqrt-free 1/n fold
  std::vector<std::complex<double>> cos_phase_; // exp(+i cos(phi) dt)
  double t_ = 0.0;
  double norm2_acc_ = 1.0;
  double cur_phi_turn_ = 0.0;
};

// Probability current (1/M) Im(psi* dpsi/dphi) at phi, via a five-point
// stencil and linear interpolation between the bracketing grid points.
double probability_current(const Wavefunction& psi, double mass, double phi);

}  // namespace cbjj
