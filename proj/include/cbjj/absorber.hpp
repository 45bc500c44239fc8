#pragma once
#include <complex>
#include <vector>

#include "cbjj/grid.hpp"
#include "cbjj/junction.hpp"

namespace cbjj {

// Upper clamp on the effective tilt used for absorber geometry: keeps
// omega_p(t) bounded away from zero when a strong drive pushes the
// instantaneous tilt through the critical current.
inline constexpr double kMaxAbsorberBias = 0.9995;
double absorber_bias(double effective_tilt);

// Imaginary potential sampled on the grid at one instant: identically zero up
// to and including the grid point nearest below phi_turn, and
// beta / (sqrt(2 (phi - phi0)) omega_p) beyond it.
struct TdipField {
  double t = 0.0;
  double phi0 = 0.0;      // instantaneous well bottom
  double phi_turn = 0.0;  // absorber onset (outer turning point)
  double omega_p = 0.0;
  std::vector<double> values;
};

// bias is the effective tilt already passed through absorber_bias().
void fill_tdip(const GridSpec& grid, double bias, const JunctionConfig& cfg,
               TdipField& out);
TdipField build_tdip(const GridSpec& grid, double t, double bias,
                     const JunctionConfig& cfg);

// Outgoing running state emitted from the barrier at time tau.
struct RunningStateParams {
  double gamma = 0.0;         // feeding decay rate
  double tau = 0.0;           // emission time
  double phi0 = 0.0;          // well-bottom reference for phi' = phi - phi0
  double omega_shift = -1.0;  // phase frequency; negative selects omega_p/2
};

// psi_out(phi, t); |psi_out|^2 = gamma/(sqrt(2 phi') omega_p)
//   * exp(-(gamma/omega_p) ((t - tau) omega_p - sqrt(2 phi'))).
// Domain: phi > phi0 and (t - tau) omega_p > sqrt(2 phi'); outside it a
// validation_error is thrown and callers treat the amplitude as zero.
std::complex<double> running_state(double phi, double t,
                                   const RunningStateParams& p, double omega_p);

// Quasi-stationary regime assumed by the running-state ansatz.
bool running_state_regime_ok(double gamma, double omega_p);

struct CalibrationPoint {
  double beta = 0.0;
  double fitted_rate = 0.0;
  double cl_ratio = 0.0;
};

struct CalibrationResult {
  std::vector<CalibrationPoint> table;
  double beta_star = 0.0;
  double plateau_lo = 0.0;
  double plateau_hi = 0.0;
  double rate_at_beta_star = 0.0;
  // time-averaged (norm removed per unit time) / (current through phi_turn)
  // measured at beta_star; ~1 when the absorber is reflection free.
  double absorbed_flux_ratio = 0.0;
};

// Static-bias decay runs over a log-spaced beta grid; fits the asymptotic rate
// on the tail half of each run and locates the widest plateau where the rate
// varies by less than 20% per decade of beta. Throws numerical_error (with the
// full table in the message) when no plateau exists.
CalibrationResult calibrate_beta(const JunctionConfig& cfg, double I_ref,
                                 double beta_lo = 1e-3, double beta_hi = 10.0,
                                 int n_beta = 13, double t_run = 6000.0);

}  // namespace cbjj
