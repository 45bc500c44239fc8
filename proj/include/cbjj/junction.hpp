#pragma once
#include "cbjj/grid.hpp"

// Closed-form junction model in reduced units: hbar = 1, E_J = 1, phase mass
// M = 1/omega0^2. Bias currents are in units of the critical current.

namespace cbjj {

struct JunctionConfig {
  double omega0 = 0.0183;  // zero-bias plasma frequency, E_J/hbar
  double zeta = 8.4e-4;    // measurement-friction strength, E_J
  double eta = 0.0;        // microwave tilt amplitude
  double omega_mw = 0.0;   // microwave angular frequency, E_J/hbar
  double beta = 0.02;      // absorber strength, dimensionless (calibrated)
  double I0 = 0.95;        // bias at t = 0
  double dIdt = 2e-5;      // bias ramp rate
  double q_damp = 1e4;     // damping quality factor omega_p R C
  GridSpec grid;           // zero-length grid means "derive the default"
  double dt = 0.1;         // time step, hbar/E_J

  double mass() const { return 1.0 / (omega0 * omega0); }
  void validate() const;
};

// U0(phi) = -(I phi + cos phi)
double tilted_washboard(double phi, double I);

// U_mw(phi,t) = -eta phi sin(omega_mw t)
double microwave_potential(double phi, double t, double eta, double omega_mw);

// omega_p = omega0 (1 - I^2)^(1/4), requires 0 <= I < 1
double plasma_frequency(double I, double omega0);

// Delta U = 2 (sqrt(1-I^2) - I acos I), requires 0 <= I < 1
double barrier_height(double I);

struct WellExtrema {
  double phi_min;  // asin(I), well bottom of the k = 0 well
  double phi_top;  // pi - asin(I), adjacent barrier top
};
WellExtrema well_extrema(double I);

// Default absorber reference energy: U(phi_min) + omega_p/2.
double default_turning_energy(double I, double omega0);

// Outer turning point: the unique root of U(phi, I) = E on (phi_top,
// phi_min + 2 pi), located by bisection to |dphi| < 1e-10. When E lies at or
// above the barrier top the turning point collapses onto phi_top so the
// absorber stays active in the over-the-barrier regime.
double outer_turning_point(double I, double E);

// omega_01 = omega_p (1 - 5 hbar omega_p / (36 Delta U))
double resonance_frequency(double I, double omega0);

// Caldeira-Leggett escape rate,
//   gamma = (omega_p/2pi) sqrt(120 pi * 7.2 dU/omega_p)
//           * exp(-7.2 dU/omega_p (1 + 0.87/q_damp)).
double caldeira_leggett_rate(double I, double omega0, double q_damp);

}  // namespace cbjj
