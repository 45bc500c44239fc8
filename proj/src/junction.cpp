#include "cbjj/junction.hpp"

#include <cmath>
#include <string>

#include "cbjj/errors.hpp"

namespace cbjj {

namespace {
void require_bias_in_well(double I, const char* who) {
  if (!(I >= 0.0 && I < 1.0))
    throw validation_error(std::string(who) + ": bias must satisfy 0 <= I < 1, got " +
                           std::to_string(I));
}
}  // namespace

void JunctionConfig::validate() const {
  if (!(omega0 > 0.0)) throw validation_error("config: omega0 must be positive");
  if (!(zeta >= 0.0)) throw validation_error("config: zeta must be >= 0");
  if (!(eta >= 0.0)) throw validation_error("config: eta must be >= 0");
  if (!(omega_mw >= 0.0)) throw validation_error("config: omega_mw must be >= 0");
  if (!(beta >= 0.0)) throw validation_error("config: beta must be >= 0");
  if (!(I0 > 0.0 && I0 < 1.0)) throw validation_error("config: I0 must lie in (0, 1)");
  if (!(q_damp > 0.0)) throw validation_error("config: q_damp must be positive");
  if (!(dt > 0.0)) throw validation_error("config: dt must be positive");
  grid.validate();
}

double tilted_washboard(double phi, double I) { return -(I * phi + std::cos(phi)); }

double microwave_potential(double phi, double t, double eta, double omega_mw) {
  return -eta * phi * std::sin(omega_mw * t);
}

double plasma_frequency(double I, double omega0) {
  require_bias_in_well(I, "plasma_frequency");
  return omega0 * std::pow(1.0 - I * I, 0.25);
}

double barrier_height(double I) {
  require_bias_in_well(I, "barrier_height");
  return 2.0 * (std::sqrt(1.0 - I * I) - I * std::acos(I));
}

WellExtrema well_extrema(double I) {
  require_bias_in_well(I, "well_extrema");
  const double a = std::asin(I);
  return {a, M_PI - a};
}

double default_turning_energy(double I, double omega0) {
  const double phi_min = std::asin(I);
  return tilted_washboard(phi_min, I) + 0.5 * plasma_frequency(I, omega0);
}

double outer_turning_point(double I, double E) {
  const auto [phi_min, phi_top] = well_extrema(I);
  if (E >= tilted_washboard(phi_top, I)) return phi_top;
  if (E <= tilted_washboard(phi_min, I))
    throw validation_error("outer_turning_point: E must exceed the well bottom");
  // U is strictly decreasing on (phi_top, phi_min + 2 pi), so the root is
  // unique and bracketed.
  double lo = phi_top;              // U(lo) > E
  double hi = phi_min + 2.0 * M_PI; // U(hi) < E
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (tilted_washboard(mid, I) > E ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double resonance_frequency(double I, double omega0) {
  const double wp = plasma_frequency(I, omega0);
  return wp * (1.0 - 5.0 * wp / (36.0 * barrier_height(I)));
}

double caldeira_leggett_rate(double I, double omega0, double q_damp) {
  if (!(q_damp > 0.0))
    throw validation_error("caldeira_leggett_rate: q_damp must be positive");
  const double wp = plasma_frequency(I, omega0);
  const double b = 7.2 * barrier_height(I) / wp;
  return wp / (2.0 * M_PI) * std::sqrt(120.0 * M_PI * b) *
         std::exp(-b * (1.0 + 0.87 / q_damp));
}

}  // namespace cbjj
