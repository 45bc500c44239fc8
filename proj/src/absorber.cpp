#include "cbjj/absorber.hpp"

#include <algorithm>
#include <cmath>

#include "cbjj/errors.hpp"

namespace cbjj {

double absorber_bias(double effective_tilt) {
  return std::clamp(effective_tilt, 0.0, kMaxAbsorberBias);
}

void fill_tdip(const GridSpec& grid, double bias, const JunctionConfig& cfg,
               TdipField& out) {
  const double phi0 = std::asin(bias);
  const double wp = plasma_frequency(bias, cfg.omega0);
  const double pturn = outer_turning_point(bias, default_turning_energy(bias, cfg.omega0));
  out.phi0 = phi0;
  out.phi_turn = pturn;
  out.omega_p = wp;
  out.values.assign(grid.n_points, 0.0);
  if (cfg.beta == 0.0) return;
  const double c = cfg.beta / wp;
  // first index strictly beyond the turning point
  int j0 = (int)std::ceil((pturn - grid.phi_lo) / grid.dphi());
  while (j0 < grid.n_points && !(grid.phi(j0) > pturn)) ++j0;
  while (j0 > 0 && grid.phi(j0 - 1) > pturn) --j0;
  for (int j = std::max(j0, 0); j < grid.n_points; ++j)
    out.values[j] = c / std::sqrt(2.0 * (grid.phi(j) - phi0));
}

TdipField build_tdip(const GridSpec& grid, double t, double bias,
                     const JunctionConfig& cfg) {
  TdipField f;
  f.t = t;
  fill_tdip(grid, bias, cfg, f);
  return f;
}

std::complex<double> running_state(double phi, double t,
                                   const RunningStateParams& p, double omega_p) {
  const double phip = phi - p.phi0;
  if (!(phip > 0.0))
    throw validation_error("running_state: phi must lie beyond phi0");
  const double root = std::sqrt(2.0 * phip);
  const double s = (t - p.tau) * omega_p - root;
  if (!(s > 0.0))
    throw validation_error("running_state: outside causal domain t*omega_p > sqrt(2 phi')");
  const double omega = p.omega_shift >= 0.0 ? p.omega_shift : 0.5 * omega_p;
  const double mod = std::sqrt(p.gamma / (root * omega_p));
  const double wkb_phase = omega_p * phip * root / (6.0 * std::sqrt(2.0));
  return mod * std::exp(std::complex<double>(-0.5 * p.gamma / omega_p * s,
                                             wkb_phase - omega / omega_p * s));
}

bool running_state_regime_ok(double gamma, double omega_p) {
  return gamma < 0.1 * omega_p;
}

}  // namespace cbjj
