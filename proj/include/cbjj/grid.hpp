#pragma once
#include <cmath>

#include "cbjj/errors.hpp"

namespace cbjj {

// Uniform periodic phase grid. Points are phi_lo + j*dphi, j = 0..n_points-1;
// phi_hi is the periodic image of phi_lo and carries no point of its own.
struct GridSpec {
  double phi_lo = 0.0;
  double phi_hi = 0.0;
  int n_points = 4096;

  double length() const { return phi_hi - phi_lo; }
  double dphi() const { return length() / n_points; }
  double phi(int j) const { return phi_lo + j * dphi(); }

  // FFT-ordered wavenumber: k_j = 2*pi*j/L for j <= n/2, negative branch above.
  double wavenumber(int j) const {
    const double dk = 2.0 * M_PI / length();
    return dk * (j <= n_points / 2 ? j : j - n_points);
  }

  void validate() const {
    if (!(phi_hi > phi_lo))
      throw validation_error("grid: phi_hi must exceed phi_lo");
    if (n_points < 256 || (n_points & (n_points - 1)) != 0)
      throw validation_error("grid: n_points must be a power of two >= 256");
  }
};

}  // namespace cbjj
