#pragma once
#include <complex>
#include <vector>

#include "cbjj/grid.hpp"

namespace cbjj {

// Complex field on the phase grid. norm2 is the Riemann sum of |amp|^2 dphi,
// which on a uniform periodic grid coincides with the trapezoidal rule.
struct Wavefunction {
  GridSpec grid;
  std::vector<std::complex<double>> amp;
  double t = 0.0;

  double norm2() const;
  double expectation_phi() const;  // throws validation_error on zero norm
  // |psi|^2 dphi accumulated over the outermost `margin` points at each edge.
  double edge_mass(int margin = 5) const;
  void scale(double s);
};

}  // namespace cbjj
