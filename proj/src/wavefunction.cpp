#include "cbjj/wavefunction.hpp"

#include "cbjj/errors.hpp"

namespace cbjj {

double Wavefunction::norm2() const {
  double s = 0.0;
  for (const auto& a : amp) s += std::norm(a);
  return s * grid.dphi();
}

double Wavefunction::expectation_phi() const {
  double s0 = 0.0, s1 = 0.0;
  for (int j = 0; j < (int)amp.size(); ++j) {
    const double p = std::norm(amp[j]);
    s0 += p;
    s1 += p * grid.phi(j);
  }
  if (s0 <= 0.0) throw validation_error("expectation_phi: zero-norm state");
  return s1 / s0;
}

double Wavefunction::edge_mass(int margin) const {
  const int n = (int)amp.size();
  double s = 0.0;
  for (int j = 0; j < margin && j < n; ++j) s += std::norm(amp[j]);
  for (int j = n - margin; j < n; ++j)
    if (j >= margin) s += std::norm(amp[j]);
  return s * grid.dphi();
}

void Wavefunction::scale(double s) {
  for (auto& a : amp) a *= s;
}

}  // namespace cbjj
