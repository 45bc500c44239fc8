#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracles {

namespace {

// number of eigenvalues of the tridiagonal (diag, off) below lambda, from the
// sign count of the LDL^T pivots
int count_below(const std::vector<double>& diag, double off, double lambda) {
  const double tiny = 1e-300;
  int count = 0;
  double q = diag[0] - lambda;
  if (q < 0.0) ++count;
  for (size_t i = 1; i < diag.size(); ++i) {
    if (q == 0.0) q = tiny;
    q = diag[i] - lambda - off * off / q;
    if (q < 0.0) ++count;
  }
  return count;
}

}  // namespace

EigenResult lowest_eigenpair(double mass, double lo, double hi, int n,
                             const std::function<double(double)>& u) {
  if (n < 3) throw std::invalid_argument("lowest_eigenpair: n too small");
  const double dx = (hi - lo) / (n + 1);
  const double kin = 1.0 / (2.0 * mass * dx * dx);
  const double off = -kin;
  std::vector<double> x(n), diag(n);
  for (int i = 0; i < n; ++i) {
    x[i] = lo + (i + 1) * dx;
    diag[i] = 2.0 * kin + u(x[i]);
  }

  double lam_lo = diag[0], lam_hi = diag[0];
  for (const double d : diag) {
    lam_lo = std::min(lam_lo, d);
    lam_hi = std::max(lam_hi, d);
  }
  lam_lo -= 2.0 * std::abs(off);
  lam_hi += 2.0 * std::abs(off);
  for (int it = 0; it < 200 && lam_hi - lam_lo >
                                   1e-15 * std::max(1.0, std::abs(lam_lo));
       ++it) {
    const double mid = 0.5 * (lam_lo + lam_hi);
    (count_below(diag, off, mid) >= 1 ? lam_hi : lam_lo) = mid;
  }
  const double energy = 0.5 * (lam_lo + lam_hi);

  // inverse iteration at a slightly shifted energy; Thomas solves
  const double shift = energy - 1e-9 * std::max(1.0, std::abs(energy));
  std::vector<double> v(n, 1.0), c(n), d(n);
  for (int iter = 0; iter < 4; ++iter) {
    c[0] = off / (diag[0] - shift);
    d[0] = v[0] / (diag[0] - shift);
    for (int i = 1; i < n; ++i) {
      const double m = diag[i] - shift - off * c[i - 1];
      c[i] = off / m;
      d[i] = (v[i] - off * d[i - 1]) / m;
    }
    v[n - 1] = d[n - 1];
    for (int i = n - 2; i >= 0; --i) v[i] = d[i] - c[i] * v[i + 1];
    double nrm = 0.0;
    for (const double a : v) nrm += a * a;
    nrm = std::sqrt(nrm * dx);
    for (double& a : v) a /= nrm;
  }
  if (v[std::max_element(v.begin(), v.end(), [](double a, double b) {
          return std::abs(a) < std::abs(b);
        }) - v.begin()] < 0.0)
    for (double& a : v) a = -a;

  EigenResult res;
  res.energy = energy;
  res.x = std::move(x);
  res.vec = std::move(v);
  return res;
}

double simpson(const std::vector<double>& y, double dx) {
  const int n = (int)y.size();
  if (n < 3 || n % 2 == 0)
    throw std::invalid_argument("simpson: need an odd sample count >= 3");
  double s = y[0] + y[n - 1];
  for (int i = 1; i < n - 1; ++i) s += y[i] * (i % 2 == 1 ? 4.0 : 2.0);
  return s * dx / 3.0;
}

LineFit linfit(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = (int)x.size();
  if (n < 2 || y.size() != x.size())
    throw std::invalid_argument("linfit: need two or more paired samples");
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("linfit: degenerate abscissa");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

}  // namespace oracles
