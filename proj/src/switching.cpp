#include "cbjj/switching.hpp"

#include <algorithm>
#include <cmath>

#include "cbjj/errors.hpp"

namespace cbjj {

namespace {

// adaptive trapezoid with Richardson correction; tol is absolute per segment
double adapt_trap(const std::function<double(double)>& f, double a, double b,
                  double fa, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double left = 0.5 * (m - a) * (fa + fm);
  const double right = 0.5 * (b - m) * (fm + fb);
  const double split = left + right;
  if (depth <= 0 || std::abs(split - whole) <= 3.0 * tol)
    return split + (split - whole) / 3.0;
  return adapt_trap(f, a, m, fa, fm, left, 0.5 * tol, depth - 1) +
         adapt_trap(f, m, b, fm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel) {
  if (a == b) return 0.0;
  const double sgn = a < b ? 1.0 : -1.0;
  if (a > b) std::swap(a, b);
  const double fa = f(a), fb = f(b);
  const double whole = 0.5 * (b - a) * (fa + fb);
  const double tol = rel * std::max(std::abs(whole), 1e-300);
  return sgn * adapt_trap(f, a, b, fa, fb, whole, tol, 40);
}

// window masses w[i] over (x[i-1], x[i]] deposited onto n_bins uniform bins
SwitchingDistribution binned(const std::string& kind,
                             const std::vector<double>& x,
                             const std::vector<double>& w, int n_bins) {
  const int n = (int)x.size();
  if (n < 2) throw validation_error("distribution: need at least two samples");
  if (n_bins <= 0) n_bins = n - 1;
  const double lo = x.front(), hi = x.back();
  const double dx = (hi - lo) / n_bins;
  SwitchingDistribution d;
  d.kind = kind;
  d.axis.resize(n_bins);
  d.density.assign(n_bins, 0.0);
  for (int k = 0; k < n_bins; ++k) d.axis[k] = lo + (k + 0.5) * dx;
  for (int i = 1; i < n; ++i) {
    const double a = x[i - 1], b = x[i], m = w[i];
    d.total_mass += m;
    if (m == 0.0) continue;
    const int k0 = std::clamp((int)std::floor((a - lo) / dx), 0, n_bins - 1);
    const int k1 = std::clamp((int)std::floor((b - lo) / dx), 0, n_bins - 1);
    for (int k = k0; k <= k1; ++k) {
      const double ov = std::min(b, lo + (k + 1) * dx) - std::max(a, lo + k * dx);
      if (ov > 0.0) d.density[k] += m * (ov / (b - a)) / dx;
    }
  }
  return d;
}

}  // namespace

std::vector<double> instantaneous_rate(const std::vector<double>& t,
                                       const std::vector<double>& norm2) {
  if (t.size() != norm2.size())
    throw validation_error("instantaneous_rate: t and norm2 differ in length");
  int n = 0;
  while (n < (int)norm2.size() && norm2[n] > 0.0) ++n;
  std::vector<double> rate(n, 0.0);
  if (n < 2) return rate;
  std::vector<double> ln(n);
  for (int i = 0; i < n; ++i) ln[i] = std::log(norm2[i]);
  rate[0] = -(ln[1] - ln[0]) / (t[1] - t[0]);
  for (int i = 1; i + 1 < n; ++i)
    rate[i] = -(ln[i + 1] - ln[i - 1]) / (t[i + 1] - t[i - 1]);
  rate[n - 1] = -(ln[n - 1] - ln[n - 2]) / (t[n - 1] - t[n - 2]);
  return rate;
}

std::vector<double> instantaneous_rate(const TrajectoryRecord& tr) {
  return instantaneous_rate(tr.t, tr.norm2);
}

SwitchingDistribution switching_distribution(const TrajectoryRecord& tr,
                                             double dIdt, int n_bins) {
  if (!(dIdt > 0.0))
    throw validation_error(
        "switching_distribution: dIdt must be positive; use the time-resolved "
        "kind for constant bias");
  for (int i = 1; i < tr.size(); ++i)
    if (!(tr.bias[i] > tr.bias[i - 1]))
      throw validation_error(
          "switching_distribution: bias not strictly increasing; use the "
          "time-resolved kind");
  return binned("current", tr.bias, tr.tunnel_loss, n_bins);
}

SwitchingDistribution time_resolved_distribution(const TrajectoryRecord& tr,
                                                 int n_bins) {
  return binned("time", tr.t, tr.tunnel_loss, n_bins);
}

SwitchingDistribution rate_distribution(
    const std::vector<double>& axis, double ramp_rate, double x_start,
    const std::function<double(double)>& rate) {
  if (axis.empty()) throw validation_error("rate_distribution: empty axis");
  for (size_t i = 1; i < axis.size(); ++i)
    if (!(axis[i] > axis[i - 1]))
      throw validation_error("rate_distribution: axis not strictly increasing");
  if (!(ramp_rate > 0.0))
    throw validation_error("rate_distribution: ramp rate must be positive");
  SwitchingDistribution d;
  d.kind = "current";
  d.axis = axis;
  d.density.resize(axis.size());
  double cum = integrate(rate, x_start, axis[0], 1e-8);
  const double s_first = std::exp(-cum / ramp_rate);
  for (size_t i = 0; i < axis.size(); ++i) {
    if (i > 0) cum += integrate(rate, axis[i - 1], axis[i], 1e-8);
    d.density[i] = rate(axis[i]) / ramp_rate * std::exp(-cum / ramp_rate);
  }
  d.total_mass = s_first - std::exp(-cum / ramp_rate);
  return d;
}

SwitchingDistribution cl_distribution(const std::vector<double>& I_axis,
                                      double dIdt, const JunctionConfig& cfg) {
  if (I_axis.empty()) throw validation_error("cl_distribution: empty axis");
  if (!(I_axis.front() > 0.0 && I_axis.back() < 1.0))
    throw validation_error("cl_distribution: axis must lie inside (0, 1)");
  auto rate = [&cfg](double I) {
    return caldeira_leggett_rate(I, cfg.omega0, cfg.q_damp);
  };
  return rate_distribution(I_axis, dIdt, cfg.I0, rate);
}

namespace {

// vertex of the parabola through three equally spaced samples around i
void refine_parabolic(const SwitchingDistribution& d, int i, double* pos,
                      double* height) {
  *pos = d.axis[i];
  *height = d.density[i];
  const int n = (int)d.axis.size();
  if (i <= 0 || i >= n - 1) return;
  const double denom = d.density[i - 1] - 2.0 * d.density[i] + d.density[i + 1];
  if (!(denom < 0.0)) return;
  double delta = 0.5 * (d.density[i - 1] - d.density[i + 1]) / denom;
  delta = std::clamp(delta, -0.5, 0.5);
  const double h = 0.5 * (d.axis[i + 1] - d.axis[i - 1]);
  *pos = d.axis[i] + delta * h;
  *height = d.density[i] - 0.25 * (d.density[i - 1] - d.density[i + 1]) * delta;
}

}  // namespace

PeakInfo peak_info(const SwitchingDistribution& d) {
  const int n = (int)d.axis.size();
  if (n == 0) throw validation_error("peak_info: empty distribution");
  int imax = 0;
  for (int i = 1; i < n; ++i)
    if (d.density[i] > d.density[imax]) imax = i;
  PeakInfo p;
  refine_parabolic(d, imax, &p.position, &p.height);
  p.at_boundary = imax == 0 || imax == n - 1;
  if (n == 1 || !(p.height > 0.0)) {
    p.fwhm = n > 1 ? d.axis.back() - d.axis.front() : 0.0;
    p.at_boundary = true;
    return p;
  }

  const double half = 0.5 * p.height;
  double xl = 0.0, xr = 0.0;
  bool has_l = false, has_r = false;
  for (int i = imax; i >= 0 && !has_l; --i) {
    if (d.density[i] <= half) {
      const double f = (half - d.density[i]) / (d.density[i + 1] - d.density[i]);
      xl = d.axis[i] + f * (d.axis[i + 1] - d.axis[i]);
      has_l = true;
    }
  }
  for (int i = imax; i < n && !has_r; ++i) {
    if (d.density[i] <= half) {
      const double f = (half - d.density[i]) / (d.density[i - 1] - d.density[i]);
      xr = d.axis[i] - f * (d.axis[i] - d.axis[i - 1]);
      has_r = true;
    }
  }
  if (has_l && has_r) {
    p.fwhm = xr - xl;
  } else if (has_l) {
    p.fwhm = 2.0 * (p.position - xl);
    p.at_boundary = true;
  } else if (has_r) {
    p.fwhm = 2.0 * (xr - p.position);
    p.at_boundary = true;
  } else {
    p.fwhm = d.axis.back() - d.axis.front();
    p.at_boundary = true;
  }
  return p;
}

std::vector<PeakCandidate> find_peaks(const SwitchingDistribution& d,
                                      double min_prominence) {
  const int n = (int)d.axis.size();
  std::vector<PeakCandidate> out;
  int i = 1;
  while (i < n - 1) {
    if (!(d.density[i] > d.density[i - 1])) {
      ++i;
      continue;
    }
    int r = i;  // plateau [i, r]
    while (r + 1 < n && d.density[r + 1] == d.density[i]) ++r;
    if (r + 1 < n && d.density[r + 1] < d.density[i]) {
      const int peak = (i + r) / 2;
      const double h = d.density[peak];
      double lmin = h, rmin = h;
      for (int j = peak - 1; j >= 0; --j) {
        if (d.density[j] > h) break;
        lmin = std::min(lmin, d.density[j]);
      }
      for (int j = r + 1; j < n; ++j) {
        if (d.density[j] > h) break;
        rmin = std::min(rmin, d.density[j]);
      }
      const double prom = h - std::max(lmin, rmin);
      if (prom >= min_prominence) {
        PeakCandidate c;
        c.index = peak;
        c.height = h;
        c.prominence = prom;
        double hh;
        refine_parabolic(d, peak, &c.position, &hh);
        out.push_back(c);
      }
    }
    i = r + 1;
  }
  return out;
}

ComparisonMetrics compare(const SwitchingDistribution& a,
                          const SwitchingDistribution& b) {
  if (a.kind != b.kind)
    throw validation_error("compare: distributions have different axis kinds");
  if (a.axis.size() < 2 || b.axis.size() < 2)
    throw validation_error("compare: need at least two axis points");
  const double lo = std::max(a.axis.front(), b.axis.front());
  const double hi = std::min(a.axis.back(), b.axis.back());
  if (!(hi > lo)) throw validation_error("compare: no overlapping support");

  auto interp = [](const SwitchingDistribution& d, double x) {
    const auto it = std::upper_bound(d.axis.begin(), d.axis.end(), x);
    const int j = std::clamp((int)(it - d.axis.begin()) - 1, 0,
                             (int)d.axis.size() - 2);
    const double f = (x - d.axis[j]) / (d.axis[j + 1] - d.axis[j]);
    return d.density[j] + f * (d.density[j + 1] - d.density[j]);
  };

  const int m = 512;
  const double dx = (hi - lo) / (m - 1);
  std::vector<double> pa(m), pb(m);
  for (int i = 0; i < m; ++i) {
    const double x = lo + i * dx;
    pa[i] = interp(a, x);
    pb[i] = interp(b, x);
  }
  auto mass = [&](const std::vector<double>& p) {
    double s = 0.0;
    for (int i = 1; i < m; ++i) s += 0.5 * (p[i - 1] + p[i]) * dx;
    return s;
  };
  const double ma = mass(pa), mb = mass(pb);
  if (!(ma > 0.0 && mb > 0.0))
    throw validation_error("compare: zero mass on the common axis");
  double l1 = 0.0;
  for (int i = 1; i < m; ++i)
    l1 += 0.5 * (std::abs(pa[i - 1] / ma - pb[i - 1] / mb) +
                 std::abs(pa[i] / ma - pb[i] / mb)) *
          dx;

  const PeakInfo ia = peak_info(a), ib = peak_info(b);
  ComparisonMetrics c;
  c.peak_location_a = ia.position;
  c.peak_location_b = ib.position;
  c.peak_shift = ib.position - ia.position;
  c.l1_distance = l1;
  c.width_a = ia.fwhm;
  c.width_b = ib.fwhm;
  return c;
}

}  // namespace cbjj
