#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "cbjj/absorber.hpp"
#include "cbjj/errors.hpp"
#include "cbjj/propagator.hpp"

namespace cbjj {

namespace {

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = (int)x.size();
  double sx = 0.0, sy = 0.0;
  for (int i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw numerical_error("fit_slope: degenerate abscissa");
  return sxy / sxx;
}

// asymptotic decay rate of one static run: least squares of -ln norm2 vs t
// over the tail half of the samples, past the initial transient
double tail_rate(const TrajectoryRecord& tr) {
  const int n = tr.size();
  std::vector<double> x, y;
  for (int i = n / 2; i < n; ++i) {
    if (!(tr.norm2[i] > 0.0)) break;
    x.push_back(tr.t[i]);
    y.push_back(-std::log(tr.norm2[i]));
  }
  if ((int)x.size() < 4) throw numerical_error("tail_rate: too few tail samples");
  return fit_slope(x, y);
}

}  // namespace

CalibrationResult calibrate_beta(const JunctionConfig& cfg, double I_ref,
                                 double beta_lo, double beta_hi, int n_beta,
                                 double t_run) {
  if (!(beta_lo > 0.0 && beta_hi > beta_lo))
    throw validation_error("calibrate_beta: need 0 < beta_lo < beta_hi");
  if (n_beta < 4) throw validation_error("calibrate_beta: need n_beta >= 4");
  if (!(I_ref > 0.0 && I_ref < 1.0))
    throw validation_error("calibrate_beta: I_ref must lie in (0, 1)");
  if (!(t_run > 0.0)) throw validation_error("calibrate_beta: t_run must be positive");

  JunctionConfig base = cfg;
  base.I0 = I_ref;
  base.eta = 0.0;
  const BiasSchedule flat{I_ref, 0.0};

  Propagator seed(base, flat);
  const GroundStateResult gs = seed.ground_state(I_ref);

  const double gamma_cl = caldeira_leggett_rate(I_ref, cfg.omega0, cfg.q_damp);
  const StopSpec stop{1e-12, 1.0, t_run};

  CalibrationResult res;
  res.table.resize(n_beta);
  for (int k = 0; k < n_beta; ++k) {
    JunctionConfig c = base;
    c.beta = beta_lo * std::pow(beta_hi / beta_lo, double(k) / (n_beta - 1));
    Propagator prop(c, flat);
    const TrajectoryRecord tr = prop.propagate(gs.psi, stop, 50);
    res.table[k] = {c.beta, tail_rate(tr), 0.0};
    res.table[k].cl_ratio = res.table[k].fitted_rate / gamma_cl;
  }

  // plateau: contiguous adjacent pairs whose rate changes by under 20% per
  // decade of beta; the widest such run wins
  const double per_decade = std::log(1.2);
  std::vector<char> flat_pair(n_beta - 1, 0);
  for (int k = 0; k + 1 < n_beta; ++k) {
    const double r0 = res.table[k].fitted_rate;
    const double r1 = res.table[k + 1].fitted_rate;
    if (r0 > 0.0 && r1 > 0.0) {
      const double dec = std::log10(res.table[k + 1].beta / res.table[k].beta);
      if (std::abs(std::log(r1 / r0)) < per_decade * dec) flat_pair[k] = 1;
    }
  }
  int best_lo = -1, best_len = 0;
  for (int k = 0; k + 1 < n_beta;) {
    if (!flat_pair[k]) {
      ++k;
      continue;
    }
    int j = k;
    while (j + 1 < n_beta && flat_pair[j]) ++j;
    if (j - k > best_len) {
      best_len = j - k;
      best_lo = k;
    }
    k = j;
  }
  if (best_len == 0) {
    std::ostringstream os;
    os << "calibrate_beta: no rate plateau in beta; table:";
    for (const auto& p : res.table) os << " (" << p.beta << ", " << p.fitted_rate << ")";
    throw numerical_error(os.str());
  }
  res.plateau_lo = res.table[best_lo].beta;
  res.plateau_hi = res.table[best_lo + best_len].beta;
  res.beta_star = std::sqrt(res.plateau_lo * res.plateau_hi);
  int nearest = 0;
  for (int k = 1; k < n_beta; ++k)
    if (std::abs(std::log(res.table[k].beta / res.beta_star)) <
        std::abs(std::log(res.table[nearest].beta / res.beta_star)))
      nearest = k;
  res.rate_at_beta_star = res.table[nearest].fitted_rate;

  // instrumented rerun at beta_star: removed norm per window against the
  // current through phi_turn, averaged over the tail half
  {
    JunctionConfig c = base;
    c.beta = res.beta_star;
    Propagator prop(c, flat);
    prop.load(gs.psi);
    const double b = absorber_bias(I_ref);
    const double pturn =
        outer_turning_point(b, default_turning_energy(b, c.omega0));
    const int steps = (int)std::llround(t_run / c.dt);
    const int half = steps / 2;
    double loss = 0.0, flux = 0.0, wloss = 0.0;
    int wsteps = 0;
    for (int s = 0; s < steps; ++s) {
      const StepLosses l = prop.step();
      if (s < half) continue;
      wloss += l.tunnel;
      if (++wsteps == 10) {
        loss += wloss;
        flux += probability_current(prop.state(), c.mass(), pturn) * wsteps * c.dt;
        wloss = 0.0;
        wsteps = 0;
      }
    }
    res.absorbed_flux_ratio = flux > 0.0 ? loss / flux : 0.0;
  }
  return res;
}

}  // namespace cbjj
