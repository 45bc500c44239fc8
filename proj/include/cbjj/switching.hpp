#pragma once
#include <functional>
#include <string>
#include <vector>

#include "cbjj/propagator.hpp"

namespace cbjj {

// Probability density over bias current ("current") or time ("time").
struct SwitchingDistribution {
  std::string kind;             // "current" or "time"
  std::vector<double> axis;     // strictly increasing
  std::vector<double> density;  // >= 0
  double total_mass = 0.0;
};

struct PeakInfo {
  double position = 0.0;
  double height = 0.0;
  double fwhm = 0.0;
  bool at_boundary = false;  // discrete max at an axis end or a missing
                             // half-height crossing
};

struct PeakCandidate {
  int index = 0;
  double position = 0.0;
  double height = 0.0;
  double prominence = 0.0;
};

struct ComparisonMetrics {
  double peak_location_a = 0.0;
  double peak_location_b = 0.0;
  double peak_shift = 0.0;  // b - a
  double l1_distance = 0.0;
  double width_a = 0.0;
  double width_b = 0.0;
};

// -d(ln norm2)/dt by centered log differences, one-sided at the ends; the
// series is truncated at the last sample with positive norm2.
std::vector<double> instantaneous_rate(const std::vector<double>& t,
                                       const std::vector<double>& norm2);
std::vector<double> instantaneous_rate(const TrajectoryRecord& tr);

// Tunnel-loss mass per sample window deposited onto a uniform axis covering
// the trajectory; density is mass per unit axis, so the distribution carries
// exactly the recorded total tunnel loss. n_bins = 0 uses one bin per window.
SwitchingDistribution switching_distribution(const TrajectoryRecord& tr,
                                             double dIdt, int n_bins = 0);
SwitchingDistribution time_resolved_distribution(const TrajectoryRecord& tr,
                                                 int n_bins = 0);

// Quasi-static switching density on a given axis for an arbitrary rate law:
//   P(x) = rate(x)/r * exp(-(1/r) int_{x_start}^{x} rate(u) du),
// cumulative integral by adaptive trapezoid to relative 1e-8.
SwitchingDistribution rate_distribution(const std::vector<double>& axis,
                                        double ramp_rate, double x_start,
                                        const std::function<double(double)>& rate);

// P_CL(I) for a linear ramp starting at cfg.I0, kind "current".
SwitchingDistribution cl_distribution(const std::vector<double>& I_axis,
                                      double dIdt, const JunctionConfig& cfg);

// Global maximum with parabolic sub-bin refinement and linearly interpolated
// full width at half maximum.
PeakInfo peak_info(const SwitchingDistribution& d);

// Interior local maxima with topographic prominence >= min_prominence,
// ascending in axis position.
std::vector<PeakCandidate> find_peaks(const SwitchingDistribution& d,
                                      double min_prominence);

// Resamples both densities onto a uniform axis over the overlap, normalizes
// each to unit mass there, and reports peak locations, widths, and the L1
// distance. Throws validation_error on mismatched kinds or empty overlap.
ComparisonMetrics compare(const SwitchingDistribution& a,
                          const SwitchingDistribution& b);

}  // namespace cbjj
