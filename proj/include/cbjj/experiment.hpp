#pragma once
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cbjj/absorber.hpp"
#include "cbjj/junction.hpp"
#include "cbjj/propagator.hpp"
#include "cbjj/switching.hpp"

namespace cbjj {

enum class Mode { ground_state, calibrate, ramp, constant_bias, sweep, compare_cl };

std::string mode_name(Mode m);              // canonical hyphenated spelling
Mode mode_from_name(const std::string& s);  // accepts hyphen and underscore forms

struct CalibrateSpec {
  double I_ref = 0.0;  // 0 resolves to bias.I0 at parse time
  double beta_lo = 1e-3;
  double beta_hi = 10.0;
  int n_beta = 13;
  double t_run = 6000.0;
};

struct SweepAxis {
  std::string key;  // dotted config key, e.g. "drive.eta"
  std::vector<double> values;
};

struct ExperimentSpec {
  Mode mode = Mode::ramp;
  bool mode_explicit = false;  // was the mode key present in the config text
  JunctionConfig junction;
  StopSpec stop;
  int stride = 10;
  CalibrateSpec calibrate;
  Mode sweep_mode = Mode::ramp;
  std::vector<SweepAxis> sweep_axes;  // sorted by key

  void validate() const;
};

// Flat key=value text with dotted section names and '#' comments. All
// defaults are resolved at parse time (the grid window derives from bias.I0
// when absent); unknown or malformed keys are rejected by name.
ExperimentSpec parse_config(const std::string& text);
ExperimentSpec load_config(const std::string& path);

// Canonical echo: fixed key order, 17-significant-digit floats; reparsing the
// echo reproduces the spec exactly.
std::string serialize_config(const ExperimentSpec& spec);
std::uint64_t config_hash(const ExperimentSpec& spec);  // FNV-1a 64 of the echo
std::string config_hash_hex(const ExperimentSpec& spec);

bool sweepable_key(const std::string& key);
void apply_override(ExperimentSpec& spec, const std::string& key, double value);

struct RunResult {
  GroundStateResult ground;
  TrajectoryRecord trajectory;
  SwitchingDistribution distribution;
};

RunResult run_ramp(const ExperimentSpec& spec);
RunResult run_constant_bias(const ExperimentSpec& spec);

struct CompareClResult {
  RunResult run;
  SwitchingDistribution cl;
  ComparisonMetrics metrics;
};
CompareClResult run_compare_cl(const ExperimentSpec& spec);

// Executes one non-sweep spec and writes its files under dir.
struct RunSummary {
  bool has_distribution = false;
  double total_mass = 0.0;
  PeakInfo peak;
  std::string line;  // one-line human summary
};
RunSummary run_into(const ExperimentSpec& spec, const std::string& dir);

struct SweepCell {
  std::vector<std::pair<std::string, double>> params;  // axis order
  std::string dir_name;
  bool failed = false;
  std::string error_type;  // "validation" | "numerical" | "error"
  std::string error;
  bool has_distribution = false;
  double total_mass = 0.0;
  PeakInfo peak;
};

struct SweepOutcome {
  std::vector<SweepCell> cells;  // grid order, last axis fastest
  int failed_count = 0;
};

// Expands the cartesian grid, runs cells on `workers` threads (cells share
// nothing; any worker count yields bit-identical files), emits each cell under
// out_dir/<tuple>/ and a summary.json in out_dir.
SweepOutcome run_sweep(const ExperimentSpec& spec, const std::string& out_dir,
                       int workers);

// serialization helpers (stable byte-for-byte output)
std::string format_float(double v);     // %.17g
std::string format_compact(double v);   // shortest round-trip, for dir names
std::string json_escape(const std::string& s);
std::string trajectory_csv(const TrajectoryRecord& tr);
std::string distribution_csv(const SwitchingDistribution& d);
std::string distribution_json(const SwitchingDistribution& d);
std::string calibration_csv(const CalibrationResult& c);
std::string calibration_json(const CalibrationResult& c);
std::string comparison_json(const ComparisonMetrics& m);
std::string sweep_summary_json(const SweepOutcome& o);
std::string stop_reason_name(StopReason r);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace cbjj
