#include "cbjj/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <climits>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "cbjj/errors.hpp"

namespace cbjj {

std::string mode_name(Mode m) {
  switch (m) {
    case Mode::ground_state: return "ground-state";
    case Mode::calibrate: return "calibrate-beta";
    case Mode::ramp: return "ramp";
    case Mode::constant_bias: return "constant-bias";
    case Mode::sweep: return "sweep";
    case Mode::compare_cl: return "compare-cl";
  }
  throw validation_error("mode_name: bad mode value");
}

Mode mode_from_name(const std::string& s) {
  std::string t = s;
  std::replace(t.begin(), t.end(), '_', '-');
  if (t == "ground-state") return Mode::ground_state;
  if (t == "calibrate-beta" || t == "calibrate") return Mode::calibrate;
  if (t == "ramp") return Mode::ramp;
  if (t == "constant-bias") return Mode::constant_bias;
  if (t == "sweep") return Mode::sweep;
  if (t == "compare-cl") return Mode::compare_cl;
  throw validation_error("unknown mode: " + s);
}

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace((unsigned char)s[a])) ++a;
  while (b > a && std::isspace((unsigned char)s[b - 1])) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& v) {
  const char* c = v.c_str();
  char* end = nullptr;
  const double x = std::strtod(c, &end);
  if (end == c || *end != '\0' || !std::isfinite(x))
    throw validation_error("config key " + key + ": not a finite number: '" + v + "'");
  return x;
}

int parse_int(const std::string& key, const std::string& v) {
  const char* c = v.c_str();
  char* end = nullptr;
  const long x = std::strtol(c, &end, 10);
  if (end == c || *end != '\0' || x < INT_MIN || x > INT_MAX)
    throw validation_error("config key " + key + ": not an integer: '" + v + "'");
  return (int)x;
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  size_t pos = 0;
  while (true) {
    const size_t comma = v.find(',', pos);
    const std::string tok =
        trim(comma == std::string::npos ? v.substr(pos) : v.substr(pos, comma - pos));
    if (tok.empty())
      throw validation_error("config key " + key + ": empty list element");
    out.push_back(parse_double(key, tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

void ExperimentSpec::validate() const {
  junction.validate();
  if (stride < 1) throw validation_error("config: output.stride must be >= 1");
  if (!(stop.norm_floor >= 0.0))
    throw validation_error("config: stop.norm_floor must be >= 0");
  if (!(stop.I_ceiling > 0.0 && stop.I_ceiling <= 1.0))
    throw validation_error("config: stop.I_ceiling must lie in (0, 1]");
  if (!(stop.t_max > 0.0)) throw validation_error("config: stop.t_max must be positive");
  if (!(calibrate.I_ref > 0.0 && calibrate.I_ref < 1.0))
    throw validation_error("config: calibrate.I_ref must lie in (0, 1)");
  if (!(calibrate.beta_lo > 0.0 && calibrate.beta_hi > calibrate.beta_lo))
    throw validation_error("config: calibrate betas need 0 < beta_lo < beta_hi");
  if (calibrate.n_beta < 4)
    throw validation_error("config: calibrate.n_beta must be >= 4");
  if (!(calibrate.t_run > 0.0))
    throw validation_error("config: calibrate.t_run must be positive");
  if (mode == Mode::sweep) {
    if (sweep_axes.empty())
      throw validation_error("config: sweep mode requires at least one sweep.axis.* key");
    if (sweep_mode == Mode::sweep)
      throw validation_error("config: sweep.mode cannot itself be sweep");
    for (const auto& ax : sweep_axes) {
      if (ax.values.empty())
        throw validation_error("config: sweep axis " + ax.key + " has no values");
      if (!sweepable_key(ax.key))
        throw validation_error("config: sweep axis " + ax.key + " is not sweepable");
    }
  }
}

ExperimentSpec parse_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw validation_error("config line " + std::to_string(lineno) +
                             ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw validation_error("config line " + std::to_string(lineno) + ": empty key");
    if (!kv.emplace(key, val).second)
      throw validation_error("duplicate config key: " + key);
  }

  ExperimentSpec spec;
  auto take = [&kv](const std::string& key) -> std::optional<std::string> {
    const auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::optional<std::string> v = it->second;
    kv.erase(it);
    return v;
  };
  auto take_double = [&](const std::string& key, double dflt) {
    const auto v = take(key);
    return v ? parse_double(key, *v) : dflt;
  };
  auto take_int = [&](const std::string& key, int dflt) {
    const auto v = take(key);
    return v ? parse_int(key, *v) : dflt;
  };

  if (const auto m = take("mode")) {
    spec.mode = mode_from_name(*m);
    spec.mode_explicit = true;
  }
  JunctionConfig& j = spec.junction;
  j.omega0 = take_double("physics.omega0", j.omega0);
  j.zeta = take_double("physics.zeta", j.zeta);
  j.q_damp = take_double("physics.q_damp", j.q_damp);
  j.eta = take_double("drive.eta", j.eta);
  j.omega_mw = take_double("drive.omega_mw", j.omega_mw);
  j.beta = take_double("absorber.beta", j.beta);
  j.I0 = take_double("bias.I0", j.I0);
  j.dIdt = take_double("bias.dIdt", j.dIdt);
  if (!(j.I0 > 0.0 && j.I0 < 1.0))
    throw validation_error("config: I0 must lie in (0, 1)");
  // default grid window anchors on the well at the starting bias
  const double anchor = std::asin(j.I0);
  j.grid.phi_lo = take_double("grid.phi_lo", anchor - 3.0);
  j.grid.phi_hi = take_double("grid.phi_hi", anchor + 45.0);
  j.grid.n_points = take_int("grid.n", j.grid.n_points);
  j.dt = take_double("time.dt", j.dt);
  spec.stop.norm_floor = take_double("stop.norm_floor", spec.stop.norm_floor);
  spec.stop.I_ceiling = take_double("stop.I_ceiling", spec.stop.I_ceiling);
  spec.stop.t_max = take_double("stop.t_max", spec.stop.t_max);
  spec.stride = take_int("output.stride", spec.stride);
  spec.calibrate.I_ref = take_double("calibrate.I_ref", j.I0);
  spec.calibrate.beta_lo = take_double("calibrate.beta_lo", spec.calibrate.beta_lo);
  spec.calibrate.beta_hi = take_double("calibrate.beta_hi", spec.calibrate.beta_hi);
  spec.calibrate.n_beta = take_int("calibrate.n_beta", spec.calibrate.n_beta);
  spec.calibrate.t_run = take_double("calibrate.t_run", spec.calibrate.t_run);

  if (const auto m = take("sweep.mode")) {
    if (spec.mode != Mode::sweep)
      throw validation_error("config key sweep.mode requires mode = sweep");
    spec.sweep_mode = mode_from_name(*m);
  }
  const std::string axis_prefix = "sweep.axis.";
  std::vector<std::string> axis_keys;
  for (const auto& [k, v] : kv)
    if (k.rfind(axis_prefix, 0) == 0) axis_keys.push_back(k);
  for (const std::string& k : axis_keys) {
    const std::string param = k.substr(axis_prefix.size());
    if (spec.mode != Mode::sweep)
      throw validation_error("config key " + k + " requires mode = sweep");
    if (!sweepable_key(param))
      throw validation_error("config key " + k + ": '" + param +
                             "' is not a sweepable parameter");
    const auto v = take(k);
    spec.sweep_axes.push_back({param, parse_list(k, *v)});
  }

  if (!kv.empty()) throw validation_error("unknown config key: " + kv.begin()->first);
  spec.validate();
  return spec;
}

ExperimentSpec load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw validation_error("cannot read config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentSpec& s) {
  std::string out;
  auto put = [&out](const std::string& k, const std::string& v) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  };
  auto putf = [&](const std::string& k, double v) { put(k, format_float(v)); };
  put("mode", mode_name(s.mode));
  putf("physics.omega0", s.junction.omega0);
  putf("physics.zeta", s.junction.zeta);
  putf("physics.q_damp", s.junction.q_damp);
  putf("drive.eta", s.junction.eta);
  putf("drive.omega_mw", s.junction.omega_mw);
  putf("absorber.beta", s.junction.beta);
  putf("bias.I0", s.junction.I0);
  putf("bias.dIdt", s.junction.dIdt);
  putf("grid.phi_lo", s.junction.grid.phi_lo);
  putf("grid.phi_hi", s.junction.grid.phi_hi);
  put("grid.n", std::to_string(s.junction.grid.n_points));
  putf("time.dt", s.junction.dt);
  putf("stop.norm_floor", s.stop.norm_floor);
  putf("stop.I_ceiling", s.stop.I_ceiling);
  putf("stop.t_max", s.stop.t_max);
  put("output.stride", std::to_string(s.stride));
  putf("calibrate.I_ref", s.calibrate.I_ref);
  putf("calibrate.beta_lo", s.calibrate.beta_lo);
  putf("calibrate.beta_hi", s.calibrate.beta_hi);
  put("calibrate.n_beta", std::to_string(s.calibrate.n_beta));
  putf("calibrate.t_run", s.calibrate.t_run);
  if (s.mode == Mode::sweep) {
    put("sweep.mode", mode_name(s.sweep_mode));
    for (const auto& ax : s.sweep_axes) {
      std::string v;
      for (size_t i = 0; i < ax.values.size(); ++i) {
        if (i) v += ", ";
        v += format_float(ax.values[i]);
      }
      put("sweep.axis." + ax.key, v);
    }
  }
  return out;
}

std::uint64_t config_hash(const ExperimentSpec& spec) {
  const std::string s = serialize_config(spec);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash_hex(const ExperimentSpec& spec) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)config_hash(spec));
  return buf;
}

bool sweepable_key(const std::string& key) {
  return key == "drive.eta" || key == "drive.omega_mw" || key == "absorber.beta" ||
         key == "bias.I0" || key == "bias.dIdt" || key == "physics.zeta" ||
         key == "time.dt";
}

void apply_override(ExperimentSpec& spec, const std::string& key, double value) {
  JunctionConfig& j = spec.junction;
  if (key == "drive.eta") j.eta = value;
  else if (key == "drive.omega_mw") j.omega_mw = value;
  else if (key == "absorber.beta") j.beta = value;
  else if (key == "bias.I0") j.I0 = value;
  else if (key == "bias.dIdt") j.dIdt = value;
  else if (key == "physics.zeta") j.zeta = value;
  else if (key == "time.dt") j.dt = value;
  else throw validation_error("cannot override config key: " + key);
}

RunResult run_ramp(const ExperimentSpec& spec) {
  if (!(spec.junction.dIdt > 0.0))
    throw validation_error("ramp: bias.dIdt must be positive");
  Propagator prop(spec.junction, BiasSchedule{spec.junction.I0, spec.junction.dIdt});
  RunResult r;
  r.ground = prop.ground_state(spec.junction.I0);
  r.trajectory = prop.propagate(r.ground.psi, spec.stop, spec.stride);
  r.distribution = switching_distribution(r.trajectory, spec.junction.dIdt);
  return r;
}

RunResult run_constant_bias(const ExperimentSpec& spec) {
  Propagator prop(spec.junction, BiasSchedule{spec.junction.I0, 0.0});
  RunResult r;
  r.ground = prop.ground_state(spec.junction.I0);
  r.trajectory = prop.propagate(r.ground.psi, spec.stop, spec.stride);
  r.distribution = time_resolved_distribution(r.trajectory);
  return r;
}

CompareClResult run_compare_cl(const ExperimentSpec& spec) {
  CompareClResult c;
  c.run = run_ramp(spec);
  c.cl = cl_distribution(c.run.distribution.axis, spec.junction.dIdt, spec.junction);
  c.metrics = compare(c.run.distribution, c.cl);
  return c;
}

RunSummary run_into(const ExperimentSpec& spec, const std::string& dir) {
  RunSummary s;
  switch (spec.mode) {
    case Mode::ground_state: {
      Propagator prop(spec.junction, BiasSchedule{spec.junction.I0, 0.0});
      const GroundStateResult gs = prop.ground_state(spec.junction.I0);
      const double u_min =
          tilted_washboard(std::asin(spec.junction.I0), spec.junction.I0);
      const double wp = plasma_frequency(spec.junction.I0, spec.junction.omega0);
      std::string j = "{\n";
      j += "  \"I0\": " + format_float(spec.junction.I0) + ",\n";
      j += "  \"energy\": " + format_float(gs.energy) + ",\n";
      j += "  \"energy_minus_well_bottom\": " + format_float(gs.energy - u_min) + ",\n";
      j += "  \"half_omega_p\": " + format_float(0.5 * wp) + ",\n";
      j += "  \"iterations\": " + std::to_string(gs.iterations) + "\n";
      j += "}\n";
      write_text_file(dir + "/ground_state.json", j);
      s.line = "ground-state: E0 = " + format_compact(gs.energy) +
               ", E0 - U_min = " + format_compact(gs.energy - u_min) +
               ", half omega_p = " + format_compact(0.5 * wp) +
               ", iterations = " + std::to_string(gs.iterations);
      break;
    }
    case Mode::calibrate: {
      const CalibrationResult c =
          calibrate_beta(spec.junction, spec.calibrate.I_ref, spec.calibrate.beta_lo,
                         spec.calibrate.beta_hi, spec.calibrate.n_beta,
                         spec.calibrate.t_run);
      write_text_file(dir + "/calibration.csv", calibration_csv(c));
      write_text_file(dir + "/calibration.json", calibration_json(c));
      s.line = "calibrate-beta: beta* = " + format_compact(c.beta_star) +
               ", rate = " + format_compact(c.rate_at_beta_star) +
               ", plateau = [" + format_compact(c.plateau_lo) + ", " +
               format_compact(c.plateau_hi) +
               "], absorbed/flux = " + format_compact(c.absorbed_flux_ratio);
      break;
    }
    case Mode::ramp:
    case Mode::constant_bias: {
      const RunResult r =
          spec.mode == Mode::ramp ? run_ramp(spec) : run_constant_bias(spec);
      write_text_file(dir + "/trajectory.csv", trajectory_csv(r.trajectory));
      write_text_file(dir + "/distribution.csv", distribution_csv(r.distribution));
      write_text_file(dir + "/distribution.json", distribution_json(r.distribution));
      s.has_distribution = true;
      s.total_mass = r.distribution.total_mass;
      s.peak = peak_info(r.distribution);
      s.line = mode_name(spec.mode) + ": stop = " +
               stop_reason_name(r.trajectory.stop) +
               ", switched mass = " + format_compact(r.distribution.total_mass) +
               ", final norm2 = " + format_compact(r.trajectory.norm2.back()) +
               ", peak = " + format_compact(s.peak.position);
      break;
    }
    case Mode::compare_cl: {
      const CompareClResult c = run_compare_cl(spec);
      write_text_file(dir + "/trajectory.csv", trajectory_csv(c.run.trajectory));
      write_text_file(dir + "/distribution.csv", distribution_csv(c.run.distribution));
      write_text_file(dir + "/distribution.json", distribution_json(c.run.distribution));
      write_text_file(dir + "/cl_distribution.csv", distribution_csv(c.cl));
      write_text_file(dir + "/cl_distribution.json", distribution_json(c.cl));
      write_text_file(dir + "/comparison.json", comparison_json(c.metrics));
      s.has_distribution = true;
      s.total_mass = c.run.distribution.total_mass;
      s.peak = peak_info(c.run.distribution);
      s.line = "compare-cl: peak = " + format_compact(c.metrics.peak_location_a) +
               ", cl peak = " + format_compact(c.metrics.peak_location_b) +
               ", peak_shift = " + format_compact(c.metrics.peak_shift) +
               ", l1 = " + format_compact(c.metrics.l1_distance);
      break;
    }
    case Mode::sweep:
      throw validation_error("run_into: sweep mode is handled by run_sweep");
  }
  write_text_file(dir + "/resolved_config.cfg", serialize_config(spec));
  return s;
}

}  // namespace cbjj
