#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cbjj/errors.hpp"
#include "cbjj/experiment.hpp"

namespace cbjj {

std::string format_float(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_compact(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 8);
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += (char)c;
        }
    }
  }
  return out;
}

std::string trajectory_csv(const TrajectoryRecord& tr) {
  std::string out = "t,I,norm2,gamma_t,phi_mean,tunnel_loss,friction_loss\n";
  for (int i = 0; i < tr.size(); ++i) {
    out += format_float(tr.t[i]);
    out += ',';
    out += format_float(tr.bias[i]);
    out += ',';
    out += format_float(tr.norm2[i]);
    out += ',';
    out += format_float(tr.gamma_t[i]);
    out += ',';
    out += format_float(tr.phi_mean[i]);
    out += ',';
    out += format_float(tr.tunnel_loss[i]);
    out += ',';
    out += format_float(tr.friction_loss[i]);
    out += '\n';
  }
  return out;
}

std::string distribution_csv(const SwitchingDistribution& d) {
  std::string out = "axis,density\n";
  for (size_t i = 0; i < d.axis.size(); ++i) {
    out += format_float(d.axis[i]);
    out += ',';
    out += format_float(d.density[i]);
    out += '\n';
  }
  return out;
}

std::string distribution_json(const SwitchingDistribution& d) {
  const PeakInfo p = d.axis.empty() ? PeakInfo{} : peak_info(d);
  std::string out = "{\n";
  out += "  \"kind\": \"" + json_escape(d.kind) + "\",\n";
  out += "  \"total_mass\": " + format_float(d.total_mass) + ",\n";
  out += "  \"peak\": " + format_float(p.position) + ",\n";
  out += "  \"fwhm\": " + format_float(p.fwhm) + "\n";
  out += "}\n";
  return out;
}

std::string calibration_csv(const CalibrationResult& c) {
  std::string out = "beta,fitted_rate,cl_ratio\n";
  for (const auto& p : c.table) {
    out += format_float(p.beta);
    out += ',';
    out += format_float(p.fitted_rate);
    out += ',';
    out += format_float(p.cl_ratio);
    out += '\n';
  }
  return out;
}

std::string calibration_json(const CalibrationResult& c) {
  std::string out = "{\n";
  out += "  \"beta_star\": " + format_float(c.beta_star) + ",\n";
  out += "  \"plateau_lo\": " + format_float(c.plateau_lo) + ",\n";
  out += "  \"plateau_hi\": " + format_float(c.plateau_hi) + ",\n";
  out += "  \"rate_at_beta_star\": " + format_float(c.rate_at_beta_star) + "\n";
  out += "}\n";
  return out;
}

std::string comparison_json(const ComparisonMetrics& m) {
  std::string out = "{\n";
  out += "  \"peak_location_a\": " + format_float(m.peak_location_a) + ",\n";
  out += "  \"peak_location_b\": " + format_float(m.peak_location_b) + ",\n";
  out += "  \"peak_shift\": " + format_float(m.peak_shift) + ",\n";
  out += "  \"l1_distance\": " + format_float(m.l1_distance) + ",\n";
  out += "  \"width_a\": " + format_float(m.width_a) + ",\n";
  out += "  \"width_b\": " + format_float(m.width_b) + "\n";
  out += "}\n";
  return out;
}

std::string sweep_summary_json(const SweepOutcome& o) {
  std::string out = "{\n";
  out += "  \"cells_total\": " + std::to_string(o.cells.size()) + ",\n";
  out += "  \"cells_failed\": " + std::to_string(o.failed_count) + ",\n";
  out += "  \"cells\": [\n";
  for (size_t i = 0; i < o.cells.size(); ++i) {
    const SweepCell& c = o.cells[i];
    out += "    {\"dir\": \"" + json_escape(c.dir_name) + "\", \"params\": {";
    for (size_t k = 0; k < c.params.size(); ++k) {
      if (k) out += ", ";
      out += "\"" + json_escape(c.params[k].first) +
             "\": " + format_float(c.params[k].second);
    }
    out += "}, ";
    if (c.failed) {
      out += "\"status\": \"error\", \"type\": \"" + json_escape(c.error_type) +
             "\", \"message\": \"" + json_escape(c.error) + "\"}";
    } else if (c.has_distribution) {
      out += "\"status\": \"ok\", \"total_mass\": " + format_float(c.total_mass) +
             ", \"peak\": " + format_float(c.peak.position) +
             ", \"fwhm\": " + format_float(c.peak.fwhm) + "}";
    } else {
      out += "\"status\": \"ok\"}";
    }
    out += i + 1 < o.cells.size() ? ",\n" : "\n";
  }
  out += "  ]\n}\n";
  return out;
}

std::string stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::norm_floor: return "norm-floor";
    case StopReason::bias_ceiling: return "bias-ceiling";
    case StopReason::time_limit: return "time-limit";
  }
  return "unknown";
}

void write_text_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
  std::ofstream f(p, std::ios::binary);
  if (!f) throw validation_error("cannot write file: " + path);
  f.write(content.data(), (std::streamsize)content.size());
  f.flush();
  if (!f) throw validation_error("write failed: " + path);
}

}  // namespace cbjj
