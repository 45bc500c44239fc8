#include <atomic>
#include <filesystem>
#include <thread>

#include "cbjj/errors.hpp"
#include "cbjj/experiment.hpp"

namespace cbjj {

namespace {
std::string short_key(const std::string& key) {
  const size_t dot = key.rfind('.');
  return dot == std::string::npos ? key : key.substr(dot + 1);
}
}  // namespace

SweepOutcome run_sweep(const ExperimentSpec& spec, const std::string& out_dir,
                       int workers) {
  if (spec.mode != Mode::sweep)
    throw validation_error("run_sweep: spec mode is not sweep");
  spec.validate();

  size_t total = 1;
  for (const auto& ax : spec.sweep_axes) total *= ax.values.size();

  SweepOutcome out;
  out.cells.resize(total);
  for (size_t idx = 0; idx < total; ++idx) {
    SweepCell& cell = out.cells[idx];
    cell.params.resize(spec.sweep_axes.size());
    size_t rem = idx;  // grid order: last axis fastest
    for (int a = (int)spec.sweep_axes.size() - 1; a >= 0; --a) {
      const auto& ax = spec.sweep_axes[a];
      cell.params[a] = {ax.key, ax.values[rem % ax.values.size()]};
      rem /= ax.values.size();
    }
    std::string dir;
    for (size_t a = 0; a < cell.params.size(); ++a) {
      if (a) dir += ',';
      dir += short_key(cell.params[a].first) + "=" +
             format_compact(cell.params[a].second);
    }
    cell.dir_name = dir;
  }
  std::filesystem::create_directories(out_dir);

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t idx; (idx = next.fetch_add(1)) < total;) {
      SweepCell& cell = out.cells[idx];
      try {
        ExperimentSpec cs = spec;
        cs.mode = spec.sweep_mode;
        cs.mode_explicit = true;
        cs.sweep_axes.clear();
        for (const auto& [key, value] : cell.params) apply_override(cs, key, value);
        cs.validate();
        const RunSummary rs = run_into(cs, out_dir + "/" + cell.dir_name);
        cell.has_distribution = rs.has_distribution;
        cell.total_mass = rs.total_mass;
        cell.peak = rs.peak;
      } catch (const validation_error& e) {
        cell.failed = true;
        cell.error_type = "validation";
        cell.error = e.what();
      } catch (const numerical_error& e) {
        cell.failed = true;
        cell.error_type = "numerical";
        cell.error = e.what();
      } catch (const std::exception& e) {
        cell.failed = true;
        cell.error_type = "error";
        cell.error = e.what();
      }
      if (cell.failed) {
        try {
          write_text_file(out_dir + "/" + cell.dir_name + "/error.json",
                          std::string("{\n  \"status\": \"error\",\n  \"type\": \"") +
                              json_escape(cell.error_type) + "\",\n  \"message\": \"" +
                              json_escape(cell.error) + "\"\n}\n");
        } catch (...) {
          // the cell is already marked failed; nothing more to record
        }
      }
    }
  };

  const int pool_size = std::max(1, std::min<int>(workers, (int)total));
  std::vector<std::thread> pool;
  for (int i = 1; i < pool_size; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  for (const auto& c : out.cells) out.failed_count += c.failed ? 1 : 0;
  write_text_file(out_dir + "/summary.json", sweep_summary_json(out));
  return out;
}

}  // namespace cbjj
