#include <chrono>
#include <cstdio>
#include <string>
#include <utility>

#include "CLI11.hpp"
#include "cbjj/errors.hpp"
#include "cbjj/experiment.hpp"
#include "cbjj/version.hpp"

namespace {

std::string manifest_json(const cbjj::ExperimentSpec& spec, double wall_seconds,
                          long cells_total, long cells_failed) {
  std::string j = "{\n";
  j += "  \"config_hash\": \"" + cbjj::config_hash_hex(spec) + "\",\n";
  j += "  \"version\": \"" + std::string(cbjj::kVersion) + "\",\n";
  j += "  \"mode\": \"" + cbjj::mode_name(spec.mode) + "\",\n";
  if (cells_total >= 0) {
    j += "  \"cells_total\": " + std::to_string(cells_total) + ",\n";
    j += "  \"cells_failed\": " + std::to_string(cells_failed) + ",\n";
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", wall_seconds);
  j += "  \"wall_seconds\": " + std::string(buf) + "\n";
  j += "}\n";
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wave-packet switching simulator for a biased Josephson junction"};
  app.set_version_flag("--version", cbjj::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  int workers = 1;
  int stride = 0;  // 0 keeps the config value

  const std::pair<const char*, cbjj::Mode> subcommands[] = {
      {"ground-state", cbjj::Mode::ground_state},
      {"calibrate-beta", cbjj::Mode::calibrate},
      {"ramp", cbjj::Mode::ramp},
      {"constant-bias", cbjj::Mode::constant_bias},
      {"sweep", cbjj::Mode::sweep},
      {"compare-cl", cbjj::Mode::compare_cl},
  };
  for (const auto& [name, mode] : subcommands) {
    CLI::App* sc = app.add_subcommand(name, "run in " + std::string(name) + " mode");
    sc->add_option("--config", config_path, "experiment config file")->required();
    sc->add_option("--out", out_dir, "output directory (default: out)");
    sc->add_option("--workers", workers, "parallel sweep workers")
        ->check(CLI::PositiveNumber);
    sc->add_option("--stride", stride, "output stride override")
        ->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // fold CLI11's usage-error codes into the validation exit code
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  cbjj::Mode want = cbjj::Mode::ramp;
  for (const auto& [name, mode] : subcommands)
    if (app.got_subcommand(name)) want = mode;

  try {
    cbjj::ExperimentSpec spec = cbjj::load_config(config_path);
    if (spec.mode_explicit && spec.mode != want)
      throw cbjj::validation_error("config mode '" + cbjj::mode_name(spec.mode) +
                                   "' does not match subcommand '" +
                                   cbjj::mode_name(want) + "'");
    spec.mode = want;
    spec.mode_explicit = true;
    if (stride > 0) spec.stride = stride;
    spec.validate();

    const auto t0 = std::chrono::steady_clock::now();
    auto wall = [&t0]() {
      return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
    };

    if (want == cbjj::Mode::sweep) {
      const cbjj::SweepOutcome outcome =
          cbjj::run_sweep(spec, out_dir + "/sweep", workers);
      cbjj::write_text_file(
          out_dir + "/manifest.json",
          manifest_json(spec, wall(), (long)outcome.cells.size(),
                        outcome.failed_count));
      std::printf("sweep: %zu cells, %d failed, out = %s\n", outcome.cells.size(),
                  outcome.failed_count, out_dir.c_str());
      return outcome.failed_count > 0 ? 3 : 0;
    }

    const cbjj::RunSummary rs =
        cbjj::run_into(spec, out_dir + "/" + cbjj::mode_name(want));
    cbjj::write_text_file(out_dir + "/manifest.json",
                          manifest_json(spec, wall(), -1, -1));
    std::printf("%s\n", rs.line.c_str());
    return 0;
  } catch (const cbjj::validation_error& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 1;
  } catch (const cbjj::numerical_error& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
