#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "risim/harness.hpp"
#include "risim/io.hpp"

using namespace risim;

int main(int argc, char** argv) {
  CLI::App app{"RIS-aided WiFi imaging: simulation, beamforming, reconstruction"};
  app.require_subcommand(1);
  app.fallthrough();  // accept the global options after a subcommand too

  RunOptions opts;
  std::uint64_t seed = 0;
  bool seed_given = false;
  app.add_option("--out", opts.out_root, "Output root (default $RISIM_OUT_ROOT or ./out)");
  app.add_option("--seed", seed, "Override the config seed")->each([&](std::string) {
    seed_given = true;
  });
  app.add_option("--threads", opts.threads, "Worker thread count (0 = library default)");
  app.add_option("--configs", opts.configs_dir, "Config directory (default ./configs)");

  std::string run_config;
  auto* run_cmd = app.add_subcommand("run", "Run one experiment config");
  run_cmd->add_option("config", run_config, "Path to a .cfg experiment file")->required();

  std::string suite_name;
  auto* suite_cmd = app.add_subcommand("suite", "Run a named suite (or a directory with a manifest)");
  suite_cmd->add_option("name", suite_name, "Suite name under configs/suites, or a directory")
      ->required();

  std::string h_config, h_path;
  auto* export_cmd = app.add_subcommand("export-h", "Write the measurement operator of a config");
  export_cmd->add_option("config", h_config, "Path to a .cfg experiment file")->required();
  export_cmd->add_option("path", h_path, "Destination (.csv for text, else binary)")->required();

  CLI11_PARSE(app, argc, argv);
  if (seed_given) opts.seed = seed;

  try {
    if (*run_cmd) {
      RunResult r = run_experiment_file(run_config, opts);
      std::printf("%s  rmse=%.4f  ssim=%.4f  -> %s\n", r.report.method.c_str(), r.report.rmse,
                  r.report.ssim, r.output_dir.c_str());
    } else if (*suite_cmd) {
      SuiteResult s = run_suite(suite_name, opts);
      for (const auto& row : s.rows) {
        if (row.ok) {
          std::printf("ok    %-32s rmse=%.4f ssim=%.4f\n", row.config_path.c_str(),
                      row.report.rmse, row.report.ssim);
        } else {
          std::printf("FAIL  %-32s %s\n", row.config_path.c_str(), row.error.c_str());
        }
      }
      std::printf("suite %s -> %s\n", s.name.c_str(), s.output_dir.c_str());
      if (!s.all_ok()) return 1;
    } else if (*export_cmd) {
      std::vector<std::string> warnings;
      ExperimentConfig cfg = load_experiment_config(h_config, &warnings);
      for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
      apply_thread_count(opts.threads);
      TransferMatrix H = build_transfer_matrix(cfg.scene, cfg.attenuation, cfg.quantization_bits);
      write_transfer_matrix(h_path, H);
      std::printf("wrote %ldx%ld operator to %s\n", (long)H.h.rows(), (long)H.h.cols(),
                  h_path.c_str());
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
