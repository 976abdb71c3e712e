#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "risim/config.hpp"
#include "risim/metrics.hpp"

namespace risim {

// Bad command-line or suite usage; the message is ready to print.
class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  std::string out_root;               // empty: $RISIM_OUT_ROOT or "out"
  std::optional<std::uint64_t> seed;  // overrides the config seed
  int threads = 0;                    // 0: library default
  std::string configs_dir = "configs";
};

std::string resolve_out_root(const RunOptions& opts);
void apply_thread_count(int threads);

struct RunResult {
  MetricReport report;
  std::string output_dir;
  ReflectivityMap ground_truth;
  ReflectivityMap output;
};

// Execute one experiment end to end and write its artifacts
// (ground_truth/output maps as CSV + PGM, report.json, results.csv,
// residuals.csv for the solver method, manifest.txt) under
// out_root/<output_dir>.
RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});
RunResult run_experiment_file(const std::string& config_path, const RunOptions& opts = {});

struct SuiteRow {
  std::string config_path;
  MetricReport report;
  bool ok = false;
  std::string error;  // set when ok is false
};

struct SuiteResult {
  std::string name;
  std::vector<SuiteRow> rows;
  std::string output_dir;
  bool all_ok() const;
};

// Run every config listed in a suite manifest, in order, collecting a
// results.csv and per-method montages. A row failure is recorded and the
// suite continues. `name_or_dir` is a suite name under configs_dir/suites or
// a directory containing manifest.txt. Unknown names throw UsageError listing
// the available suites.
SuiteResult run_suite(const std::string& name_or_dir, const RunOptions& opts = {});

std::vector<std::string> list_suites(const std::string& configs_dir);

}  // namespace risim
