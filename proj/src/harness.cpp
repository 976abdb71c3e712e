#include "risim/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "risim/io.hpp"
#include "risim/reconstruction.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;

namespace risim {

std::string resolve_out_root(const RunOptions& opts) {
  if (!opts.out_root.empty()) return opts.out_root;
  if (const char* env = std::getenv("RISIM_OUT_ROOT"); env && *env) return env;
  return "out";
}

void apply_thread_count(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

bool SuiteResult::all_ok() const {
  for (const auto& r : rows) {
    if (!r.ok) return false;
  }
  return !rows.empty();
}

namespace {

std::string bits_label(int bits) {
  return bits == kContinuousPhases ? "continuous" : std::to_string(bits);
}

ReflectivityMap max_normalized(const ReflectivityMap& m) {
  ReflectivityMap out = m;
  double peak = out.values.size() ? out.values.maxCoeff() : 0.0;
  if (peak > 0.0) out.values /= peak;
  return out;
}

nlohmann::json json_number(double x) {
  if (std::isfinite(x)) return x;
  return "inf";
}

void write_report_json(const std::string& path, const ExperimentConfig& cfg,
                       const MetricReport& rep, const AdmmResult* solver) {
  nlohmann::json j;
  j["name"] = cfg.name;
  j["scene"] = rep.scene;
  j["method"] = rep.method;
  j["ris_size"] = rep.ris_size;
  j["quantization_bits"] = rep.bits;
  j["seed"] = cfg.seed;
  j["noise_enabled"] = cfg.noise.enabled;
  if (cfg.noise.enabled) j["snr_db"] = cfg.noise.snr_db;
  j["metrics"]["rmse"] = json_number(rep.rmse);
  j["metrics"]["ssim"] = json_number(rep.ssim);
  j["metrics"]["resolution_x_m"] = json_number(rep.resolution_x);
  j["metrics"]["resolution_y_m"] = json_number(rep.resolution_y);
  if (solver) {
    j["solver"]["iterations_run"] = solver->iterations_run;
    if (!solver->primal_residual.empty()) {
      j["solver"]["final_primal_residual"] = json_number(solver->primal_residual.back());
      j["solver"]["final_data_objective"] = json_number(solver->data_objective.back());
    }
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << j.dump(2) << "\n";
}

void write_manifest(const std::string& path, const ExperimentConfig& cfg, int threads,
                    double wall_seconds) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "version = " << RISIM_VERSION << "\n";
  f << "eigen = " << EIGEN_WORLD_VERSION << "." << EIGEN_MAJOR_VERSION << "."
    << EIGEN_MINOR_VERSION << "\n";
#ifdef _OPENMP
  f << "threads = " << (threads > 0 ? threads : omp_get_max_threads()) << "\n";
#else
  f << "threads = 1\n";
  (void)threads;
#endif
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", wall_seconds);
  f << "wall_time_s = " << buf << "\n";
  f << "\n" << serialize_config(cfg);
}

std::string strip_trailing_slash(std::string s) {
  while (s.size() > 1 && (s.back() == '/' || s.back() == '\\')) s.pop_back();
  return s;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  auto t0 = std::chrono::steady_clock::now();
  apply_thread_count(opts.threads);

  ExperimentConfig run_cfg = cfg;
  if (opts.seed) run_cfg.seed = *opts.seed;
  run_cfg.noise.seed = run_cfg.seed;
  run_cfg.scene.validate();

  ReflectivityMap truth = run_cfg.ground_truth();

  fs::path dir = fs::path(resolve_out_root(opts)) / run_cfg.output_dir;
  fs::create_directories(dir);

  ReflectivityMap out;
  AdmmResult solve;
  bool solved = false;
  switch (run_cfg.method) {
    case Method::kMimo:
      out = mimo_baseline_image(run_cfg.mimo, run_cfg.scene, truth, run_cfg.attenuation)
                .intensity();
      break;
    case Method::kRisBf:
      out = beamform_image(run_cfg.scene, truth, run_cfg.attenuation, run_cfg.quantization_bits,
                           run_cfg.noise)
                .intensity();
      break;
    case Method::kRisOpt: {
      TransferMatrix H =
          build_transfer_matrix(run_cfg.scene, run_cfg.attenuation, run_cfg.quantization_bits);
      BeamformedImage p = beamform_image(run_cfg.scene, truth, run_cfg.attenuation,
                                         run_cfg.quantization_bits, run_cfg.noise);
      solve = admm_reconstruct(p, H, run_cfg.admm, run_cfg.patch);
      out = solve.image;
      solved = true;
      break;
    }
  }
  out = max_normalized(out);

  MetricReport rep;
  rep.scene = run_cfg.target.name();
  rep.method = method_name(run_cfg.method);
  rep.rmse = rmse(out, truth);
  rep.ssim = ssim(out, truth);
  if (run_cfg.method == Method::kMimo) {
    rep.ris_size = "-";
    rep.bits = "-";
    double aperture = (run_cfg.mimo.antennas_per_axis - 1) * run_cfg.mimo.antenna_spacing;
    double range = std::abs(run_cfg.scene.grid_plane_z - run_cfg.mimo.origin.z);
    double res = aperture > 0.0 ? run_cfg.scene.wavelength_center() * range / aperture
                                : std::numeric_limits<double>::infinity();
    rep.resolution_x = res;
    rep.resolution_y = res;
  } else {
    rep.ris_size =
        std::to_string(run_cfg.scene.ris_rows) + "x" + std::to_string(run_cfg.scene.ris_cols);
    rep.bits = bits_label(run_cfg.quantization_bits);
    Resolution res = cross_range_resolution(run_cfg.scene);
    rep.resolution_x = res.x;
    rep.resolution_y = res.y;
  }

  write_map_csv((dir / "ground_truth.csv").string(), truth);
  write_pgm((dir / "ground_truth.pgm").string(), truth);
  write_map_csv((dir / "output.csv").string(), out);
  write_pgm((dir / "output.pgm").string(), out);
  if (solved) {
    write_residuals_csv((dir / "residuals.csv").string(), solve.primal_residual,
                        solve.data_objective);
  }
  write_results_csv((dir / "results.csv").string(), {rep}, {run_cfg.name});
  write_report_json((dir / "report.json").string(), run_cfg, rep, solved ? &solve : nullptr);

  if (run_cfg.write_csi && run_cfg.method != Method::kMimo) {
    // one representative trace: the surface focused on the grid's center voxel
    int center = (run_cfg.scene.grid_nx / 2) * run_cfg.scene.grid_ny + run_cfg.scene.grid_ny / 2;
    PhaseConfig pc = focus_phases(run_cfg.scene, center, run_cfg.quantization_bits);
    CsiMeasurement m = synthesize_csi(run_cfg.scene, truth, pc, run_cfg.attenuation, run_cfg.noise,
                                      "focus" + std::to_string(center));
    write_csi_csv((dir / "csi.csv").string(), m, run_cfg.scene);
  }

  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest((dir / "manifest.txt").string(), run_cfg, opts.threads, wall);

  RunResult result;
  result.report = rep;
  result.output_dir = dir.string();
  result.ground_truth = std::move(truth);
  result.output = std::move(out);
  return result;
}

RunResult run_experiment_file(const std::string& config_path, const RunOptions& opts) {
  std::vector<std::string> warnings;
  ExperimentConfig cfg = load_experiment_config(config_path, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  return run_experiment(cfg, opts);
}

std::vector<std::string> list_suites(const std::string& configs_dir) {
  std::vector<std::string> names;
  fs::path root = fs::path(configs_dir) / "suites";
  if (!fs::is_directory(root)) return names;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && fs::exists(entry.path() / "manifest.txt")) {
      names.push_back(entry.path().filename().string());
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

SuiteResult run_suite(const std::string& name_or_dir, const RunOptions& opts) {
  std::string cleaned = strip_trailing_slash(name_or_dir);
  fs::path suite_dir;
  if (fs::is_directory(cleaned) && fs::exists(fs::path(cleaned) / "manifest.txt")) {
    suite_dir = cleaned;
  } else {
    suite_dir = fs::path(opts.configs_dir) / "suites" / cleaned;
    if (cleaned.empty() || !fs::exists(suite_dir / "manifest.txt")) {
      auto names = list_suites(opts.configs_dir);
      std::string msg = cleaned.empty() ? "missing suite name"
                                        : "unknown suite '" + cleaned + "'";
      if (names.empty()) {
        msg += "; no suites found under " + (fs::path(opts.configs_dir) / "suites").string();
      } else {
        msg += "; available suites:";
        for (const auto& n : names) msg += " " + n;
      }
      throw UsageError(msg);
    }
  }

  auto t0 = std::chrono::steady_clock::now();
  SuiteResult result;
  result.name = fs::path(strip_trailing_slash(suite_dir.string())).filename().string();

  std::vector<std::string> entries;
  {
    std::ifstream mf(suite_dir / "manifest.txt");
    if (!mf) throw UsageError("cannot read " + (suite_dir / "manifest.txt").string());
    std::string line;
    while (std::getline(mf, line)) {
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
      size_t b = line.find_first_not_of(" \t");
      if (b == std::string::npos) continue;
      line = line.substr(b);
      if (line[0] == '#') continue;
      entries.push_back(line);
    }
  }
  if (entries.empty()) throw UsageError("suite manifest lists no configs: " + suite_dir.string());

  fs::path out_dir = fs::path(resolve_out_root(opts)) / result.name;
  fs::create_directories(out_dir);
  result.output_dir = out_dir.string();

  RunOptions row_opts = opts;
  row_opts.out_root = out_dir.string();

  std::vector<MetricReport> ok_reports;
  std::vector<std::string> ok_paths;
  // montage tiles per scene, in first-seen order: ground truth then each output
  std::vector<std::pair<std::string, std::vector<ReflectivityMap>>> tiles;

  for (const auto& entry : entries) {
    fs::path cfg_path = fs::path(entry).is_absolute() ? fs::path(entry) : suite_dir / entry;
    cfg_path = cfg_path.lexically_normal();
    SuiteRow row;
    row.config_path = entry;
    try {
      RunResult r = run_experiment_file(cfg_path.string(), row_opts);
      row.report = r.report;
      row.ok = true;
      ok_reports.push_back(r.report);
      ok_paths.push_back(entry);
      auto it = std::find_if(tiles.begin(), tiles.end(),
                             [&](const auto& t) { return t.first == r.report.scene; });
      if (it == tiles.end()) {
        tiles.push_back({r.report.scene, {r.ground_truth}});
        it = tiles.end() - 1;
      }
      it->second.push_back(r.output);
    } catch (const std::exception& e) {
      row.error = e.what();
      std::cerr << "suite row failed [" << entry << "]: " << e.what() << "\n";
    }
    result.rows.push_back(std::move(row));
  }

  write_results_csv((out_dir / "results.csv").string(), ok_reports, ok_paths);
  if (!result.all_ok()) {
    std::ofstream f(out_dir / "failures.txt", std::ios::binary);
    for (const auto& row : result.rows) {
      if (!row.ok) f << row.config_path << ": " << row.error << "\n";
    }
  }
  for (const auto& [scene, maps] : tiles) {
    try {
      write_montage_pgm((out_dir / ("montage_" + scene + ".pgm")).string(), maps);
    } catch (const std::exception& e) {
      std::cerr << "montage skipped for scene " << scene << ": " << e.what() << "\n";
    }
  }
  {
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ofstream f(out_dir / "manifest.txt", std::ios::binary);
    f << "version = " << RISIM_VERSION << "\n";
    f << "suite = " << result.name << "\n";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", wall);
    f << "wall_time_s = " << buf << "\n";
    for (const auto& entry : entries) f << entry << "\n";
  }
  return result;
}

}  // namespace risim
