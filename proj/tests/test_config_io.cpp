#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "risim/config.hpp"
#include "risim/io.hpp"

using namespace risim;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("risim_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string config_path(const char* message) {
  // pull the bracketed path out of a ConfigError's what()
  std::string s(message);
  auto b = s.find('[');
  auto e = s.find(']');
  REQUIRE(b != std::string::npos);
  REQUIRE(e > b);
  return s.substr(b + 1, e - b - 1);
}

}  // namespace

TEST_SUITE_BEGIN("config_io");

TEST_CASE("minimal config resolves to the benchmark defaults") {
  ExperimentConfig cfg = parse_experiment_config("[scene]\n", "t");
  CHECK(cfg.name == "t");
  CHECK(cfg.scene.ris_rows == 17);
  CHECK(cfg.scene.ris_cols == 17);
  CHECK(cfg.scene.center_frequency_hz == 5.31e9);
  CHECK(cfg.scene.subcarrier_count == 30);
  CHECK(cfg.scene.grid_nx == 26);
  CHECK(cfg.scene.grid_ny == 26);
  CHECK(cfg.scene.grid_step == 0.02);
  CHECK(cfg.scene.grid_plane_z == 1.0);
  CHECK(cfg.scene.tx_position.y == -1.0);
  CHECK(cfg.scene.rx_position.y == 1.0);
  CHECK(cfg.method == Method::kRisOpt);
  CHECK(cfg.quantization_bits == kContinuousPhases);
  CHECK(cfg.attenuation.mode == AttenuationModel::Mode::kUnit);
  CHECK(cfg.target.kind == TargetSpec::Kind::kLetter);
  CHECK(cfg.target.letter == 'E');
  CHECK(cfg.output_dir == "t");
  CHECK_FALSE(cfg.noise.enabled);
  CHECK_FALSE(cfg.write_csi);

  ReflectivityMap truth = cfg.ground_truth();
  CHECK(truth.nx == 26);
  CHECK(truth.ny == 26);
}

TEST_CASE("full config parses and round-trips through its serialization") {
  const char* text = R"(
# comment
[scene]
tx_position = 0.1 -1.2 0.4
rx_position = -0.1 1.2 0.6
ris_rows = 9
ris_cols = 11
ris_element_spacing = 0.03
center_frequency_hz = 5.2e9
bandwidth_hz = 20e6
subcarrier_count = 10
grid_origin = -0.1 -0.1
grid_nx = 11
grid_ny = 11
grid_step = 0.02
grid_plane_z = 0.8

[target]
kind = points
points = 0.0 0.0; -0.06 0.06

[method]
name = ris-bf
quantization_bits = 2
attenuation = free-space-product

[noise]
enabled = true
snr_db = 25

[admm]
rho = 0.5
lambda = 2.0
outer_iters = 7
inner_iters = 2
delta = 0.2
early_stop = true
early_stop_rel = 1e-4

[patch]
patch_size = 4
patch_stride = 3
group_size = 8
search_window = 10
noise_sigma = 0.05
weight_constant = 1.5

[mimo]
origin = 0 0 0.1
antenna_spacing = 0.05
antennas_per_axis = 4

[output]
directory = custom_dir
seed = 42
write_csi = true
)";
  ExperimentConfig cfg = parse_experiment_config(text, "full");
  CHECK(cfg.scene.ris_rows == 9);
  CHECK(cfg.scene.ris_cols == 11);
  CHECK(cfg.scene.ris_element_spacing == 0.03);
  CHECK(cfg.scene.grid_nx == 11);
  CHECK(cfg.scene.grid_plane_z == 0.8);
  CHECK(cfg.scene.grid_origin.z == 0.8);  // plane z propagates to the origin
  CHECK(cfg.target.kind == TargetSpec::Kind::kPoints);
  REQUIRE(cfg.target.points.size() == 2);
  CHECK(cfg.target.points[1][0] == -0.06);
  CHECK(cfg.method == Method::kRisBf);
  CHECK(cfg.quantization_bits == 2);
  CHECK(cfg.attenuation.mode == AttenuationModel::Mode::kFreeSpaceProduct);
  CHECK(cfg.noise.enabled);
  CHECK(cfg.noise.snr_db == 25.0);
  CHECK(cfg.admm.rho == 0.5);
  CHECK(cfg.admm.lambda == 2.0);
  CHECK(cfg.admm.outer_iters == 7);
  CHECK(cfg.admm.early_stop);
  CHECK(cfg.patch.patch_size == 4);
  CHECK(cfg.patch.weight_constant == 1.5);
  CHECK(cfg.mimo.antennas_per_axis == 4);
  CHECK(cfg.output_dir == "custom_dir");
  CHECK(cfg.seed == 42);
  CHECK(cfg.write_csi);

  std::string echo = serialize_config(cfg);
  ExperimentConfig back = parse_experiment_config(echo, "full");
  CHECK(serialize_config(back) == echo);
  CHECK(back.scene.ris_element_spacing == cfg.scene.ris_element_spacing);
  CHECK(back.quantization_bits == cfg.quantization_bits);
  CHECK(back.target.points == cfg.target.points);
  CHECK(back.seed == cfg.seed);
}

TEST_CASE("schema errors name the offending field") {
  auto path_of = [](const std::string& text) {
    try {
      parse_experiment_config(text, "x");
    } catch (const ConfigError& e) {
      return e.path();
    }
    return std::string("<no error>");
  };

  CHECK(path_of("") == "scene");  // scene section is required
  CHECK(path_of("[scene]\nbogus = 1\n") == "scene.bogus");
  CHECK(path_of("[scene]\ngrid_step = fast\n") == "scene.grid_step");
  CHECK(path_of("[scene]\nris_rows = 0\n") == "scene");
  CHECK(path_of("[scene]\n[bogus_section]\nx = 1\n") == "bogus_section.x");
  CHECK(path_of("[scene]\n[method]\nname = sonar\n") == "method.name");
  CHECK(path_of("[scene]\n[method]\nquantization_bits = 0\n") == "method.quantization_bits");
  CHECK(path_of("[scene]\n[method]\nquantization_bits = sixteen\n") ==
        "method.quantization_bits");
  CHECK(path_of("[scene]\n[method]\nattenuation = none\n") == "method.attenuation");
  CHECK(path_of("[scene]\n[admm]\nrho = -1\n") == "admm.rho");
  CHECK(path_of("[scene]\n[admm]\ndelta = 2\n") == "admm.delta");
  CHECK(path_of("[scene]\n[target]\nkind = points\n") == "target.points");
  CHECK(path_of("[scene]\n[target]\nkind = points\npoints = a b\n") == "target.points");
  CHECK(path_of("[scene]\n[target]\nkind = blob\n") == "target.kind");
  CHECK(path_of("key = 1\n[scene]\n") == "key");

  CHECK_THROWS_AS(parse_experiment_config("[scene\n", "x"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config("[scene]\nris_rows\n", "x"), ConfigError);

  // the what() string carries the same path for log readers
  try {
    parse_experiment_config("[scene]\nbogus = 1\n", "x");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(config_path(e.what()) == "scene.bogus");
  }
}

TEST_CASE("mimo runs warn about ignored surface settings") {
  const char* text =
      "[scene]\nris_rows = 9\nris_cols = 9\n\n[method]\nname = mimo\n";
  std::vector<std::string> warnings;
  ExperimentConfig cfg = parse_experiment_config(text, "m", &warnings);
  CHECK(cfg.method == Method::kMimo);
  CHECK(cfg.scene.ris_rows == 9);  // parsed, just unused by the method
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("scene.ris_rows") != std::string::npos);
  CHECK(warnings[0].find("scene.ris_cols") != std::string::npos);

  // no surface keys, no warning
  warnings.clear();
  parse_experiment_config("[scene]\n\n[method]\nname = mimo\n", "m", &warnings);
  CHECK(warnings.empty());

  // warning sink is optional
  CHECK_NOTHROW(parse_experiment_config(text, "m"));
}

TEST_CASE("quantization bits parse continuous and small integers") {
  auto bits_of = [](const std::string& v) {
    return parse_experiment_config("[scene]\n[method]\nquantization_bits = " + v + "\n", "x")
        .quantization_bits;
  };
  CHECK(bits_of("continuous") == kContinuousPhases);
  CHECK(bits_of("1") == 1);
  CHECK(bits_of("2") == 2);
  CHECK(bits_of("8") == 8);
}

TEST_CASE("letter target must fit the configured grid") {
  // default extent sizes itself from the grid: always consistent
  ExperimentConfig small = parse_experiment_config("[scene]\ngrid_nx = 11\ngrid_ny = 11\n", "s");
  ReflectivityMap t = small.ground_truth();
  CHECK(t.nx == 11);

  try {
    parse_experiment_config("[scene]\ngrid_nx = 11\ngrid_ny = 11\n[target]\nextent = 0.5\n", "s");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(e.path() == "target.extent");
  }

  // a point outside the grid is caught at parse time too
  CHECK_THROWS_AS(
      parse_experiment_config("[scene]\n[target]\nkind = points\npoints = 9 9\n", "s"),
      ConfigError);
}

TEST_CASE("load_experiment_config reads files and names them by stem") {
  TempDir tmp;
  {
    std::ofstream f(tmp.file("trial_a.cfg"));
    f << "[scene]\ngrid_nx = 11\ngrid_ny = 11\n";
  }
  ExperimentConfig cfg = load_experiment_config(tmp.file("trial_a.cfg"));
  CHECK(cfg.name == "trial_a");
  CHECK(cfg.output_dir == "trial_a");
  CHECK(cfg.scene.grid_nx == 11);

  CHECK_THROWS_AS(load_experiment_config(tmp.file("missing.cfg")), ConfigError);
}

TEST_CASE("pgm bytes are frozen") {
  TempDir tmp;
  ReflectivityMap m(2, 2);
  m.at(0, 0) = 0.0;
  m.at(0, 1) = 0.5;
  m.at(1, 0) = 0.25;
  m.at(1, 1) = 1.0;
  write_pgm(tmp.file("m.pgm"), m);
  std::string data = slurp(tmp.file("m.pgm"));
  // top row first (iy = 1), then iy = 0; 0.5 rounds up to 128
  std::string expect = "P5\n2 2\n255\n";
  expect += (char)128;
  expect += (char)255;
  expect += (char)0;
  expect += (char)64;
  CHECK(data == expect);

  // the peak normalizes to 255 regardless of scale
  ReflectivityMap scaled = m;
  scaled.values *= 0.37;
  write_pgm(tmp.file("s.pgm"), scaled);
  CHECK(slurp(tmp.file("s.pgm")) == expect);
}

TEST_CASE("map csv round-trips exactly and renders top row first") {
  TempDir tmp;
  ReflectivityMap m(2, 2);
  m.at(0, 0) = 0.0;
  m.at(0, 1) = 0.5;
  m.at(1, 0) = 0.25;
  m.at(1, 1) = 1.0;
  write_map_csv(tmp.file("m.csv"), m);
  CHECK(slurp(tmp.file("m.csv")) == "0.5,1\n0,0.25\n");

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ReflectivityMap r(7, 5);
  for (int i = 0; i < r.size(); ++i) r.values[i] = u(rng);
  write_map_csv(tmp.file("r.csv"), r);
  ReflectivityMap back = read_map_csv(tmp.file("r.csv"));
  REQUIRE(back.nx == 7);
  REQUIRE(back.ny == 5);
  CHECK(back.values == r.values);  // %.17g preserves doubles bit for bit
}

TEST_CASE("transfer matrix round-trips in both formats") {
  TempDir tmp;
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g(0.0, 1.0);
  TransferMatrix H;
  H.h.resize(3, 4);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) H.h(r, c) = cdouble(g(rng), g(rng));
  }

  write_transfer_matrix(tmp.file("h.csv"), H);
  std::string text = slurp(tmp.file("h.csv"));
  CHECK(text.substr(0, 4) == "3,4\n");
  TransferMatrix back = read_transfer_matrix(tmp.file("h.csv"));
  CHECK(back.h == H.h);

  write_transfer_matrix(tmp.file("h.bin"), H);
  CHECK(slurp(tmp.file("h.bin")).substr(0, 4) == "RISH");
  TransferMatrix bin = read_transfer_matrix(tmp.file("h.bin"));
  CHECK(bin.h == H.h);

  CHECK_THROWS(read_transfer_matrix(tmp.file("m.csv")));  // missing file
}

TEST_CASE("csi csv lists one labeled row per subcarrier") {
  TempDir tmp;
  SceneConfig cfg;
  cfg.subcarrier_count = 2;
  CsiMeasurement m;
  m.config_id = "focus7";
  m.h.resize(2);
  m.h[0] = cdouble(1.0, 2.0);
  m.h[1] = cdouble(3.0, -4.0);
  write_csi_csv(tmp.file("csi.csv"), m, cfg);
  std::istringstream in(slurp(tmp.file("csi.csv")));
  std::string line;
  std::getline(in, line);
  CHECK(line == "config_id,subcarrier_index,frequency_hz,real,imag");
  char freq0[40];
  std::snprintf(freq0, sizeof(freq0), "%.17g", cfg.subcarrier_frequency(0));
  std::getline(in, line);
  CHECK(line == "focus7,0," + std::string(freq0) + ",1,2");
  std::getline(in, line);
  CHECK(line.substr(0, 9) == "focus7,1,");
  CHECK(line.substr(line.size() - 5) == ",3,-4");
}

TEST_CASE("residuals csv starts at iteration one") {
  TempDir tmp;
  write_residuals_csv(tmp.file("r.csv"), {0.5, 0.25}, {10.0, 2.5});
  CHECK(slurp(tmp.file("r.csv")) ==
        "iteration,primal_residual,objective\n1,0.5,10\n2,0.25,2.5\n");
  CHECK_THROWS_AS(write_residuals_csv(tmp.file("bad.csv"), {1.0}, {}), std::invalid_argument);
}

TEST_CASE("results csv carries the full report row") {
  TempDir tmp;
  MetricReport rep;
  rep.scene = "E";
  rep.method = "ris-opt";
  rep.ris_size = "17x17";
  rep.bits = "continuous";
  rep.rmse = 0.03;
  rep.ssim = 0.52;
  write_results_csv(tmp.file("results.csv"), {rep}, {"fig3_E_opt.cfg"});
  CHECK(slurp(tmp.file("results.csv")) ==
        "scene,method,ris_size,bits,rmse,ssim,config\n"
        "E,ris-opt,17x17,continuous,0.029999999999999999,0.52000000000000002,fig3_E_opt.cfg\n");
  CHECK_THROWS_AS(write_results_csv(tmp.file("bad.csv"), {rep}, {}), std::invalid_argument);
}

TEST_CASE("montage lays tiles side by side with white separators") {
  TempDir tmp;
  ReflectivityMap a(2, 2);
  a.at(0, 0) = 0.0;
  a.at(0, 1) = 0.5;
  a.at(1, 0) = 0.25;
  a.at(1, 1) = 1.0;
  ReflectivityMap b(2, 2);
  b.values.setOnes();
  write_montage_pgm(tmp.file("mm.pgm"), {a, b});
  std::string data = slurp(tmp.file("mm.pgm"));
  std::string expect = "P5\n5 2\n255\n";
  const unsigned char rows[] = {128, 255, 255, 255, 255, 0, 64, 255, 255, 255};
  for (unsigned char c : rows) expect += (char)c;
  CHECK(data == expect);

  ReflectivityMap odd(3, 2);
  CHECK_THROWS_AS(write_montage_pgm(tmp.file("bad.pgm"), {a, odd}), std::invalid_argument);
  CHECK_THROWS_AS(write_montage_pgm(tmp.file("bad.pgm"), {}), std::invalid_argument);
}

TEST_SUITE_END();
