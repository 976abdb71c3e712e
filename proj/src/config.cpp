#include "risim/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace risim {

std::string method_name(Method m) {
  switch (m) {
    case Method::kMimo: return "mimo";
    case Method::kRisBf: return "ris-bf";
    case Method::kRisOpt: return "ris-opt";
  }
  return "?";
}

std::string TargetSpec::name() const {
  if (kind == Kind::kLetter) return std::string(1, letter);
  return "points" + std::to_string(points.size());
}

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// Raw parse result: section -> key -> value, plus consumption tracking so
// unknown keys surface as errors and ignored keys can be warned about.
class RawConfig {
 public:
  void parse(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      std::string t = trim(line);
      if (t.empty() || t[0] == '#' || t[0] == ';') continue;
      if (t.front() == '[') {
        if (t.back() != ']') {
          throw ConfigError("line " + std::to_string(line_no), "unterminated section header");
        }
        section = trim(t.substr(1, t.size() - 2));
        if (section.empty()) {
          throw ConfigError("line " + std::to_string(line_no), "empty section name");
        }
        sections_[section];
        continue;
      }
      size_t eq = t.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(section.empty() ? "line " + std::to_string(line_no)
                                          : section + " line " + std::to_string(line_no),
                          "expected key = value");
      }
      std::string key = trim(t.substr(0, eq));
      std::string value = trim(t.substr(eq + 1));
      if (key.empty()) {
        throw ConfigError(section + " line " + std::to_string(line_no), "empty key");
      }
      if (section.empty()) {
        throw ConfigError(key, "key appears before any [section]");
      }
      sections_[section][key] = value;
    }
  }

  bool has_section(const std::string& s) const { return sections_.count(s) > 0; }
  bool has(const std::string& s, const std::string& k) const {
    auto it = sections_.find(s);
    return it != sections_.end() && it->second.count(k) > 0;
  }

  std::string get(const std::string& s, const std::string& k) {
    consumed_.insert(s + "." + k);
    return sections_.at(s).at(k);
  }

  std::string get_or(const std::string& s, const std::string& k, const std::string& dflt) {
    if (!has(s, k)) return dflt;
    return get(s, k);
  }

  double get_double(const std::string& s, const std::string& k, double dflt) {
    if (!has(s, k)) return dflt;
    std::string v = get(s, k);
    try {
      size_t pos = 0;
      double x = std::stod(v, &pos);
      if (trim(v.substr(pos)).size()) throw std::invalid_argument("trailing characters");
      return x;
    } catch (const std::exception&) {
      throw ConfigError(s + "." + k, "not a number: '" + v + "'");
    }
  }

  int get_int(const std::string& s, const std::string& k, int dflt) {
    if (!has(s, k)) return dflt;
    std::string v = get(s, k);
    try {
      size_t pos = 0;
      long x = std::stol(v, &pos);
      if (trim(v.substr(pos)).size()) throw std::invalid_argument("trailing characters");
      return (int)x;
    } catch (const std::exception&) {
      throw ConfigError(s + "." + k, "not an integer: '" + v + "'");
    }
  }

  bool get_bool(const std::string& s, const std::string& k, bool dflt) {
    if (!has(s, k)) return dflt;
    std::string v = get(s, k);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(s + "." + k, "not a boolean: '" + v + "'");
  }

  Vec3 get_vec3(const std::string& s, const std::string& k, Vec3 dflt) {
    if (!has(s, k)) return dflt;
    std::string v = get(s, k);
    std::istringstream ss(v);
    Vec3 out;
    if (!(ss >> out.x >> out.y >> out.z)) {
      throw ConfigError(s + "." + k, "expected three numbers: '" + v + "'");
    }
    std::string rest;
    if (ss >> rest) throw ConfigError(s + "." + k, "expected exactly three numbers: '" + v + "'");
    return out;
  }

  // Every parsed key must have been consumed by the schema above.
  void check_all_consumed() const {
    for (const auto& [sec, kv] : sections_) {
      for (const auto& [key, value] : kv) {
        if (!consumed_.count(sec + "." + key)) {
          throw ConfigError(sec + "." + key, "unknown key");
        }
      }
    }
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
  std::set<std::string> consumed_;
};

int parse_bits(const std::string& text, const std::string& path) {
  if (text == "continuous" || text == "inf") return kContinuousPhases;
  try {
    size_t pos = 0;
    int b = std::stoi(text, &pos);
    if (pos != text.size() || b < 1 || b > 62) throw std::invalid_argument("range");
    return b;
  } catch (const std::exception&) {
    throw ConfigError(path, "expected 'continuous' or an integer in [1, 62]: '" + text + "'");
  }
}

std::string bits_name(int bits) {
  return bits == kContinuousPhases ? "continuous" : std::to_string(bits);
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text, const std::string& name,
                                         std::vector<std::string>* warnings) {
  RawConfig raw;
  raw.parse(text);
  if (!raw.has_section("scene")) throw ConfigError("scene", "section missing");

  ExperimentConfig cfg;
  cfg.name = name;

  SceneConfig& sc = cfg.scene;
  sc.tx_position = raw.get_vec3("scene", "tx_position", sc.tx_position);
  sc.rx_position = raw.get_vec3("scene", "rx_position", sc.rx_position);
  sc.ris_rows = raw.get_int("scene", "ris_rows", sc.ris_rows);
  sc.ris_cols = raw.get_int("scene", "ris_cols", sc.ris_cols);
  sc.ris_center = raw.get_vec3("scene", "ris_center", sc.ris_center);
  if (raw.has("scene", "ris_element_spacing")) {
    std::string v = raw.get("scene", "ris_element_spacing");
    if (v == "half-wavelength" || v == "auto") {
      sc.ris_element_spacing = 0.0;
    } else {
      try {
        sc.ris_element_spacing = std::stod(v);
      } catch (const std::exception&) {
        throw ConfigError("scene.ris_element_spacing",
                          "expected meters or 'half-wavelength': '" + v + "'");
      }
    }
  }
  sc.center_frequency_hz = raw.get_double("scene", "center_frequency_hz", sc.center_frequency_hz);
  sc.bandwidth_hz = raw.get_double("scene", "bandwidth_hz", sc.bandwidth_hz);
  sc.subcarrier_count = raw.get_int("scene", "subcarrier_count", sc.subcarrier_count);
  sc.grid_nx = raw.get_int("scene", "grid_nx", sc.grid_nx);
  sc.grid_ny = raw.get_int("scene", "grid_ny", sc.grid_ny);
  sc.grid_step = raw.get_double("scene", "grid_step", sc.grid_step);
  sc.grid_plane_z = raw.get_double("scene", "grid_plane_z", sc.grid_plane_z);
  if (raw.has("scene", "grid_origin")) {
    // x and y of the first voxel; an optional z is superseded by grid_plane_z
    std::string v = raw.get("scene", "grid_origin");
    std::istringstream ss(v);
    double x, y;
    if (!(ss >> x >> y)) {
      throw ConfigError("scene.grid_origin", "expected 'x y': '" + v + "'");
    }
    double z;
    ss >> z;
    std::string rest;
    if (ss >> rest) throw ConfigError("scene.grid_origin", "too many values: '" + v + "'");
    sc.grid_origin = {x, y, 0.0};
  }
  sc.grid_origin.z = sc.grid_plane_z;
  try {
    sc.validate();
  } catch (const std::exception& e) {
    throw ConfigError("scene", e.what());
  }

  if (raw.has_section("target")) {
    std::string kind = raw.get_or("target", "kind", "letter");
    if (kind == "letter") {
      cfg.target.kind = TargetSpec::Kind::kLetter;
      std::string letter = raw.get_or("target", "letter", "E");
      if (letter.size() != 1) throw ConfigError("target.letter", "expected one character");
      cfg.target.letter = letter[0];
      cfg.target.extent = raw.get_double("target", "extent", -1.0);
    } else if (kind == "points") {
      cfg.target.kind = TargetSpec::Kind::kPoints;
      if (!raw.has("target", "points")) throw ConfigError("target.points", "missing point list");
      std::string pts = raw.get("target", "points");
      std::stringstream ss(pts);
      std::string item;
      while (std::getline(ss, item, ';')) {
        item = trim(item);
        if (item.empty()) continue;
        std::istringstream ps(item);
        double x, y;
        if (!(ps >> x >> y)) {
          throw ConfigError("target.points", "expected 'x y' pairs separated by ';': '" + item + "'");
        }
        cfg.target.points.push_back({x, y});
      }
      if (cfg.target.points.empty()) throw ConfigError("target.points", "empty point list");
    } else {
      throw ConfigError("target.kind", "expected 'letter' or 'points': '" + kind + "'");
    }
  }

  if (raw.has_section("method")) {
    std::string m = raw.get_or("method", "name", "ris-opt");
    if (m == "mimo") {
      cfg.method = Method::kMimo;
    } else if (m == "ris-bf") {
      cfg.method = Method::kRisBf;
    } else if (m == "ris-opt") {
      cfg.method = Method::kRisOpt;
    } else {
      throw ConfigError("method.name", "expected mimo | ris-bf | ris-opt: '" + m + "'");
    }
    if (raw.has("method", "quantization_bits")) {
      cfg.quantization_bits =
          parse_bits(raw.get("method", "quantization_bits"), "method.quantization_bits");
    }
    std::string att = raw.get_or("method", "attenuation", "unit");
    if (att == "unit") {
      cfg.attenuation.mode = AttenuationModel::Mode::kUnit;
    } else if (att == "free-space-product") {
      cfg.attenuation.mode = AttenuationModel::Mode::kFreeSpaceProduct;
    } else {
      throw ConfigError("method.attenuation", "expected unit | free-space-product: '" + att + "'");
    }
  }

  if (cfg.method == Method::kMimo) {
    std::vector<std::string> ignored;
    for (const char* key : {"ris_rows", "ris_cols", "ris_element_spacing", "ris_center"}) {
      if (raw.has("scene", key)) ignored.push_back(std::string("scene.") + key);
    }
    if (!ignored.empty() && warnings) {
      std::string msg = "method 'mimo' ignores surface settings:";
      for (const auto& k : ignored) msg += " " + k;
      warnings->push_back(msg);
    }
  }

  if (raw.has_section("noise")) {
    cfg.noise.enabled = raw.get_bool("noise", "enabled", false);
    cfg.noise.snr_db = raw.get_double("noise", "snr_db", cfg.noise.snr_db);
  }

  if (raw.has_section("admm")) {
    cfg.admm.rho = raw.get_double("admm", "rho", cfg.admm.rho);
    cfg.admm.mu = raw.get_double("admm", "mu", cfg.admm.mu);
    cfg.admm.lambda = raw.get_double("admm", "lambda", cfg.admm.lambda);
    cfg.admm.outer_iters = raw.get_int("admm", "outer_iters", cfg.admm.outer_iters);
    cfg.admm.inner_iters = raw.get_int("admm", "inner_iters", cfg.admm.inner_iters);
    cfg.admm.delta = raw.get_double("admm", "delta", cfg.admm.delta);
    cfg.admm.early_stop = raw.get_bool("admm", "early_stop", cfg.admm.early_stop);
    cfg.admm.early_stop_rel = raw.get_double("admm", "early_stop_rel", cfg.admm.early_stop_rel);
    if (cfg.admm.outer_iters < 0 || cfg.admm.inner_iters < 0) {
      throw ConfigError("admm", "iteration counts must be >= 0");
    }
    if (cfg.admm.delta <= 0.0 || cfg.admm.delta > 1.0) {
      throw ConfigError("admm.delta", "must lie in (0, 1]");
    }
    if (cfg.admm.rho <= 0.0) throw ConfigError("admm.rho", "must be > 0");
  }

  if (raw.has_section("patch")) {
    cfg.patch.patch_size = raw.get_int("patch", "patch_size", cfg.patch.patch_size);
    cfg.patch.patch_stride = raw.get_int("patch", "patch_stride", cfg.patch.patch_stride);
    cfg.patch.group_size = raw.get_int("patch", "group_size", cfg.patch.group_size);
    cfg.patch.search_window = raw.get_int("patch", "search_window", cfg.patch.search_window);
    cfg.patch.noise_sigma = raw.get_double("patch", "noise_sigma", cfg.patch.noise_sigma);
    cfg.patch.weight_constant =
        raw.get_double("patch", "weight_constant", cfg.patch.weight_constant);
    if (cfg.patch.patch_size < 1 || cfg.patch.patch_stride < 1 || cfg.patch.group_size < 1 ||
        cfg.patch.search_window < 0) {
      throw ConfigError("patch", "sizes must be positive");
    }
  }

  cfg.mimo.origin = cfg.scene.ris_center;
  if (raw.has_section("mimo")) {
    cfg.mimo.origin = raw.get_vec3("mimo", "origin", cfg.mimo.origin);
    cfg.mimo.antenna_spacing = raw.get_double("mimo", "antenna_spacing", cfg.mimo.antenna_spacing);
    cfg.mimo.antennas_per_axis =
        raw.get_int("mimo", "antennas_per_axis", cfg.mimo.antennas_per_axis);
    if (cfg.mimo.antennas_per_axis < 1 || cfg.mimo.antenna_spacing <= 0.0) {
      throw ConfigError("mimo", "need >= 1 antennas per axis and positive spacing");
    }
  }

  if (raw.has_section("output")) {
    cfg.output_dir = raw.get_or("output", "directory", "");
    long long seed = raw.get_int("output", "seed", 0);
    cfg.seed = (std::uint64_t)seed;
    cfg.write_csi = raw.get_bool("output", "write_csi", false);
  }
  if (cfg.output_dir.empty()) cfg.output_dir = cfg.name;

  raw.check_all_consumed();

  // surface the target/grid mismatch now rather than mid-run
  cfg.ground_truth();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path,
                                        std::vector<std::string>* warnings) {
  std::ifstream f(path);
  if (!f) throw ConfigError(path, "cannot open config file");
  std::stringstream buf;
  buf << f.rdbuf();
  std::string stem = path;
  size_t slash = stem.find_last_of("/\\");
  if (slash != std::string::npos) stem = stem.substr(slash + 1);
  size_t dot = stem.find_last_of('.');
  if (dot != std::string::npos && dot > 0) stem = stem.substr(0, dot);
  return parse_experiment_config(buf.str(), stem, warnings);
}

ReflectivityMap ExperimentConfig::ground_truth() const {
  if (target.kind == TargetSpec::Kind::kLetter) {
    double extent = target.extent;
    if (extent < 0.0) extent = (scene.grid_nx - 1) * scene.grid_step;
    ReflectivityMap m;
    try {
      m = make_letter_scene(target.letter, extent, scene.grid_step);
    } catch (const std::exception& e) {
      throw ConfigError("target", e.what());
    }
    if (m.nx != scene.grid_nx || m.ny != scene.grid_ny) {
      throw ConfigError("target.extent",
                        "letter raster " + std::to_string(m.nx) + "x" + std::to_string(m.ny) +
                            " does not match grid " + std::to_string(scene.grid_nx) + "x" +
                            std::to_string(scene.grid_ny));
    }
    return m;
  }
  try {
    return make_point_scene(target.points, scene);
  } catch (const std::exception& e) {
    throw ConfigError("target.points", e.what());
  }
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream o;
  const SceneConfig& sc = cfg.scene;
  o << "[scene]\n";
  o << "tx_position = " << fmt_double(sc.tx_position.x) << " " << fmt_double(sc.tx_position.y)
    << " " << fmt_double(sc.tx_position.z) << "\n";
  o << "rx_position = " << fmt_double(sc.rx_position.x) << " " << fmt_double(sc.rx_position.y)
    << " " << fmt_double(sc.rx_position.z) << "\n";
  o << "ris_rows = " << sc.ris_rows << "\n";
  o << "ris_cols = " << sc.ris_cols << "\n";
  o << "ris_element_spacing = " << fmt_double(sc.element_spacing()) << "\n";
  o << "ris_center = " << fmt_double(sc.ris_center.x) << " " << fmt_double(sc.ris_center.y) << " "
    << fmt_double(sc.ris_center.z) << "\n";
  o << "center_frequency_hz = " << fmt_double(sc.center_frequency_hz) << "\n";
  o << "bandwidth_hz = " << fmt_double(sc.bandwidth_hz) << "\n";
  o << "subcarrier_count = " << sc.subcarrier_count << "\n";
  o << "grid_origin = " << fmt_double(sc.grid_origin.x) << " " << fmt_double(sc.grid_origin.y)
    << " " << fmt_double(sc.grid_plane_z) << "\n";
  o << "grid_nx = " << sc.grid_nx << "\n";
  o << "grid_ny = " << sc.grid_ny << "\n";
  o << "grid_step = " << fmt_double(sc.grid_step) << "\n";
  o << "grid_plane_z = " << fmt_double(sc.grid_plane_z) << "\n";
  o << "\n[target]\n";
  if (cfg.target.kind == TargetSpec::Kind::kLetter) {
    o << "kind = letter\n";
    o << "letter = " << cfg.target.letter << "\n";
    double extent = cfg.target.extent;
    if (extent < 0.0) extent = (sc.grid_nx - 1) * sc.grid_step;
    o << "extent = " << fmt_double(extent) << "\n";
  } else {
    o << "kind = points\n";
    o << "points = ";
    for (size_t i = 0; i < cfg.target.points.size(); ++i) {
      if (i) o << "; ";
      o << fmt_double(cfg.target.points[i][0]) << " " << fmt_double(cfg.target.points[i][1]);
    }
    o << "\n";
  }
  o << "\n[method]\n";
  o << "name = " << method_name(cfg.method) << "\n";
  o << "quantization_bits = " << bits_name(cfg.quantization_bits) << "\n";
  o << "attenuation = "
    << (cfg.attenuation.mode == AttenuationModel::Mode::kUnit ? "unit" : "free-space-product")
    << "\n";
  o << "\n[noise]\n";
  o << "enabled = " << (cfg.noise.enabled ? "true" : "false") << "\n";
  o << "snr_db = " << fmt_double(cfg.noise.snr_db) << "\n";
  o << "\n[admm]\n";
  o << "rho = " << fmt_double(cfg.admm.rho) << "\n";
  o << "mu = " << fmt_double(cfg.admm.mu) << "\n";
  o << "lambda = " << fmt_double(cfg.admm.lambda) << "\n";
  o << "outer_iters = " << cfg.admm.outer_iters << "\n";
  o << "inner_iters = " << cfg.admm.inner_iters << "\n";
  o << "delta = " << fmt_double(cfg.admm.delta) << "\n";
  o << "early_stop = " << (cfg.admm.early_stop ? "true" : "false") << "\n";
  o << "early_stop_rel = " << fmt_double(cfg.admm.early_stop_rel) << "\n";
  o << "\n[patch]\n";
  o << "patch_size = " << cfg.patch.patch_size << "\n";
  o << "patch_stride = " << cfg.patch.patch_stride << "\n";
  o << "group_size = " << cfg.patch.group_size << "\n";
  o << "search_window = " << cfg.patch.search_window << "\n";
  o << "noise_sigma = " << fmt_double(cfg.patch.noise_sigma) << "\n";
  o << "weight_constant = " << fmt_double(cfg.patch.weight_constant) << "\n";
  o << "\n[mimo]\n";
  o << "origin = " << fmt_double(cfg.mimo.origin.x) << " " << fmt_double(cfg.mimo.origin.y) << " "
    << fmt_double(cfg.mimo.origin.z) << "\n";
  o << "antenna_spacing = " << fmt_double(cfg.mimo.antenna_spacing) << "\n";
  o << "antennas_per_axis = " << cfg.mimo.antennas_per_axis << "\n";
  o << "\n[output]\n";
  o << "directory = " << cfg.output_dir << "\n";
  o << "seed = " << cfg.seed << "\n";
  o << "write_csi = " << (cfg.write_csi ? "true" : "false") << "\n";
  return o.str();
}

}  // namespace risim
