#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "risim/beamformer.hpp"
#include "risim/forward_model.hpp"
#include "risim/reconstruction.hpp"
#include "risim/scene.hpp"

namespace risim {

// Schema or value problem in an experiment config; what() names the offending
// section/key path.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& path, const std::string& message)
      : std::runtime_error("config error at [" + path + "]: " + message), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class Method { kMimo, kRisBf, kRisOpt };

std::string method_name(Method m);

struct TargetSpec {
  enum class Kind { kLetter, kPoints };
  Kind kind = Kind::kLetter;
  char letter = 'E';
  double extent = -1.0;  // < 0: span of the configured grid
  std::vector<std::array<double, 2>> points;

  std::string name() const;  // "E", "T", "points4", ...
};

// Fully resolved description of one experiment run.
struct ExperimentConfig {
  std::string name;  // defaults to the config file stem
  SceneConfig scene;
  TargetSpec target;
  Method method = Method::kRisOpt;
  int quantization_bits = kContinuousPhases;
  AttenuationModel attenuation;
  NoiseModel noise;
  AdmmParams admm;
  PatchParams patch;
  MimoArrayConfig mimo;
  std::string output_dir;  // defaults to the experiment name
  std::uint64_t seed = 0;
  bool write_csi = false;

  // Ground-truth map for the configured target; validates grid compatibility.
  ReflectivityMap ground_truth() const;
};

// Parse the sectioned key/value format. `name` seeds ExperimentConfig::name;
// warnings (e.g. ignored fields) are appended when a sink is given.
ExperimentConfig parse_experiment_config(const std::string& text, const std::string& name,
                                         std::vector<std::string>* warnings = nullptr);
ExperimentConfig load_experiment_config(const std::string& path,
                                        std::vector<std::string>* warnings = nullptr);

// Canonical echo of every resolved field, in config file syntax.
std::string serialize_config(const ExperimentConfig& cfg);

}  // namespace risim
