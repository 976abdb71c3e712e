#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "risim/scene.hpp"

namespace risim {

// Quantization depth encoding: kContinuousPhases keeps phases as-is,
// b >= 1 snaps them to the C = 2^b level grid {0, 2*pi/C, ...}.
inline constexpr int kContinuousPhases = 0;

// Per-element phase shifts applied by the surface; frequency-flat.
struct PhaseConfig {
  Eigen::VectorXd phases;                    // radians, [0, 2*pi)
  int quantization_bits = kContinuousPhases; // depth the phases were snapped to

  static PhaseConfig zeros(int element_count);
};

struct CsiMeasurement {
  Eigen::VectorXcd h;             // one complex sample per subcarrier
  std::string config_id;          // free-form tag for exports
};

// Per-path amplitude model.
struct AttenuationModel {
  enum class Mode { kUnit, kFreeSpaceProduct };
  Mode mode = Mode::kUnit;

  // Direct AP1 -> voxel -> AP2 path amplitude.
  double direct(double d_tx_voxel, double d_voxel_rx) const {
    return mode == Mode::kUnit ? 1.0 : 1.0 / (d_tx_voxel * d_voxel_rx);
  }
  // Surface-bounce path amplitude.
  double bounced(double d_tx_element, double d_element_voxel, double d_voxel_rx) const {
    return mode == Mode::kUnit ? 1.0 : 1.0 / (d_tx_element * d_element_voxel * d_voxel_rx);
  }
};

// Additive complex Gaussian measurement noise at a target SNR, disabled by
// default. The seed fully determines the draws.
struct NoiseModel {
  bool enabled = false;
  double snr_db = 30.0;
  std::uint64_t seed = 0;
};

// Nearest element of {0, 2*pi/C, ..., (C-1)*2*pi/C} under circular distance,
// C = 2^bits. bits == kContinuousPhases only reduces theta modulo 2*pi.
double quantize_phase(double theta, int bits);

// Phase accumulated over AP1 -> voxel -> AP2 at subcarrier s, not reduced
// modulo 2*pi.
double direct_path_phase(const SceneConfig& cfg, int voxel, int subcarrier);
// Same for AP1 -> element -> voxel -> AP2.
double ris_path_phase(const SceneConfig& cfg, int element, int voxel, int subcarrier);

// Variants evaluated at an arbitrary carrier frequency instead of a
// subcarrier index (used for configuring the surface at the band center).
double direct_path_phase_at(const SceneConfig& cfg, int voxel, double frequency_hz);
double ris_path_phase_at(const SceneConfig& cfg, int element, int voxel, double frequency_hz);

// Caches scene geometry so repeated syntheses against the same scene only
// pay for the phase sums. Results are identical to synthesize_csi.
class CsiSynthesizer {
 public:
  CsiSynthesizer(const SceneConfig& cfg, const AttenuationModel& att);

  // h_s = sum_k v(k) * (alpha_k e^{j beta_k^s} + sum_l alpha_lk e^{j(phi_lk^s + theta_l)})
  Eigen::VectorXcd synthesize(const ReflectivityMap& v, const PhaseConfig& phases) const;
  Eigen::VectorXcd synthesize(const ReflectivityMap& v, const PhaseConfig& phases,
                              const NoiseModel& noise, std::uint64_t noise_stream) const;

  const SceneConfig& config() const { return cfg_; }

 private:
  SceneConfig cfg_;
  AttenuationModel att_;
  int element_count_;
  int voxel_count_;
  std::vector<double> d_tx_element_;    // L
  std::vector<double> d_tx_voxel_;      // K
  std::vector<double> d_voxel_rx_;      // K
  std::vector<double> d_element_voxel_; // L x K, index l * K + k
};

// One-shot synthesis of the CSI vector for a scene, reflectivity map, and
// surface configuration. Throws std::invalid_argument on size mismatches.
CsiMeasurement synthesize_csi(const SceneConfig& cfg, const ReflectivityMap& v,
                              const PhaseConfig& phases, const AttenuationModel& att,
                              const NoiseModel& noise = {}, const std::string& config_id = "");

}  // namespace risim
