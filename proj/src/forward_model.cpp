#include "risim/forward_model.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace risim {

PhaseConfig PhaseConfig::zeros(int element_count) {
  PhaseConfig pc;
  pc.phases = Eigen::VectorXd::Zero(element_count);
  return pc;
}

double quantize_phase(double theta, int bits) {
  if (bits < 0) throw std::invalid_argument("quantization bits must be >= 0");
  double t = wrap_two_pi(theta);
  if (bits == kContinuousPhases || bits > 62) return t;
  std::uint64_t levels = std::uint64_t{1} << bits;
  double step = kTwoPi / (double)levels;
  // llround ties away from zero; the level count wraps the top bin to zero.
  std::uint64_t idx = (std::uint64_t)std::llround(t / step) % levels;
  return (double)idx * step;
}

namespace {

void check_indices(const SceneConfig& cfg, int element, int voxel) {
  if (voxel < 0 || voxel >= cfg.voxel_count()) {
    throw std::out_of_range("voxel index outside grid");
  }
  if (element < 0 || element >= cfg.element_count()) {
    throw std::out_of_range("element index outside surface");
  }
}

}  // namespace

double direct_path_phase_at(const SceneConfig& cfg, int voxel, double frequency_hz) {
  check_indices(cfg, 0, voxel);
  Vec3 v = cfg.voxel_position(voxel);
  double d = distance(cfg.tx_position, v) + distance(v, cfg.rx_position);
  return kTwoPi * frequency_hz / kSpeedOfLight * d;
}

double ris_path_phase_at(const SceneConfig& cfg, int element, int voxel, double frequency_hz) {
  check_indices(cfg, element, voxel);
  Vec3 v = cfg.voxel_position(voxel);
  Vec3 e = ris_element_positions(cfg)[element];
  double d = distance(cfg.tx_position, e) + distance(e, v) + distance(v, cfg.rx_position);
  return kTwoPi * frequency_hz / kSpeedOfLight * d;
}

double direct_path_phase(const SceneConfig& cfg, int voxel, int subcarrier) {
  return direct_path_phase_at(cfg, voxel, cfg.subcarrier_frequency(subcarrier));
}

double ris_path_phase(const SceneConfig& cfg, int element, int voxel, int subcarrier) {
  return ris_path_phase_at(cfg, element, voxel, cfg.subcarrier_frequency(subcarrier));
}

CsiSynthesizer::CsiSynthesizer(const SceneConfig& cfg, const AttenuationModel& att)
    : cfg_(cfg), att_(att), element_count_(cfg.element_count()), voxel_count_(cfg.voxel_count()) {
  cfg_.validate();
  auto elements = ris_element_positions(cfg_);
  d_tx_element_.resize(element_count_);
  for (int l = 0; l < element_count_; ++l) {
    d_tx_element_[l] = distance(cfg_.tx_position, elements[l]);
  }
  d_tx_voxel_.resize(voxel_count_);
  d_voxel_rx_.resize(voxel_count_);
  d_element_voxel_.resize((size_t)element_count_ * voxel_count_);
  for (int k = 0; k < voxel_count_; ++k) {
    Vec3 v = cfg_.voxel_position(k);
    d_tx_voxel_[k] = distance(cfg_.tx_position, v);
    d_voxel_rx_[k] = distance(v, cfg_.rx_position);
    for (int l = 0; l < element_count_; ++l) {
      d_element_voxel_[(size_t)l * voxel_count_ + k] = distance(elements[l], v);
    }
  }
}

Eigen::VectorXcd CsiSynthesizer::synthesize(const ReflectivityMap& v,
                                            const PhaseConfig& phases) const {
  if (v.nx != cfg_.grid_nx || v.ny != cfg_.grid_ny) {
    throw std::invalid_argument("reflectivity map does not match the scene grid");
  }
  if ((int)phases.phases.size() != element_count_) {
    throw std::invalid_argument("phase vector does not match the element count");
  }
  const int S = cfg_.subcarrier_count;
  // f_s = f_0 + s * df: each path's per-subcarrier phasor advances by a
  // constant rotation, so one sincos pair per path covers the whole band.
  const double f0 = cfg_.subcarrier_frequency(0);
  const double df = cfg_.bandwidth_hz / S;
  const double w0 = kTwoPi * f0 / kSpeedOfLight;
  const double dw = kTwoPi * df / kSpeedOfLight;

  std::vector<cdouble> unit_theta(element_count_);
  for (int l = 0; l < element_count_; ++l) {
    unit_theta[l] = std::polar(1.0, phases.phases[l]);
  }

  Eigen::VectorXcd h = Eigen::VectorXcd::Zero(S);
  for (int k = 0; k < voxel_count_; ++k) {
    double vk = v.values[k];
    if (vk == 0.0) continue;
    double d_direct = d_tx_voxel_[k] + d_voxel_rx_[k];
    cdouble cur = std::polar(vk * att_.direct(d_tx_voxel_[k], d_voxel_rx_[k]), w0 * d_direct);
    cdouble step = std::polar(1.0, dw * d_direct);
    for (int s = 0; s < S; ++s) {
      h[s] += cur;
      cur *= step;
    }
    for (int l = 0; l < element_count_; ++l) {
      double d_lv = d_element_voxel_[(size_t)l * voxel_count_ + k];
      double d_bounce = d_tx_element_[l] + d_lv + d_voxel_rx_[k];
      double amp = vk * att_.bounced(d_tx_element_[l], d_lv, d_voxel_rx_[k]);
      cdouble cb = std::polar(amp, w0 * d_bounce) * unit_theta[l];
      cdouble sb = std::polar(1.0, dw * d_bounce);
      for (int s = 0; s < S; ++s) {
        h[s] += cb;
        cb *= sb;
      }
    }
  }
  return h;
}

Eigen::VectorXcd CsiSynthesizer::synthesize(const ReflectivityMap& v, const PhaseConfig& phases,
                                            const NoiseModel& noise,
                                            std::uint64_t noise_stream) const {
  Eigen::VectorXcd h = synthesize(v, phases);
  if (!noise.enabled) return h;
  double signal_power = h.squaredNorm() / (double)h.size();
  double noise_power = signal_power / std::pow(10.0, noise.snr_db / 10.0);
  double sigma = std::sqrt(0.5 * noise_power);
  // splitmix-style stream separation keeps parallel draws independent
  std::uint64_t mixed = noise.seed + 0x9e3779b97f4a7c15ull * (noise_stream + 1);
  std::mt19937_64 rng(mixed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int s = 0; s < h.size(); ++s) {
    double re = gauss(rng);
    double im = gauss(rng);
    h[s] += cdouble(sigma * re, sigma * im);
  }
  return h;
}

CsiMeasurement synthesize_csi(const SceneConfig& cfg, const ReflectivityMap& v,
                              const PhaseConfig& phases, const AttenuationModel& att,
                              const NoiseModel& noise, const std::string& config_id) {
  CsiSynthesizer synth(cfg, att);
  CsiMeasurement m;
  m.h = synth.synthesize(v, phases, noise, 0);
  m.config_id = config_id;
  return m;
}

}  // namespace risim
