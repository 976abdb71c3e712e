#include "risim/beamformer.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace risim {

ReflectivityMap BeamformedImage::intensity() const {
  ReflectivityMap m(nx, ny);
  for (int i = 0; i < m.size(); ++i) m.values[i] = std::abs(p[i]);
  return m;
}

PhaseConfig focus_phases(const SceneConfig& cfg, int focus_voxel, int quantization_bits) {
  if (focus_voxel < 0 || focus_voxel >= cfg.voxel_count()) {
    throw std::out_of_range("focus voxel outside grid");
  }
  auto elements = ris_element_positions(cfg);
  Vec3 v = cfg.voxel_position(focus_voxel);
  double w = kTwoPi * cfg.center_frequency_hz / kSpeedOfLight;
  double d_rx = distance(v, cfg.rx_position);
  double beta = w * (distance(cfg.tx_position, v) + d_rx);

  PhaseConfig pc;
  pc.quantization_bits = quantization_bits;
  pc.phases.resize((int)elements.size());
  for (size_t l = 0; l < elements.size(); ++l) {
    double phi = w * (distance(cfg.tx_position, elements[l]) + distance(elements[l], v) + d_rx);
    pc.phases[(int)l] = quantize_phase(beta - phi, quantization_bits);
  }
  return pc;
}

BeamformedImage beamform_image(const SceneConfig& cfg, const ReflectivityMap& v,
                               const AttenuationModel& att, int quantization_bits,
                               const NoiseModel& noise) {
  cfg.validate();
  if (v.nx != cfg.grid_nx || v.ny != cfg.grid_ny) {
    throw std::invalid_argument("reflectivity map does not match the scene grid");
  }
  const int K = cfg.voxel_count();
  const int S = cfg.subcarrier_count;
  const double f0 = cfg.subcarrier_frequency(0);
  const double w0 = kTwoPi * f0 / kSpeedOfLight;
  const double dw = kTwoPi * (cfg.bandwidth_hz / S) / kSpeedOfLight;

  CsiSynthesizer synth(cfg, att);
  BeamformedImage img;
  img.nx = cfg.grid_nx;
  img.ny = cfg.grid_ny;
  img.p.resize(K);

  // One sequential measurement per focus voxel; voxels are independent, so the
  // scan parallelizes without changing any result.
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (int kp = 0; kp < K; ++kp) {
    PhaseConfig pc = focus_phases(cfg, kp, quantization_bits);
    Eigen::VectorXcd h = synth.synthesize(v, pc, noise, (std::uint64_t)kp);
    Vec3 pos = cfg.voxel_position(kp);
    double d = distance(cfg.tx_position, pos) + distance(pos, cfg.rx_position);
    cdouble comp = std::polar(1.0, -w0 * d);
    cdouble step = std::polar(1.0, -dw * d);
    cdouble acc(0.0, 0.0);
    for (int s = 0; s < S; ++s) {
      acc += comp * h[s];
      comp *= step;
    }
    img.p[kp] = acc;
  }
  return img;
}

TransferMatrix build_transfer_matrix(const SceneConfig& cfg, const AttenuationModel& att,
                                     int quantization_bits) {
  cfg.validate();
  const int K = cfg.voxel_count();
  const int L = cfg.element_count();
  const int S = cfg.subcarrier_count;

  auto elements = ris_element_positions(cfg);
  std::vector<double> d_tx_element(L), d_tx_voxel(K), d_voxel_rx(K);
  std::vector<double> d_element_voxel((size_t)L * K);
  for (int l = 0; l < L; ++l) d_tx_element[l] = distance(cfg.tx_position, elements[l]);
  for (int k = 0; k < K; ++k) {
    Vec3 v = cfg.voxel_position(k);
    d_tx_voxel[k] = distance(cfg.tx_position, v);
    d_voxel_rx[k] = distance(v, cfg.rx_position);
    for (int l = 0; l < L; ++l) {
      d_element_voxel[(size_t)l * K + k] = distance(elements[l], v);
    }
  }

  // Unit phasors of the configured surface, one row per focus voxel.
  Eigen::MatrixXcd theta(K, L);
  for (int kp = 0; kp < K; ++kp) {
    PhaseConfig pc = focus_phases(cfg, kp, quantization_bits);
    for (int l = 0; l < L; ++l) theta(kp, l) = std::polar(1.0, pc.phases[l]);
  }

  // H = sum_s [ w_s a_s^T + diag(w_s) (theta G_s) ] with
  //   w_s(k') = e^{-j beta_k'^s}   (focus compensation)
  //   a_s(k)  = alpha_k e^{j beta_k^s}
  //   G_s(l,k) = alpha_lk e^{j phi_lk^s}
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(K, K);
  Eigen::VectorXcd ws(K), as(K);
  Eigen::MatrixXcd G(L, K);
  for (int s = 0; s < S; ++s) {
    double w = kTwoPi * cfg.subcarrier_frequency(s) / kSpeedOfLight;
    for (int k = 0; k < K; ++k) {
      double beta = w * (d_tx_voxel[k] + d_voxel_rx[k]);
      ws[k] = std::polar(1.0, -beta);
      as[k] = std::polar(att.direct(d_tx_voxel[k], d_voxel_rx[k]), beta);
    }
    for (int l = 0; l < L; ++l) {
      for (int k = 0; k < K; ++k) {
        double d_lv = d_element_voxel[(size_t)l * K + k];
        G(l, k) = std::polar(att.bounced(d_tx_element[l], d_lv, d_voxel_rx[k]),
                             w * (d_tx_element[l] + d_lv + d_voxel_rx[k]));
      }
    }
    H.noalias() += ws * as.transpose();
    H.noalias() += ws.asDiagonal() * (theta * G).eval();
  }
  return {std::move(H)};
}

BeamformedImage mimo_baseline_image(const MimoArrayConfig& array, const SceneConfig& cfg,
                                    const ReflectivityMap& v, const AttenuationModel& att) {
  cfg.validate();
  if (v.nx != cfg.grid_nx || v.ny != cfg.grid_ny) {
    throw std::invalid_argument("reflectivity map does not match the scene grid");
  }
  if (array.antennas_per_axis < 1 || array.antenna_spacing <= 0.0) {
    throw std::invalid_argument("array needs >= 1 antennas per axis and positive spacing");
  }
  const int A = array.antennas_per_axis;
  const int K = cfg.voxel_count();
  const int S = cfg.subcarrier_count;
  const double f0 = cfg.subcarrier_frequency(0);
  const double w0 = kTwoPi * f0 / kSpeedOfLight;
  const double dw = kTwoPi * (cfg.bandwidth_hz / S) / kSpeedOfLight;
  const double wc = kTwoPi * cfg.center_frequency_hz / kSpeedOfLight;
  const double half = 0.5 * (A - 1);

  // Transmit line along x, receive line along y, both centered on the origin.
  std::vector<Vec3> tx(A), rx(A);
  for (int m = 0; m < A; ++m) {
    tx[m] = array.origin + Vec3{(m - half) * array.antenna_spacing, 0.0, 0.0};
    rx[m] = array.origin + Vec3{0.0, (m - half) * array.antenna_spacing, 0.0};
  }

  // Direct-path CSI for each antenna pair, h[(m * A + n) * S + s].
  std::vector<cdouble> h((size_t)A * A * S, cdouble(0, 0));
  for (int k = 0; k < K; ++k) {
    double vk = v.values[k];
    if (vk == 0.0) continue;
    Vec3 pos = cfg.voxel_position(k);
    for (int m = 0; m < A; ++m) {
      double d_t = distance(tx[m], pos);
      for (int n = 0; n < A; ++n) {
        double d_r = distance(pos, rx[n]);
        double d = d_t + d_r;
        cdouble cur = std::polar(vk * att.direct(d_t, d_r), w0 * d);
        cdouble step = std::polar(1.0, dw * d);
        cdouble* dst = &h[((size_t)m * A + n) * S];
        for (int s = 0; s < S; ++s) {
          dst[s] += cur;
          cur *= step;
        }
      }
    }
  }

  // Far-field backprojection: conjugate of the virtual-element model phase,
  // with the angle kernel at the band center and a two-way range term.
  BeamformedImage img;
  img.nx = cfg.grid_nx;
  img.ny = cfg.grid_ny;
  img.p.resize(K);
  for (int k = 0; k < K; ++k) {
    Vec3 rel = cfg.voxel_position(k) - array.origin;
    double r = norm(rel);
    double ux = r > 0.0 ? rel.x / r : 0.0;
    double uy = r > 0.0 ? rel.y / r : 0.0;
    cdouble acc(0, 0);
    for (int m = 0; m < A; ++m) {
      for (int n = 0; n < A; ++n) {
        double angle_term =
            wc * array.antenna_spacing * ((m - half) * ux + (n - half) * uy);
        cdouble steer = std::polar(1.0, angle_term);
        cdouble comp = std::polar(1.0, -w0 * 2.0 * r);
        cdouble step = std::polar(1.0, -dw * 2.0 * r);
        const cdouble* src = &h[((size_t)m * A + n) * S];
        cdouble pair_acc(0, 0);
        for (int s = 0; s < S; ++s) {
          pair_acc += comp * src[s];
          comp *= step;
        }
        acc += steer * pair_acc;
      }
    }
    img.p[k] = acc;
  }
  return img;
}

}  // namespace risim
