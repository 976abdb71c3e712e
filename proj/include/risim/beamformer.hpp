#pragma once

#include <Eigen/Dense>

#include "risim/forward_model.hpp"
#include "risim/scene.hpp"

namespace risim {

// Complex image produced by scanning the focus over the grid; same flattening
// as ReflectivityMap (k = ix * ny + iy).
struct BeamformedImage {
  int nx = 0;
  int ny = 0;
  Eigen::VectorXcd p;

  // Magnitude view |p|, used for rendering and metrics.
  ReflectivityMap intensity() const;
};

// Dense K x K map from reflectivity to beamformed image: p = H * v.
// Row k' holds the response of focus position k' to a unit scatterer at k.
struct TransferMatrix {
  Eigen::MatrixXcd h;
};

// Colocated baseline array: two orthogonal 3-antenna lines (transmit along x,
// receive along y), forming a 3x3 virtual rectangular aperture.
struct MimoArrayConfig {
  Vec3 origin{0.0, 0.0, 0.0};
  double antenna_spacing = 0.03;  // meters
  int antennas_per_axis = 3;
};

// Element phases that focus the surface on one voxel:
// theta_l = (beta_k' - phi_lk') mod 2*pi, both evaluated at the band center,
// then quantized to the requested depth.
PhaseConfig focus_phases(const SceneConfig& cfg, int focus_voxel, int quantization_bits);

// Sequential-measurement image: for every focus voxel, configure the surface,
// synthesize the CSI, compensate each subcarrier by e^{-j beta_k'^s}, and sum.
BeamformedImage beamform_image(const SceneConfig& cfg, const ReflectivityMap& v,
                               const AttenuationModel& att, int quantization_bits,
                               const NoiseModel& noise = {});

// Same protocol expressed as an explicit linear operator (phase quantization
// included). Accumulated subcarrier by subcarrier; agrees with beamform_image
// to floating-point accuracy.
TransferMatrix build_transfer_matrix(const SceneConfig& cfg, const AttenuationModel& att,
                                     int quantization_bits);

// Delay-and-sum image from the 3x3 virtual array: direct-path CSI for every
// antenna pair, steered across the grid with the far-field kernel
// e^{-j 2 pi / lambda_c * (m dx + n dy) . u} e^{-j 2 pi / lambda_s * r2} with
// r2 the two-way range to the voxel.
BeamformedImage mimo_baseline_image(const MimoArrayConfig& array, const SceneConfig& cfg,
                                    const ReflectivityMap& v, const AttenuationModel& att);

}  // namespace risim
