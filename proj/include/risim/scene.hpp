#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "risim/common.hpp"

namespace risim {

// Static description of one measurement setup: two single-antenna access
// points, a rectangular surface of phase-shifting elements in the x-y plane,
// the RF parameters, and the imaging grid on a plane parallel to the surface.
struct SceneConfig {
  Vec3 tx_position{0.0, -1.0, 0.5};
  Vec3 rx_position{0.0, 1.0, 0.5};

  int ris_rows = 17;                  // M, elements along x
  int ris_cols = 17;                  // N, elements along y
  double ris_element_spacing = 0.0;   // meters; <= 0 selects half-wavelength
  Vec3 ris_center{0.0, 0.0, 0.0};

  double center_frequency_hz = 5.31e9;
  double bandwidth_hz = 40e6;
  int subcarrier_count = 30;

  Vec3 grid_origin{-0.25, -0.25, 0.0};  // x/y of voxel (0,0); z comes from grid_plane_z
  int grid_nx = 26;
  int grid_ny = 26;
  double grid_step = 0.02;
  double grid_plane_z = 1.0;

  int voxel_count() const { return grid_nx * grid_ny; }
  int element_count() const { return ris_rows * ris_cols; }
  double wavelength_center() const { return kSpeedOfLight / center_frequency_hz; }
  // Resolved element spacing: explicit value, or half the center wavelength.
  double element_spacing() const {
    return ris_element_spacing > 0.0 ? ris_element_spacing : 0.5 * wavelength_center();
  }
  // Subcarriers sample the band uniformly and symmetrically about the center:
  // f_s = f_c - B/2 + (s + 1/2) * B / S, s in [0, S).
  double subcarrier_frequency(int s) const;
  // Voxel index k = ix * grid_ny + iy (row-major over the grid).
  Vec3 voxel_position(int k) const;

  void validate() const;  // throws std::invalid_argument on bad fields
};

// Real-valued reflectivity image on the scene grid, flattened row-major
// (k = ix * ny + iy). Values are expected to live in [0, 1].
struct ReflectivityMap {
  int nx = 0;
  int ny = 0;
  Eigen::VectorXd values;

  ReflectivityMap() = default;
  ReflectivityMap(int nx_, int ny_) : nx(nx_), ny(ny_), values(Eigen::VectorXd::Zero(nx_ * ny_)) {}

  double& at(int ix, int iy) { return values[ix * ny + iy]; }
  double at(int ix, int iy) const { return values[ix * ny + iy]; }
  int size() const { return nx * ny; }

  // Row ix of the matrix view corresponds to grid x index ix.
  Eigen::MatrixXd as_matrix() const;
  static ReflectivityMap from_matrix(const Eigen::MatrixXd& m);
};

// Euclidean path lengths between one voxel and every other actor in a scene.
struct PathGeometry {
  double d_tx_voxel = 0.0;                 // AP1 -> voxel
  double d_voxel_rx = 0.0;                 // voxel -> AP2
  std::vector<double> d_tx_element;        // AP1 -> element l
  std::vector<double> d_element_voxel;     // element l -> voxel

  double direct_total() const { return d_tx_voxel + d_voxel_rx; }
  // Full surface-bounce path: AP1 -> element -> voxel -> AP2.
  double ris_total(int l) const { return d_tx_element[l] + d_element_voxel[l] + d_voxel_rx; }
};

// Element centers of the M x N surface, indexed l = m * N + n. The array is
// centered on ris_center and lies in the plane z = ris_center.z.
std::vector<Vec3> ris_element_positions(const SceneConfig& cfg);

// Binary letter target rasterized from axis-aligned bars with 0.10 m stroke
// width. The grid has round(extent/step) + 1 cells per side. Supported
// letters: E, T, L. Throws std::invalid_argument otherwise.
ReflectivityMap make_letter_scene(char letter, double extent_m, double step_m);

// Ones at the grid cells nearest to the given (x, y) points on the imaging
// plane. Points outside the grid throw std::out_of_range.
ReflectivityMap make_point_scene(const std::vector<std::array<double, 2>>& points_xy,
                                 const SceneConfig& cfg);

// All path lengths for one voxel. Throws std::out_of_range on a bad index.
PathGeometry path_lengths(const SceneConfig& cfg, int voxel);

}  // namespace risim
