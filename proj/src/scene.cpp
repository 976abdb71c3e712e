#include "risim/scene.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace risim {

double SceneConfig::subcarrier_frequency(int s) const {
  return center_frequency_hz -
         0.5 * bandwidth_hz + (s + 0.5) * bandwidth_hz / subcarrier_count;
}

Vec3 SceneConfig::voxel_position(int k) const {
  int ix = k / grid_ny;
  int iy = k % grid_ny;
  return {grid_origin.x + ix * grid_step, grid_origin.y + iy * grid_step, grid_plane_z};
}

void SceneConfig::validate() const {
  if (ris_rows < 1 || ris_cols < 1) throw std::invalid_argument("ris_rows/ris_cols must be >= 1");
  if (grid_nx < 1 || grid_ny < 1) throw std::invalid_argument("grid_nx/grid_ny must be >= 1");
  if (grid_step <= 0.0) throw std::invalid_argument("grid_step must be > 0");
  if (subcarrier_count < 1) throw std::invalid_argument("subcarrier_count must be >= 1");
  if (bandwidth_hz < 0.0) throw std::invalid_argument("bandwidth_hz must be >= 0");
  if (center_frequency_hz <= 0.0) throw std::invalid_argument("center_frequency_hz must be > 0");
  if (subcarrier_frequency(0) <= 0.0) {
    throw std::invalid_argument("bandwidth exceeds the carrier frequency");
  }
}

Eigen::MatrixXd ReflectivityMap::as_matrix() const {
  Eigen::MatrixXd m(nx, ny);
  for (int ix = 0; ix < nx; ++ix)
    for (int iy = 0; iy < ny; ++iy) m(ix, iy) = values[ix * ny + iy];
  return m;
}

ReflectivityMap ReflectivityMap::from_matrix(const Eigen::MatrixXd& m) {
  ReflectivityMap out((int)m.rows(), (int)m.cols());
  for (int ix = 0; ix < out.nx; ++ix)
    for (int iy = 0; iy < out.ny; ++iy) out.values[ix * out.ny + iy] = m(ix, iy);
  return out;
}

std::vector<Vec3> ris_element_positions(const SceneConfig& cfg) {
  double d = cfg.element_spacing();
  double x0 = -0.5 * (cfg.ris_rows - 1) * d;
  double y0 = -0.5 * (cfg.ris_cols - 1) * d;
  std::vector<Vec3> pos;
  pos.reserve(cfg.element_count());
  for (int m = 0; m < cfg.ris_rows; ++m) {
    for (int n = 0; n < cfg.ris_cols; ++n) {
      pos.push_back({cfg.ris_center.x + x0 + m * d, cfg.ris_center.y + y0 + n * d,
                     cfg.ris_center.z});
    }
  }
  return pos;
}

namespace {

constexpr double kStrokeWidthM = 0.10;

void fill_bar(ReflectivityMap& map, int x_lo, int x_hi, int y_lo, int y_hi) {
  for (int ix = x_lo; ix < x_hi; ++ix)
    for (int iy = y_lo; iy < y_hi; ++iy) map.at(ix, iy) = 1.0;
}

}  // namespace

ReflectivityMap make_letter_scene(char letter, double extent_m, double step_m) {
  if (extent_m <= 0.0 || step_m <= 0.0) {
    throw std::invalid_argument("letter scene extent and step must be > 0");
  }
  double cells = extent_m / step_m;
  if (std::abs(cells - std::round(cells)) > 1e-9) {
    throw std::invalid_argument("letter scene extent must be an integer multiple of step");
  }
  int n = (int)std::lround(cells) + 1;
  int w = std::min(n, std::max(1, (int)std::lround(kStrokeWidthM / step_m)));

  ReflectivityMap map(n, n);
  // iy counts upward in y, so "top" bars sit at high iy.
  switch (letter) {
    case 'E':
      fill_bar(map, 0, w, 0, n);                          // stem
      fill_bar(map, 0, n, 0, w);                          // bottom
      fill_bar(map, 0, n, (n - w) / 2, (n - w) / 2 + w);  // middle
      fill_bar(map, 0, n, n - w, n);                      // top
      break;
    case 'T':
      fill_bar(map, 0, n, n - w, n);                      // top
      fill_bar(map, (n - w) / 2, (n - w) / 2 + w, 0, n);  // stem
      break;
    case 'L':
      fill_bar(map, 0, w, 0, n);
      fill_bar(map, 0, n, 0, w);
      break;
    default:
      throw std::invalid_argument(std::string("unsupported letter '") + letter +
                                  "'; supported: E, T, L");
  }
  return map;
}

ReflectivityMap make_point_scene(const std::vector<std::array<double, 2>>& points_xy,
                                 const SceneConfig& cfg) {
  ReflectivityMap map(cfg.grid_nx, cfg.grid_ny);
  for (const auto& p : points_xy) {
    long ix = std::lround((p[0] - cfg.grid_origin.x) / cfg.grid_step);
    long iy = std::lround((p[1] - cfg.grid_origin.y) / cfg.grid_step);
    if (ix < 0 || ix >= cfg.grid_nx || iy < 0 || iy >= cfg.grid_ny) {
      throw std::out_of_range("point (" + std::to_string(p[0]) + ", " + std::to_string(p[1]) +
                              ") lies outside the imaging grid");
    }
    map.at((int)ix, (int)iy) = 1.0;
  }
  return map;
}

PathGeometry path_lengths(const SceneConfig& cfg, int voxel) {
  if (voxel < 0 || voxel >= cfg.voxel_count()) {
    throw std::out_of_range("voxel index " + std::to_string(voxel) + " outside grid of " +
                            std::to_string(cfg.voxel_count()));
  }
  Vec3 vpos = cfg.voxel_position(voxel);
  PathGeometry g;
  g.d_tx_voxel = distance(cfg.tx_position, vpos);
  g.d_voxel_rx = distance(vpos, cfg.rx_position);
  auto elements = ris_element_positions(cfg);
  g.d_tx_element.resize(elements.size());
  g.d_element_voxel.resize(elements.size());
  for (size_t l = 0; l < elements.size(); ++l) {
    g.d_tx_element[l] = distance(cfg.tx_position, elements[l]);
    g.d_element_voxel[l] = distance(elements[l], vpos);
  }
  return g;
}

}  // namespace risim
