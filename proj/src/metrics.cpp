#include "risim/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace risim {

namespace {

Eigen::VectorXd max_normalized(const ReflectivityMap& m) {
  double peak = m.values.size() ? m.values.maxCoeff() : 0.0;
  if (peak > 0.0) return m.values / peak;
  return m.values;
}

void check_same_shape(const ReflectivityMap& a, const ReflectivityMap& b) {
  if (a.nx != b.nx || a.ny != b.ny) {
    throw std::invalid_argument("metric inputs must share dimensions");
  }
  if (a.size() == 0) throw std::invalid_argument("metric inputs are empty");
}

}  // namespace

double rmse(const ReflectivityMap& a, const ReflectivityMap& b) {
  check_same_shape(a, b);
  Eigen::VectorXd na = max_normalized(a);
  Eigen::VectorXd nb = max_normalized(b);
  return std::sqrt((na - nb).squaredNorm() / (double)na.size());
}

double ssim(const ReflectivityMap& a, const ReflectivityMap& b, double k1, double k2,
            double dynamic_range) {
  check_same_shape(a, b);
  Eigen::VectorXd na = max_normalized(a);
  Eigen::VectorXd nb = max_normalized(b);
  const double n = (double)na.size();
  double mu_a = na.mean();
  double mu_b = nb.mean();
  double var_a = (na.array() - mu_a).square().sum() / n;
  double var_b = (nb.array() - mu_b).square().sum() / n;
  double cov = ((na.array() - mu_a) * (nb.array() - mu_b)).sum() / n;
  double c1 = (k1 * dynamic_range) * (k1 * dynamic_range);
  double c2 = (k2 * dynamic_range) * (k2 * dynamic_range);
  return ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
         ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
}

Resolution cross_range_resolution(const SceneConfig& cfg) {
  double lambda = cfg.wavelength_center();
  double range = std::abs(cfg.grid_plane_z - cfg.ris_center.z);
  double d = cfg.element_spacing();
  auto axis = [&](int count) {
    if (count < 2) return std::numeric_limits<double>::infinity();
    return lambda * range / ((count - 1) * d);
  };
  return {axis(cfg.ris_rows), axis(cfg.ris_cols)};
}

std::vector<std::pair<int, int>> find_peaks(const ReflectivityMap& intensity,
                                            double rel_threshold) {
  std::vector<std::pair<int, int>> peaks;
  double gmax = intensity.values.size() ? intensity.values.maxCoeff() : 0.0;
  if (gmax <= 0.0) return peaks;
  double floor = rel_threshold * gmax;
  for (int ix = 0; ix < intensity.nx; ++ix) {
    for (int iy = 0; iy < intensity.ny; ++iy) {
      double c = intensity.at(ix, iy);
      if (c < floor) continue;
      bool strict_max = true;
      for (int dx = -1; dx <= 1 && strict_max; ++dx) {
        for (int dy = -1; dy <= 1; ++dy) {
          if (dx == 0 && dy == 0) continue;
          int jx = ix + dx, jy = iy + dy;
          if (jx < 0 || jx >= intensity.nx || jy < 0 || jy >= intensity.ny) continue;
          if (intensity.at(jx, jy) >= c) {
            strict_max = false;
            break;
          }
        }
      }
      if (strict_max) peaks.emplace_back(ix, iy);
    }
  }
  return peaks;
}

double peak_to_sidelobe_ratio(const ReflectivityMap& intensity,
                              const std::vector<std::pair<int, int>>& targets, int guard) {
  if (targets.empty()) throw std::invalid_argument("need at least one target cell");
  double mainlobe = 0.0;
  for (auto& t : targets) mainlobe = std::max(mainlobe, intensity.at(t.first, t.second));
  double side = 0.0;
  bool any_outside = false;
  for (int ix = 0; ix < intensity.nx; ++ix) {
    for (int iy = 0; iy < intensity.ny; ++iy) {
      bool guarded = false;
      for (auto& t : targets) {
        if (std::abs(ix - t.first) <= guard && std::abs(iy - t.second) <= guard) {
          guarded = true;
          break;
        }
      }
      if (guarded) continue;
      any_outside = true;
      side = std::max(side, intensity.at(ix, iy));
    }
  }
  if (!any_outside || side == 0.0) return std::numeric_limits<double>::infinity();
  return mainlobe / side;
}

}  // namespace risim
