#pragma once

#include <string>
#include <utility>
#include <vector>

#include "risim/scene.hpp"

namespace risim {

// Root-mean-square error between two equally sized maps, each max-normalized
// to [0, 1] first. Identical maps give 0; all-ones vs all-zeros gives 1.
double rmse(const ReflectivityMap& a, const ReflectivityMap& b);

// Single-window structural similarity over the whole (max-normalized) map:
// (2 mu_a mu_b + c1)(2 cov + c2) / ((mu_a^2 + mu_b^2 + c1)(var_a + var_b + c2))
// with c1 = (k1 D)^2, c2 = (k2 D)^2 and D the dynamic range after
// normalization (1.0).
double ssim(const ReflectivityMap& a, const ReflectivityMap& b, double k1 = 0.01,
            double k2 = 0.03, double dynamic_range = 1.0);

struct Resolution {
  double x = 0.0;  // meters; infinity when the aperture has no extent
  double y = 0.0;
};

// Cross-range resolution lambda_c * R / D per axis, D = (count - 1) * spacing.
// A single-element axis has no aperture: that axis is returned as infinity.
Resolution cross_range_resolution(const SceneConfig& cfg);

// Strict 3x3 local maxima of a magnitude map at or above rel_threshold times
// the global maximum. Used to count resolvable scatterers.
std::vector<std::pair<int, int>> find_peaks(const ReflectivityMap& intensity,
                                            double rel_threshold = 0.5);

// Largest target-cell magnitude divided by the largest magnitude outside the
// (2*guard+1)^2 neighborhoods of all targets. Infinity if nothing lies outside.
double peak_to_sidelobe_ratio(const ReflectivityMap& intensity,
                              const std::vector<std::pair<int, int>>& targets, int guard = 1);

struct MetricReport {
  std::string scene;
  std::string method;
  std::string ris_size;   // "17x17", or "-" for the array baseline
  std::string bits;       // "continuous", "1", "2", or "-"
  double rmse = 0.0;
  double ssim = 0.0;
  double resolution_x = 0.0;
  double resolution_y = 0.0;
};

}  // namespace risim
