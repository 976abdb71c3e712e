#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "risim/beamformer.hpp"
#include "risim/scene.hpp"

namespace risim {

struct AdmmParams {
  double rho = 1.0;
  double mu = 0.0;       // <= 0: set to rho * (largest squared singular value
                         // of the stacked operator [H; I]) at run time
  double lambda = 1.0;   // multiplier on the singular-value weights
  int outer_iters = 50;
  int inner_iters = 3;   // low-rank refinement passes per outer iteration
  double delta = 0.1;    // feedback factor of the refinement recursion
  bool early_stop = false;
  double early_stop_rel = 1e-6;  // on the primal residual, relative to ||p||
};

struct PatchParams {
  int patch_size = 6;
  int patch_stride = 2;
  int group_size = 12;
  int search_window = 12;     // full side length of the candidate window
  double noise_sigma = -1.0;  // < 0: estimate from the image per call
  double weight_constant = 2.8284271247461903;  // 2*sqrt(2)
  double weight_epsilon = 1e-16;
};

// Group of similar patches: one vectorized patch per column (anchor first)
// plus the source position of each column.
struct PatchGroup {
  Eigen::MatrixXd patches;
  std::vector<std::pair<int, int>> positions;  // top-left (row, col)
};

struct AdmmResult {
  ReflectivityMap image;                 // clamped to [0, inf), max-normalized
  std::vector<double> primal_residual;   // ||Kv - z|| per outer iteration
  std::vector<double> data_objective;    // 0.5 * ||p - Hv||^2 per iteration
  int iterations_run = 0;
};

// P * soft(S) * Q^T where soft(S)_ii = max(S_ii - weights[i], 0).
// weights.size() must equal min(rows, cols); all weights must be >= 0.
Eigen::MatrixXd weighted_svt(const Eigen::MatrixXd& m, const Eigen::VectorXd& weights);

// Inverse-magnitude weights for the singular values of a patch group:
// w_i = weight_constant * sqrt(n) / (shat_i + eps),
// shat_i = sqrt(max(s_i^2 - n * noise_sigma^2, 0)), n = group column count.
Eigen::VectorXd estimate_weights(const Eigen::VectorXd& singular_values, int group_columns,
                                 double noise_sigma, const PatchParams& params);

// The group_size patches nearest (Euclidean) to the anchor patch among all
// patches whose top-left corner lies inside the search window. The anchor is
// always column 0; ties keep raster order.
PatchGroup find_similar_patches(const Eigen::MatrixXd& image, int anchor_row, int anchor_col,
                                const PatchParams& params);

// Robust noise scale: 1.4826 * median absolute deviation of the residual
// against a 3x3 mean filter.
double estimate_noise_sigma(const Eigen::MatrixXd& image);

// Patch-grouped low-rank shrinkage of a whole image, with inner_iters
// refinement passes feeding back delta times the current residual. Overlapping
// estimates are averaged by coverage count.
Eigen::MatrixXd wnnm_denoise(const Eigen::MatrixXd& image, const PatchParams& params,
                             int inner_iters, double delta);

// Splitting solver for p = H v with the patch low-rank prior. v stays real
// and non-negative; the returned image is max-normalized.
AdmmResult admm_reconstruct(const BeamformedImage& p, const TransferMatrix& H,
                            const AdmmParams& admm = {}, const PatchParams& patch = {});

}  // namespace risim
