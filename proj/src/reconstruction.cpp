#include "risim/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/SVD>

namespace risim {

Eigen::MatrixXd weighted_svt(const Eigen::MatrixXd& m, const Eigen::VectorXd& weights) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd s = svd.singularValues();
  if (weights.size() != s.size()) {
    throw std::invalid_argument("need one weight per singular value");
  }
  for (int i = 0; i < s.size(); ++i) {
    if (weights[i] < 0.0) throw std::invalid_argument("singular value weights must be >= 0");
    s[i] = std::max(s[i] - weights[i], 0.0);
  }
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

Eigen::VectorXd estimate_weights(const Eigen::VectorXd& singular_values, int group_columns,
                                 double noise_sigma, const PatchParams& params) {
  Eigen::VectorXd w(singular_values.size());
  double n = (double)group_columns;
  for (int i = 0; i < singular_values.size(); ++i) {
    double s2 = singular_values[i] * singular_values[i];
    double shat = std::sqrt(std::max(s2 - n * noise_sigma * noise_sigma, 0.0));
    w[i] = params.weight_constant * std::sqrt(n) / (shat + params.weight_epsilon);
  }
  return w;
}

PatchGroup find_similar_patches(const Eigen::MatrixXd& image, int anchor_row, int anchor_col,
                                const PatchParams& params) {
  const int ps = params.patch_size;
  const int rows = (int)image.rows();
  const int cols = (int)image.cols();
  if (ps < 1 || ps > rows || ps > cols) throw std::invalid_argument("patch does not fit image");
  if (anchor_row < 0 || anchor_row > rows - ps || anchor_col < 0 || anchor_col > cols - ps) {
    throw std::invalid_argument("anchor patch out of bounds");
  }

  auto patch_vector = [&](int r, int c) {
    Eigen::VectorXd p(ps * ps);
    for (int i = 0; i < ps; ++i)
      for (int j = 0; j < ps; ++j) p[i * ps + j] = image(r + i, c + j);
    return p;
  };
  Eigen::VectorXd anchor = patch_vector(anchor_row, anchor_col);

  // Candidates: top-left corners within floor(window/2) of the anchor on both
  // axes, clipped to valid positions, visited in raster order.
  int radius = params.search_window / 2;
  int r_lo = std::max(0, anchor_row - radius);
  int r_hi = std::min(rows - ps, anchor_row + radius);
  int c_lo = std::max(0, anchor_col - radius);
  int c_hi = std::min(cols - ps, anchor_col + radius);

  struct Candidate {
    double dist2;
    int r, c;
  };
  std::vector<Candidate> cands;
  for (int r = r_lo; r <= r_hi; ++r) {
    for (int c = c_lo; c <= c_hi; ++c) {
      if (r == anchor_row && c == anchor_col) continue;
      double d2 = (patch_vector(r, c) - anchor).squaredNorm();
      cands.push_back({d2, r, c});
    }
  }
  // stable sort keeps raster order among equal distances
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Candidate& a, const Candidate& b) { return a.dist2 < b.dist2; });

  int group = std::min<int>(params.group_size, 1 + (int)cands.size());
  PatchGroup out;
  out.patches.resize(ps * ps, group);
  out.positions.reserve(group);
  out.patches.col(0) = anchor;
  out.positions.emplace_back(anchor_row, anchor_col);
  for (int i = 1; i < group; ++i) {
    out.patches.col(i) = patch_vector(cands[i - 1].r, cands[i - 1].c);
    out.positions.emplace_back(cands[i - 1].r, cands[i - 1].c);
  }
  return out;
}

double estimate_noise_sigma(const Eigen::MatrixXd& image) {
  const int rows = (int)image.rows();
  const int cols = (int)image.cols();
  Eigen::MatrixXd residual(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double sum = 0.0;
      int count = 0;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          int rr = r + dr, cc = c + dc;
          if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
          sum += image(rr, cc);
          ++count;
        }
      }
      residual(r, c) = image(r, c) - sum / count;
    }
  }
  std::vector<double> vals(residual.data(), residual.data() + residual.size());
  auto median_of = [](std::vector<double> v) {
    size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    std::nth_element(v.begin(), v.begin() + mid - 1, v.end());
    return 0.5 * (hi + v[mid - 1]);
  };
  double med = median_of(vals);
  for (auto& x : vals) x = std::abs(x - med);
  return 1.4826 * median_of(vals);
}

namespace {

// Anchor lattice: stride steps plus the final fitting position, so the whole
// image stays covered for any stride.
std::vector<int> anchor_positions(int extent, int patch, int stride) {
  std::vector<int> pos;
  int last = extent - patch;
  for (int x = 0; x < last; x += stride) pos.push_back(x);
  pos.push_back(last);
  return pos;
}

Eigen::MatrixXd denoise_pass(const Eigen::MatrixXd& image, const PatchParams& params) {
  const int ps = params.patch_size;
  double sigma = params.noise_sigma >= 0.0 ? params.noise_sigma : estimate_noise_sigma(image);

  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(image.rows(), image.cols());
  Eigen::MatrixXd cover = Eigen::MatrixXd::Zero(image.rows(), image.cols());
  for (int ar : anchor_positions((int)image.rows(), ps, params.patch_stride)) {
    for (int ac : anchor_positions((int)image.cols(), ps, params.patch_stride)) {
      PatchGroup group = find_similar_patches(image, ar, ac, params);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(group.patches,
                                            Eigen::ComputeThinU | Eigen::ComputeThinV);
      Eigen::VectorXd w =
          estimate_weights(svd.singularValues(), (int)group.patches.cols(), sigma, params);
      Eigen::VectorXd s = svd.singularValues();
      for (int i = 0; i < s.size(); ++i) s[i] = std::max(s[i] - w[i], 0.0);
      Eigen::MatrixXd denoised = svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
      for (int col = 0; col < denoised.cols(); ++col) {
        auto [pr, pc] = group.positions[col];
        for (int i = 0; i < ps; ++i) {
          for (int j = 0; j < ps; ++j) {
            acc(pr + i, pc + j) += denoised(i * ps + j, col);
            cover(pr + i, pc + j) += 1.0;
          }
        }
      }
    }
  }
  Eigen::MatrixXd out = image;
  for (int r = 0; r < image.rows(); ++r) {
    for (int c = 0; c < image.cols(); ++c) {
      if (cover(r, c) > 0.0) out(r, c) = acc(r, c) / cover(r, c);
    }
  }
  return out;
}

}  // namespace

Eigen::MatrixXd wnnm_denoise(const Eigen::MatrixXd& image, const PatchParams& params,
                             int inner_iters, double delta) {
  if (params.patch_size > image.rows() || params.patch_size > image.cols()) {
    throw std::invalid_argument("patch does not fit image");
  }
  Eigen::MatrixXd z = image;
  Eigen::MatrixXd f = image;
  for (int j = 1; j <= inner_iters; ++j) {
    f = delta * (f - image) + z;
    z = denoise_pass(f, params);
  }
  return z;
}

namespace {

// Largest singular value by fixed-iteration power method on H^H H; the
// all-ones start and fixed count keep the estimate reproducible.
double operator_norm(const Eigen::MatrixXcd& h) {
  Eigen::VectorXcd x = Eigen::VectorXcd::Ones(h.cols());
  x /= x.norm();
  for (int it = 0; it < 100; ++it) {
    Eigen::VectorXcd y = h.adjoint() * (h * x);
    double n = y.norm();
    if (n == 0.0) return 0.0;
    x = y / n;
  }
  return (h * x).norm();
}

}  // namespace

AdmmResult admm_reconstruct(const BeamformedImage& p, const TransferMatrix& H,
                            const AdmmParams& admm, const PatchParams& patch) {
  const int K = (int)H.h.rows();
  if (H.h.cols() != K) throw std::invalid_argument("transfer matrix must be square");
  if ((int)p.p.size() != K || p.nx * p.ny != K) {
    throw std::invalid_argument("image size does not match the transfer matrix");
  }
  if (admm.rho <= 0.0 || admm.delta <= 0.0 || admm.delta > 1.0) {
    throw std::invalid_argument("need rho > 0 and delta in (0, 1]");
  }

  // Balance the data block against the identity block: scale H and p by the
  // operator norm so both halves of [H; I] act on comparable magnitudes.
  double hnorm = operator_norm(H.h);
  if (!(hnorm > 0.0)) throw std::invalid_argument("transfer matrix is zero");
  Eigen::MatrixXcd Hn = H.h / hnorm;
  Eigen::VectorXcd pn = p.p / hnorm;

  const double rho = admm.rho;
  // After scaling, the stacked operator norm is sqrt(1 + 1) up to the power
  // method tolerance; the margin keeps the gradient step contractive.
  const double mu = admm.mu > 0.0 ? admm.mu : rho * 2.0 * 1.02;

  PatchParams pp = patch;
  pp.weight_constant *= admm.lambda;

  Eigen::VectorXd v = Eigen::VectorXd::Zero(K);
  Eigen::VectorXcd z1 = Eigen::VectorXcd::Zero(K);
  Eigen::VectorXd z2 = Eigen::VectorXd::Zero(K);
  Eigen::VectorXcd u1 = Eigen::VectorXcd::Zero(K);
  Eigen::VectorXd u2 = Eigen::VectorXd::Zero(K);

  AdmmResult result;
  double p_scale = pn.norm();
  for (int it = 0; it < admm.outer_iters; ++it) {
    Eigen::VectorXcd hv = Hn * v;

    z1 = (pn + rho * (hv + u1)) / (1.0 + rho);

    Eigen::VectorXd f2 = v + u2;
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        f2_mat(f2.data(), p.nx, p.ny);
    Eigen::MatrixXd z2_mat = wnnm_denoise(f2_mat, pp, admm.inner_iters, admm.delta);
    for (int ix = 0; ix < p.nx; ++ix)
      for (int iy = 0; iy < p.ny; ++iy) z2[ix * p.ny + iy] = z2_mat(ix, iy);

    u1 += hv - z1;
    u2 += v - z2;

    Eigen::VectorXd grad =
        (Hn.adjoint() * (hv - (z1 - u1))).real() + (v - (z2 - u2));
    v -= (rho / mu) * grad;
    v = v.cwiseMax(0.0);

    Eigen::VectorXcd hv_new = Hn * v;
    double res = std::sqrt((hv_new - z1).squaredNorm() + (v - z2).squaredNorm());
    double obj = 0.5 * (pn - hv_new).squaredNorm();
    if (!std::isfinite(res) || !std::isfinite(obj)) {
      throw std::runtime_error("solver diverged at iteration " + std::to_string(it + 1));
    }
    result.primal_residual.push_back(res);
    result.data_objective.push_back(obj);
    result.iterations_run = it + 1;
    if (admm.early_stop && res < admm.early_stop_rel * p_scale) break;
  }

  result.image.nx = p.nx;
  result.image.ny = p.ny;
  result.image.values = v;
  double peak = result.image.values.maxCoeff();
  if (peak > 0.0) result.image.values /= peak;
  return result;
}

}  // namespace risim
