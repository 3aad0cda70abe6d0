#pragma once

#include "inertia/dynamics.hpp"
#include "inertia/kdtree.hpp"
#include "inertia/types.hpp"

#include <utility>
#include <vector>

namespace inertia {

// Gaussian similarity matrix K of shape (N+1) x N with
//   K_ij = exp(-||X_i - X_j||^2 / (2 sigma^2 dt)),
// entries beyond the cut-off radius 3 sqrt(2 sigma^2 dt) dropped.
struct SparseKernel {
  SpMat k;
  Scalar sigma = 0;
  Scalar dt = 0;
  Scalar cutoff_radius = 0;
};

// Row-stochastic, density-corrected diffusion matrix, same shape as K.
struct DiffusionMatrix {
  SpMat d;
  Scalar sigma = 0;
  Scalar dt = 0;
};

struct NeighborPair {
  Index i, j;     // i <= j
  Scalar dist;
};

// All unordered pairs within `radius` (inclusive), self-pairs included.
std::vector<NeighborPair> neighbor_pairs(const Mat& points, Scalar radius);

SparseKernel similarity_matrix(const TrajectoryDataset& ds, Scalar sigma);

// Pre-normalize by the column point's kernel density, then row-normalize:
//   Khat_ij = K_ij / K_j,   D_ij = Khat_ij / sum_j Khat_ij,
// where K_j is the row sum of row j of the symmetric top N x N block.
DiffusionMatrix diffusion_matrix(const SparseKernel& kernel);

// The sub-block D(rows, cols) with the *global* normalizations, assembled
// by streaming over neighbor lists; never materializes the full matrix.
// rows/cols are 0-based indices into the (N+1) x N diffusion matrix.
SpMat diffusion_submatrix(const TrajectoryDataset& ds, Scalar sigma,
                          const std::vector<Index>& rows, const std::vector<Index>& cols);

// log-log kernel-sum diagnostic. The slope of log sum_ij K^sigma_ij
// against log sigma on its linear plateau estimates the local dimension
// of the sampled set, and the plateau marks the usable sigma range.
struct DiagnosticCurve {
  Vec sigma_grid;
  Vec norm_sums;   // sum_ij K_ij / normalizer
  Vec log_sums;
  Vec slopes;      // d log(sum) / d log(sigma), central differences
  Scalar sigma_star = 0;  // argmax slope
  Scalar d_est = 0;       // max slope

  // Contiguous sigma interval around sigma_star where the slope stays
  // above frac * d_est.
  std::pair<Scalar, Scalar> plateau(Scalar frac = 0.5) const;
};

// Diagnostic over the dataset's true (N+1) x N kernel, normalized by N(N+1).
DiagnosticCurve kernel_sum_curve(const TrajectoryDataset& ds, const Vec& sigma_grid);
// Diagnostic over an arbitrary point set (n x n kernel, normalized by n^2).
DiagnosticCurve kernel_sum_curve(const Mat& points, Scalar dt, const Vec& sigma_grid);

}  // namespace inertia
