#include "inertia/kernel.hpp"

#include "inertia/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace inertia {

namespace {

Scalar cutoff_for(Scalar sigma, Scalar dt) { return 3 * sigma * std::sqrt(2 * dt); }

// Neighbor lists (column indices j < N plus distances) for every row of
// the (N+1) x N kernel. Row N has no self-pair; if it would end up with
// fewer than two in-radius neighbors the radius of that row alone is
// widened to its second-nearest point so the implied chain cannot close
// into a single-node loop.
struct RowNeighbors {
  std::vector<Index> cols;
  std::vector<Scalar> dist;
};

class KernelAssembler {
 public:
  KernelAssembler(const TrajectoryDataset& ds, Scalar sigma)
      : ds_(ds),
        n_(ds.n_states()),
        sigma_(sigma),
        cutoff_(cutoff_for(sigma, ds.dt)),
        tree_(ds.points.topRows(ds.n_states())) {
    if (!(sigma > 0)) throw ConfigError("similarity kernel requires sigma > 0");
    if (n_ < 1) throw ConfigError("similarity kernel requires at least 2 points");
  }

  Index n() const { return n_; }
  Scalar cutoff() const { return cutoff_; }

  void row(Index i, RowNeighbors& out) const {
    Vec q = ds_.points.row(i).transpose();
    Scalar radius = cutoff_;
    tree_.radius_search(q, radius, out.cols);
    if (i == n_ && out.cols.size() < 2) {
      std::vector<Index> idx;
      std::vector<Scalar> dist;
      tree_.knn(q, 2, idx, dist);
      radius = dist.back();
      tree_.radius_search(q, radius, out.cols);
    }
    std::sort(out.cols.begin(), out.cols.end());
    out.dist.resize(out.cols.size());
    for (std::size_t k = 0; k < out.cols.size(); ++k)
      out.dist[k] = (ds_.points.row(out.cols[k]) - ds_.points.row(i)).norm();
  }

  Scalar weight(Scalar dist) const {
    return std::exp(-dist * dist / (2 * sigma_ * sigma_ * ds_.dt));
  }

  // Kernel values for one row. The widened last row can sit many cutoff
  // radii from every state; its absolute scale cancels in the row
  // normalization, so the exponent is shifted there before it underflows.
  void weights(Index row, const RowNeighbors& nb, std::vector<Scalar>& out) const {
    const Scalar scale = 1.0 / (2 * sigma_ * sigma_ * ds_.dt);
    out.resize(nb.dist.size());
    Scalar emax = -std::numeric_limits<Scalar>::infinity();
    for (Scalar d : nb.dist) emax = std::max(emax, -d * d * scale);
    Scalar shift = (row == n_ && emax < -700.0) ? emax : 0.0;
    for (std::size_t k = 0; k < nb.dist.size(); ++k)
      out[k] = std::exp(-nb.dist[k] * nb.dist[k] * scale - shift);
  }

 private:
  const TrajectoryDataset& ds_;
  Index n_;
  Scalar sigma_;
  Scalar cutoff_;
  KdTree tree_;
};

}  // namespace

std::vector<NeighborPair> neighbor_pairs(const Mat& points, Scalar radius) {
  if (points.rows() == 0) throw ConfigError("neighbor_pairs: empty point set");
  if (!(radius > 0)) throw ConfigError("neighbor_pairs: radius must be positive");
  if (!points.allFinite()) throw ConfigError("neighbor_pairs: non-finite points");
  KdTree tree(points);
  std::vector<NeighborPair> pairs;
  std::vector<Index> hits;
  for (Index i = 0; i < points.rows(); ++i) {
    tree.radius_search(points.row(i).transpose(), radius, hits);
    for (Index j : hits) {
      if (j < i) continue;
      pairs.push_back({i, j, (points.row(i) - points.row(j)).norm()});
    }
  }
  return pairs;
}

SparseKernel similarity_matrix(const TrajectoryDataset& ds, Scalar sigma) {
  KernelAssembler assembler(ds, sigma);
  const Index n = assembler.n();
  const Index rows = n + 1;

  std::vector<RowNeighbors> neighbors(static_cast<std::size_t>(rows));
  parallel_for(static_cast<std::size_t>(rows),
               [&](std::size_t i) { assembler.row(static_cast<Index>(i), neighbors[i]); });

  SparseKernel kernel;
  kernel.sigma = sigma;
  kernel.dt = ds.dt;
  kernel.cutoff_radius = assembler.cutoff();
  kernel.k.resize(rows, n);
  Eigen::VectorXi counts(rows);
  for (Index i = 0; i < rows; ++i)
    counts[i] = static_cast<int>(neighbors[static_cast<std::size_t>(i)].cols.size());
  kernel.k.reserve(counts);
  std::vector<Scalar> vals;
  for (Index i = 0; i < rows; ++i) {
    const auto& row = neighbors[static_cast<std::size_t>(i)];
    assembler.weights(i, row, vals);
    for (std::size_t k = 0; k < row.cols.size(); ++k)
      kernel.k.insert(i, row.cols[k]) = vals[k];
  }
  kernel.k.makeCompressed();
  return kernel;
}

DiffusionMatrix diffusion_matrix(const SparseKernel& kernel) {
  const SpMat& k = kernel.k;
  const Index n = k.cols();

  // density normalizers: row sums of the top N x N block
  Vec col_norm = Vec::Zero(n);
  for (Index i = 0; i < n; ++i)
    for (SpMat::InnerIterator it(k, i); it; ++it) col_norm[i] += it.value();

  DiffusionMatrix dm;
  dm.sigma = kernel.sigma;
  dm.dt = kernel.dt;
  dm.d = k;
  for (Index i = 0; i < dm.d.rows(); ++i) {
    Scalar row_sum = 0;
    for (SpMat::InnerIterator it(dm.d, i); it; ++it) {
      it.valueRef() /= col_norm[it.col()];
      row_sum += it.value();
    }
    if (row_sum <= 0) {
      std::ostringstream msg;
      msg << "diffusion_matrix: row " << i << " has no neighbors (isolated point)";
      throw NumericalError(msg.str());
    }
    for (SpMat::InnerIterator it(dm.d, i); it; ++it) it.valueRef() /= row_sum;
  }
  return dm;
}

SpMat diffusion_submatrix(const TrajectoryDataset& ds, Scalar sigma,
                          const std::vector<Index>& rows, const std::vector<Index>& cols) {
  KernelAssembler assembler(ds, sigma);
  const Index n = assembler.n();

  // pass 1: density normalizers; K_j is the row sum of row j, and each
  // row sum lands in its own slot, so rows parallelize directly
  Vec col_norm = Vec::Zero(n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    RowNeighbors nb;
    assembler.row(static_cast<Index>(i), nb);
    Scalar sum = 0;
    for (Scalar d : nb.dist) sum += assembler.weight(d);
    col_norm[static_cast<Index>(i)] = sum;
  });  // rows < N carry their unit self-pair, no underflow possible

  std::vector<Index> col_slot(static_cast<std::size_t>(n), -1);
  for (std::size_t c = 0; c < cols.size(); ++c) col_slot[static_cast<std::size_t>(cols[c])] =
      static_cast<Index>(c);

  // pass 2: emit requested rows with global row normalization
  struct RowOut {
    std::vector<Index> cols;
    std::vector<Scalar> vals;
  };
  std::vector<RowOut> out_rows(rows.size());
  parallel_for(rows.size(), [&](std::size_t r) {
    RowNeighbors nb;
    assembler.row(rows[r], nb);
    std::vector<Scalar> vals;
    assembler.weights(rows[r], nb, vals);
    Scalar row_sum = 0;
    for (std::size_t k = 0; k < nb.cols.size(); ++k) {
      Scalar v = vals[k] / col_norm[nb.cols[k]];
      row_sum += v;
      Index slot = col_slot[static_cast<std::size_t>(nb.cols[k])];
      if (slot >= 0) {
        out_rows[r].cols.push_back(slot);
        out_rows[r].vals.push_back(v);
      }
    }
    if (row_sum <= 0) throw NumericalError("diffusion_submatrix: isolated point");
    for (Scalar& v : out_rows[r].vals) v /= row_sum;
  });

  SpMat sub(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  Eigen::VectorXi counts(static_cast<Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    counts[static_cast<Index>(r)] = static_cast<int>(out_rows[r].cols.size());
  sub.reserve(counts);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t k = 0; k < out_rows[r].cols.size(); ++k)
      sub.insert(static_cast<Index>(r), out_rows[r].cols[k]) = out_rows[r].vals[k];
  sub.makeCompressed();
  return sub;
}

namespace {

DiagnosticCurve curve_from_sums(const Vec& sigma_grid, const Vec& sums, Scalar normalizer) {
  if (sigma_grid.size() < 3)
    throw ConfigError("kernel_sum_curve: need at least 3 grid points");
  for (Index g = 1; g < sigma_grid.size(); ++g)
    if (!(sigma_grid[g] > sigma_grid[g - 1]) || !(sigma_grid[g - 1] > 0))
      throw ConfigError("kernel_sum_curve: sigma grid must be positive and increasing");

  DiagnosticCurve curve;
  curve.sigma_grid = sigma_grid;
  curve.norm_sums = sums / normalizer;
  curve.log_sums = curve.norm_sums.array().log();
  const Index g = sigma_grid.size();
  curve.slopes.resize(g);
  Vec log_sigma = sigma_grid.array().log();
  for (Index k = 0; k < g; ++k) {
    Index lo = std::max<Index>(0, k - 1);
    Index hi = std::min<Index>(g - 1, k + 1);
    curve.slopes[k] = (curve.log_sums[hi] - curve.log_sums[lo]) /
                      (log_sigma[hi] - log_sigma[lo]);
  }
  Index best = 1;
  for (Index k = 1; k + 1 < g; ++k)
    if (curve.slopes[k] > curve.slopes[best]) best = k;
  curve.sigma_star = sigma_grid[best];
  curve.d_est = curve.slopes[best];
  return curve;
}

}  // namespace

std::pair<Scalar, Scalar> DiagnosticCurve::plateau(Scalar frac) const {
  Index best = 0;
  for (Index k = 0; k < sigma_grid.size(); ++k)
    if (sigma_grid[k] == sigma_star) best = k;
  Index lo = best, hi = best;
  while (lo > 0 && slopes[lo - 1] >= frac * d_est) --lo;
  while (hi + 1 < sigma_grid.size() && slopes[hi + 1] >= frac * d_est) ++hi;
  return {sigma_grid[lo], sigma_grid[hi]};
}

DiagnosticCurve kernel_sum_curve(const TrajectoryDataset& ds, const Vec& sigma_grid) {
  const Index n = ds.n_states();
  KdTree tree(ds.points.topRows(n));
  Vec sums(sigma_grid.size());
  for (Index g = 0; g < sigma_grid.size(); ++g) {
    Scalar sigma = sigma_grid[g];
    Scalar radius = cutoff_for(sigma, ds.dt);
    Scalar inv = 1.0 / (2 * sigma * sigma * ds.dt);
    std::vector<Scalar> partial(static_cast<std::size_t>(ds.points.rows()), 0.0);
    parallel_for(static_cast<std::size_t>(ds.points.rows()), [&](std::size_t i) {
      std::vector<Index> hits;
      Vec q = ds.points.row(static_cast<Index>(i)).transpose();
      tree.radius_search(q, radius, hits);
      Scalar sum = 0;
      for (Index j : hits)
        sum += std::exp(-(ds.points.row(j) - ds.points.row(static_cast<Index>(i)))
                             .squaredNorm() * inv);
      partial[i] = sum;
    });
    Scalar total = 0;
    for (Scalar s : partial) total += s;
    sums[g] = total;
  }
  return curve_from_sums(sigma_grid, sums, static_cast<Scalar>(n) * (n + 1));
}

DiagnosticCurve kernel_sum_curve(const Mat& points, Scalar dt, const Vec& sigma_grid) {
  const Index n = points.rows();
  if (n < 2) throw ConfigError("kernel_sum_curve: need at least 2 points");
  KdTree tree(points);
  Vec sums(sigma_grid.size());
  for (Index g = 0; g < sigma_grid.size(); ++g) {
    Scalar sigma = sigma_grid[g];
    Scalar radius = cutoff_for(sigma, dt);
    Scalar inv = 1.0 / (2 * sigma * sigma * dt);
    std::vector<Scalar> partial(static_cast<std::size_t>(n), 0.0);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
      std::vector<Index> hits;
      Vec q = points.row(static_cast<Index>(i)).transpose();
      tree.radius_search(q, radius, hits);
      Scalar sum = 0;
      for (Index j : hits)
        sum += std::exp(-(points.row(j) - points.row(static_cast<Index>(i))).squaredNorm() *
                        inv);
      partial[i] = sum;
    });
    Scalar total = 0;
    for (Scalar s : partial) total += s;
    sums[g] = total;
  }
  return curve_from_sums(sigma_grid, sums, static_cast<Scalar>(n) * static_cast<Scalar>(n));
}

}  // namespace inertia
