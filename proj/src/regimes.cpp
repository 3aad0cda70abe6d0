#include "inertia/regimes.hpp"

#include "inertia/parallel.hpp"
#include "inertia/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace inertia {

DeterministicLifetimes deterministic_lifetimes(const std::vector<char>& membership,
                                               Scalar dt) {
  if (membership.size() < 2)
    throw ConfigError("deterministic_lifetimes: need at least 2 samples");
  std::size_t start = 0;
  while (start < membership.size() && membership[start]) ++start;  // drop open prefix

  DeterministicLifetimes out;
  Index run = 0;
  for (std::size_t i = start; i < membership.size(); ++i) {
    if (membership[i]) {
      ++run;
    } else if (run > 0) {
      out.lifetimes.push_back(dt * static_cast<Scalar>(run));
      run = 0;
    }
  }
  // a run still open at the end is not a completed visit
  if (out.lifetimes.empty())
    throw NumericalError("deterministic_lifetimes: no completed regime visit");
  Scalar sum = 0;
  for (Scalar v : out.lifetimes) sum += v;
  out.mean = sum / static_cast<Scalar>(out.lifetimes.size());
  return out;
}

Mat spectral_embed(const DiffusionChain& chain, int n_vecs, std::uint64_t seed,
                   std::vector<std::string>* warnings, Scalar tol, Index max_iters) {
  const Index n = chain.n();
  if (n_vecs < 1 || n_vecs >= n) throw ConfigError("spectral_embed: invalid n_vecs");
  const Index k = n_vecs;

  RngStream rng(seed ^ 0x5eed5eedull);
  Mat basis(n, k);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < k; ++j) basis(i, j) = rng.normal();

  auto orthonormalize = [&](Mat& m) {
    Eigen::HouseholderQR<Mat> qr(m);
    m = qr.householderQ() * Mat::Identity(n, k);
  };
  orthonormalize(basis);

  Mat ritz_small;
  Eigen::VectorXcd ritz_values;
  Scalar prev_change = std::numeric_limits<Scalar>::max();
  Eigen::VectorXcd prev_values = Eigen::VectorXcd::Zero(k);
  bool converged = false;
  for (Index iter = 0; iter < max_iters && !converged; ++iter) {
    Mat next(n, k);
    for (Index j = 0; j < k; ++j) next.col(j) = chain.apply_transpose(basis.col(j));
    orthonormalize(next);
    basis = next;

    if (iter % 10 == 9 || iter + 1 == max_iters) {
      Mat image(n, k);
      for (Index j = 0; j < k; ++j) image.col(j) = chain.apply_transpose(basis.col(j));
      Mat small = basis.transpose() * image;  // k x k Rayleigh quotient
      Eigen::EigenSolver<Mat> es(small);
      Eigen::VectorXcd values = es.eigenvalues();
      std::vector<Index> order(static_cast<std::size_t>(k));
      std::iota(order.begin(), order.end(), Index{0});
      std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        return std::abs(values[a]) > std::abs(values[b]);
      });
      Eigen::VectorXcd sorted(k);
      for (Index j = 0; j < k; ++j) sorted[j] = values[order[static_cast<std::size_t>(j)]];
      Scalar change = (sorted - prev_values).cwiseAbs().maxCoeff();
      prev_values = sorted;
      // also require the invariant-subspace residual to be small
      Scalar residual = (image - basis * small).norm() / std::max<Scalar>(1e-300, image.norm());
      if (change < tol && residual < std::sqrt(tol)) {
        Mat vectors = es.eigenvectors().real();
        ritz_small.resize(k, k);
        for (Index j = 0; j < k; ++j)
          ritz_small.col(j) = vectors.col(order[static_cast<std::size_t>(j)]);
        ritz_values = sorted;
        converged = true;
      }
      prev_change = change;
    }
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "spectral_embed: eigensolver did not converge (last change " << prev_change << ")";
    throw NumericalError(msg.str());
  }

  for (Index j = 0; j < k; ++j) {
    Scalar mod = std::abs(ritz_values[j]);
    if (mod > 0 && std::abs(ritz_values[j].imag()) > 1e-6 * mod && warnings) {
      std::ostringstream w;
      w << "eigenvalue " << j << " has imaginary part " << ritz_values[j].imag()
        << " (modulus " << mod << "); real parts used";
      warnings->push_back(w.str());
    }
  }

  Mat embedding = basis * ritz_small;
  for (Index j = 0; j < k; ++j) {
    Scalar norm = embedding.col(j).norm();
    if (norm > 0) embedding.col(j) /= norm;
  }
  return embedding;
}

namespace {

struct KmeansRun {
  std::vector<int> labels;
  Scalar inertia = std::numeric_limits<Scalar>::infinity();
  bool degenerate = true;
};

KmeansRun lloyd(const Mat& data, int k, RngStream rng, int max_iters = 200) {
  const Index n = data.rows();
  const Index d = data.cols();
  Mat centers(k, d);

  // k-means++ seeding
  centers.row(0) = data.row(static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n))));
  Vec dist2 = (data.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    Scalar total = dist2.sum();
    Index pick = 0;
    if (total > 0) {
      Scalar target = rng.uniform() * total;
      Scalar acc = 0;
      for (Index i = 0; i < n; ++i) {
        acc += dist2[i];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n)));
    }
    centers.row(c) = data.row(pick);
    dist2 = dist2.cwiseMin((data.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }

  KmeansRun run;
  run.labels.assign(static_cast<std::size_t>(n), -1);
  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      int best = 0;
      Scalar best_d = (data.row(i) - centers.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        Scalar dc = (data.row(i) - centers.row(c)).squaredNorm();
        if (dc < best_d) {
          best_d = dc;
          best = c;
        }
      }
      if (run.labels[static_cast<std::size_t>(i)] != best) {
        run.labels[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    Mat sums = Mat::Zero(k, d);
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      sums.row(run.labels[static_cast<std::size_t>(i)]) += data.row(i);
      ++counts[static_cast<std::size_t>(run.labels[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] == 0) {
        run.degenerate = true;
        return run;  // empty cluster: caller restarts
      }
      centers.row(c) = sums.row(c) / static_cast<Scalar>(counts[static_cast<std::size_t>(c)]);
    }
    if (!changed) break;
  }
  run.inertia = 0;
  for (Index i = 0; i < n; ++i)
    run.inertia += (data.row(i) - centers.row(run.labels[static_cast<std::size_t>(i)]))
                       .squaredNorm();
  run.degenerate = false;
  return run;
}

}  // namespace

RegimePartition kmeans_partition(const Mat& embedding, int k_clusters, std::uint64_t seed,
                                 const Vec& blocking_anchor, const Mat& states,
                                 int n_restarts, Scalar source_sigma) {
  if (k_clusters < 2) throw ConfigError("kmeans_partition: need at least 2 clusters");
  if (states.rows() != embedding.rows())
    throw ConfigError("kmeans_partition: states/embedding row mismatch");

  std::vector<KmeansRun> runs(static_cast<std::size_t>(n_restarts));
  parallel_for(static_cast<std::size_t>(n_restarts), [&](std::size_t r) {
    runs[r] = lloyd(embedding, k_clusters, RngStream::substream(seed, r));
  });

  const KmeansRun* best = nullptr;
  for (const auto& run : runs)
    if (!run.degenerate && (!best || run.inertia < best->inertia)) best = &run;
  if (!best) throw NumericalError("kmeans_partition: every restart degenerated");

  // blocking cluster: smallest mean state-space distance to the anchor
  std::vector<Scalar> dist_sum(static_cast<std::size_t>(k_clusters), 0);
  std::vector<Index> counts(static_cast<std::size_t>(k_clusters), 0);
  for (Index i = 0; i < states.rows(); ++i) {
    int c = best->labels[static_cast<std::size_t>(i)];
    dist_sum[static_cast<std::size_t>(c)] +=
        (states.row(i).transpose() - blocking_anchor).norm();
    ++counts[static_cast<std::size_t>(c)];
  }
  int blocking = 0;
  Scalar best_mean = std::numeric_limits<Scalar>::infinity();
  for (int c = 0; c < k_clusters; ++c) {
    Scalar mean = dist_sum[static_cast<std::size_t>(c)] /
                  static_cast<Scalar>(counts[static_cast<std::size_t>(c)]);
    if (mean < best_mean) {
      best_mean = mean;
      blocking = c;
    }
  }

  RegimePartition part;
  part.labels = best->labels;
  part.k_clusters = k_clusters;
  part.embedding_dim = static_cast<int>(embedding.cols());
  part.source_sigma = source_sigma;
  part.membership.assign(static_cast<std::size_t>(states.rows()), 0);
  for (Index i = 0; i < states.rows(); ++i)
    if (best->labels[static_cast<std::size_t>(i)] == blocking) {
      part.membership[static_cast<std::size_t>(i)] = 1;
      part.regime.push_back(i);
    }
  if (part.regime.empty() || static_cast<Index>(part.regime.size()) == states.rows())
    throw NumericalError("kmeans_partition: blocking cluster is empty or everything");
  return part;
}

bool classify_point_nn(const Eigen::Ref<const Vec>& query, const KdTree& dataset_tree,
                       const std::vector<char>& membership, int k) {
  std::vector<Index> idx;
  std::vector<Scalar> dist;
  dataset_tree.knn(query, k, idx, dist);
  int inside = 0;
  for (Index i : idx)
    if (membership[static_cast<std::size_t>(i)]) ++inside;
  return 2 * inside >= static_cast<int>(idx.size());  // "at least half"
}

bool escaped_by_distance(const Eigen::Ref<const Vec>& query, const KdTree& regime_tree,
                         Scalar r) {
  Scalar d = 0;
  regime_tree.nearest(query, &d);
  return d > r;
}

Vec newton_fixed_point(const std::function<Vec(const Vec&)>& field, const Vec& x_init,
                       Scalar tol, int max_iters) {
  Vec x = x_init;
  const Index n = x.size();
  for (int iter = 0; iter < max_iters; ++iter) {
    Vec f = field(x);
    if (f.cwiseAbs().maxCoeff() < tol) return x;
    Mat jac(n, n);
    for (Index j = 0; j < n; ++j) {
      Scalar h = 1e-6 * std::max<Scalar>(1.0, std::abs(x[j]));
      Vec xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      jac.col(j) = (field(xp) - field(xm)) / (2 * h);
    }
    Eigen::PartialPivLU<Mat> lu(jac);
    Vec step = lu.solve(f);
    if (!step.allFinite()) throw NumericalError("newton_fixed_point: singular Jacobian");
    x -= step;
    if (!x.allFinite()) throw NumericalError("newton_fixed_point: diverged");
  }
  throw NumericalError("newton_fixed_point: no convergence within iteration limit");
}

Vec6 newton_fixed_point(const CdVParams& params, const Vec6& x_init) {
  auto field = [&](const Vec& x) -> Vec { return cdv_rhs(Vec6(x), params); };
  return newton_fixed_point(field, Vec(x_init));
}

std::vector<Vec6> cdv_equilibria(const CdVParams& params, const std::vector<Vec6>& starts) {
  std::vector<Vec6> roots;
  for (const Vec6& s : starts) {
    try {
      Vec6 r = newton_fixed_point(params, s);
      bool fresh = true;
      for (const Vec6& q : roots)
        if ((q - r).norm() < 1e-6) {
          fresh = false;
          break;
        }
      if (fresh) roots.push_back(r);
    } catch (const NumericalError&) {
      // non-converging starts are expected; keep scanning
    }
  }
  std::sort(roots.begin(), roots.end(),
            [](const Vec6& a, const Vec6& b) { return a[0] < b[0]; });
  return roots;
}

}  // namespace inertia
