#pragma once

#include "inertia/chain.hpp"
#include "inertia/dynamics.hpp"
#include "inertia/kdtree.hpp"
#include "inertia/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace inertia {

struct RegimePartition {
  std::vector<int> labels;       // cluster id per state, size N
  std::vector<Index> regime;     // sorted indices of the blocking cluster
  std::vector<char> membership;  // size N, true inside the blocking cluster
  int k_clusters = 0;
  int embedding_dim = 0;
  Scalar source_sigma = 0;
};

// Entrance/escape bookkeeping of a membership sequence. The leading
// in-regime prefix (if any) is dropped; a trailing open visit is not
// counted.
struct DeterministicLifetimes {
  std::vector<Scalar> lifetimes;
  Scalar mean = 0;
};
DeterministicLifetimes deterministic_lifetimes(const std::vector<char>& membership,
                                               Scalar dt);

// Dominant left eigenvectors of the implied chain as embedding
// coordinates, via orthogonal subspace iteration on P^T with
// Rayleigh-Ritz extraction. Real parts, unit norm. A warning string is
// appended when a Ritz value has a relative imaginary part above 1e-6.
Mat spectral_embed(const DiffusionChain& chain, int n_vecs, std::uint64_t seed,
                   std::vector<std::string>* warnings = nullptr, Scalar tol = 1e-10,
                   Index max_iters = 100000);

// Seeded k-means (k-means++ init, Lloyd iterations, best of n restarts).
// The cluster whose states lie closest on average to blocking_anchor is
// designated the regime.
RegimePartition kmeans_partition(const Mat& embedding, int k_clusters, std::uint64_t seed,
                                 const Vec& blocking_anchor, const Mat& states,
                                 int n_restarts = 10, Scalar source_sigma = 0);

// Majority vote of the k nearest dataset points; ties count as inside.
bool classify_point_nn(const Eigen::Ref<const Vec>& query, const KdTree& dataset_tree,
                       const std::vector<char>& membership, int k = 10);

// True iff no regime point lies within distance r of the query.
bool escaped_by_distance(const Eigen::Ref<const Vec>& query, const KdTree& regime_tree,
                         Scalar r = 1e-1);

// Newton iteration with central-difference Jacobian.
Vec newton_fixed_point(const std::function<Vec(const Vec&)>& field, const Vec& x_init,
                       Scalar tol = 1e-12, int max_iters = 100);
Vec6 newton_fixed_point(const CdVParams& params, const Vec6& x_init);

// All distinct equilibria reachable by Newton from the given starts.
std::vector<Vec6> cdv_equilibria(const CdVParams& params, const std::vector<Vec6>& starts);

}  // namespace inertia
