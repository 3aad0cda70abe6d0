#pragma once

#include "inertia/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <vector>

namespace inertia {

// Exact kd-tree over the rows of an n x dim point matrix. Bucket leaves,
// median split on the widest axis. Queries are exact: every point within
// the radius is returned, nothing approximate.
class KdTree {
 public:
  KdTree() = default;

  explicit KdTree(Mat points) : pts_(std::move(points)) {
    const Index n = pts_.rows();
    perm_.resize(static_cast<std::size_t>(n));
    std::iota(perm_.begin(), perm_.end(), Index{0});
    if (n > 0) {
      nodes_.reserve(static_cast<std::size_t>(2 * n / kLeafSize + 2));
      build(0, n);
    }
  }

  Index size() const { return pts_.rows(); }
  int dim() const { return static_cast<int>(pts_.cols()); }
  const Mat& points() const { return pts_; }

  // Indices of all points with ||p - q|| <= radius, order unspecified.
  void radius_search(const Eigen::Ref<const Vec>& q, Scalar radius,
                     std::vector<Index>& out) const {
    out.clear();
    if (pts_.rows() == 0) return;
    const Scalar r2 = radius * radius;
    // local stack: queries on a shared tree must stay concurrency-safe
    std::vector<int> stack;
    stack.reserve(64);
    stack.push_back(0);
    while (!stack.empty()) {
      int ni = stack.back();
      stack.pop_back();
      const Node& node = nodes_[static_cast<std::size_t>(ni)];
      if (node.leaf()) {
        for (Index k = node.begin; k < node.end; ++k) {
          Index p = perm_[static_cast<std::size_t>(k)];
          if ((pts_.row(p).transpose() - q).squaredNorm() <= r2) out.push_back(p);
        }
        continue;
      }
      Scalar delta = q[node.axis] - node.split;
      if (delta <= radius) stack.push_back(node.left);
      if (delta >= -radius) stack.push_back(node.right);
    }
  }

  // k nearest neighbors, ascending by distance. Returns fewer if the
  // tree holds fewer than k points.
  void knn(const Eigen::Ref<const Vec>& q, int k, std::vector<Index>& idx,
           std::vector<Scalar>& dist) const {
    idx.clear();
    dist.clear();
    if (pts_.rows() == 0 || k <= 0) return;
    using Entry = std::pair<Scalar, Index>;  // (squared distance, index)
    std::priority_queue<Entry> heap;         // max-heap on distance
    knn_node(0, q, static_cast<std::size_t>(k), heap);
    idx.resize(heap.size());
    dist.resize(heap.size());
    for (std::size_t i = heap.size(); i-- > 0;) {
      idx[i] = heap.top().second;
      dist[i] = std::sqrt(heap.top().first);
      heap.pop();
    }
  }

  Index nearest(const Eigen::Ref<const Vec>& q, Scalar* distance = nullptr) const {
    std::vector<Index> idx;
    std::vector<Scalar> dist;
    knn(q, 1, idx, dist);
    if (idx.empty()) return -1;
    if (distance) *distance = dist[0];
    return idx[0];
  }

 private:
  static constexpr Index kLeafSize = 16;

  struct Node {
    Scalar split = 0;
    int axis = -1;
    int left = -1, right = -1;
    Index begin = 0, end = 0;
    bool leaf() const { return axis < 0; }
  };

  int build(Index begin, Index end) {
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    if (end - begin <= kLeafSize) {
      nodes_[static_cast<std::size_t>(id)].begin = begin;
      nodes_[static_cast<std::size_t>(id)].end = end;
      return id;
    }
    // widest axis over this range
    int axis = 0;
    Scalar best_spread = -1;
    for (int d = 0; d < dim(); ++d) {
      Scalar lo = std::numeric_limits<Scalar>::max(), hi = -lo;
      for (Index k = begin; k < end; ++k) {
        Scalar v = pts_(perm_[static_cast<std::size_t>(k)], d);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi - lo > best_spread) {
        best_spread = hi - lo;
        axis = d;
      }
    }
    Index mid = begin + (end - begin) / 2;
    std::nth_element(perm_.begin() + begin, perm_.begin() + mid, perm_.begin() + end,
                     [&](Index a, Index b) { return pts_(a, axis) < pts_(b, axis); });
    Scalar split = pts_(perm_[static_cast<std::size_t>(mid)], axis);
    int left = build(begin, mid);
    int right = build(mid, end);
    Node& node = nodes_[static_cast<std::size_t>(id)];
    node.axis = axis;
    node.split = split;
    node.left = left;
    node.right = right;
    return id;
  }

  void knn_node(int ni, const Eigen::Ref<const Vec>& q, std::size_t k,
                std::priority_queue<std::pair<Scalar, Index>>& heap) const {
    const Node& node = nodes_[static_cast<std::size_t>(ni)];
    if (node.leaf()) {
      for (Index j = node.begin; j < node.end; ++j) {
        Index p = perm_[static_cast<std::size_t>(j)];
        Scalar d2 = (pts_.row(p).transpose() - q).squaredNorm();
        if (heap.size() < k) {
          heap.emplace(d2, p);
        } else if (d2 < heap.top().first) {
          heap.pop();
          heap.emplace(d2, p);
        }
      }
      return;
    }
    Scalar delta = q[node.axis] - node.split;
    int near = delta < 0 ? node.left : node.right;
    int far = delta < 0 ? node.right : node.left;
    knn_node(near, q, k, heap);
    if (heap.size() < k || delta * delta < heap.top().first) knn_node(far, q, k, heap);
  }

  Mat pts_;
  std::vector<Index> perm_;
  std::vector<Node> nodes_;
};

}  // namespace inertia
