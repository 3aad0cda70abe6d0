#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "inertia/csv.hpp"
#include "inertia/kdtree.hpp"
#include "inertia/parallel.hpp"
#include "inertia/rng.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

using namespace inertia;

TEST_CASE("rng substreams are reproducible and distinct") {
  RngStream a = RngStream::substream(42, 0);
  RngStream a2 = RngStream::substream(42, 0);
  RngStream b = RngStream::substream(42, 1);
  double va = a.normal(), va2 = a2.normal(), vb = b.normal();
  CHECK(va == va2);
  CHECK(va != vb);
}

TEST_CASE("rng normal moments") {
  RngStream rng(7);
  const int n = 200000;
  double sum = 0, sumsq = 0;
  for (int i = 0; i < n; ++i) {
    double v = rng.normal();
    sum += v;
    sumsq += v * v;
  }
  double mean = sum / n;
  double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("parallel_for covers every index once") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int v) { return v == 1; }));
}

TEST_CASE("kdtree radius search matches brute force on random clouds") {
  RngStream rng(3);
  for (int dim : {1, 3, 6}) {
    Mat pts(300, dim);
    for (Index i = 0; i < pts.rows(); ++i)
      for (int d = 0; d < dim; ++d) pts(i, d) = rng.normal();
    KdTree tree(pts);
    for (int trial = 0; trial < 20; ++trial) {
      Vec q(dim);
      for (int d = 0; d < dim; ++d) q[d] = rng.normal();
      double radius = 0.3 + rng.uniform();
      std::vector<Index> found;
      tree.radius_search(q, radius, found);
      std::set<Index> expected;
      for (Index i = 0; i < pts.rows(); ++i)
        if ((pts.row(i).transpose() - q).norm() <= radius) expected.insert(i);
      CHECK(std::set<Index>(found.begin(), found.end()) == expected);
    }
  }
}

TEST_CASE("kdtree knn matches brute force") {
  RngStream rng(11);
  Mat pts(257, 3);
  for (Index i = 0; i < pts.rows(); ++i)
    for (int d = 0; d < 3; ++d) pts(i, d) = rng.normal();
  KdTree tree(pts);
  Vec q(3);
  q << 0.1, -0.2, 0.4;
  std::vector<Index> idx;
  std::vector<Scalar> dist;
  tree.knn(q, 10, idx, dist);
  REQUIRE(idx.size() == 10);
  std::vector<std::pair<Scalar, Index>> all;
  for (Index i = 0; i < pts.rows(); ++i)
    all.emplace_back((pts.row(i).transpose() - q).norm(), i);
  std::sort(all.begin(), all.end());
  for (int k = 0; k < 10; ++k) {
    CHECK(idx[static_cast<std::size_t>(k)] == all[static_cast<std::size_t>(k)].second);
    CHECK(dist[static_cast<std::size_t>(k)] ==
          doctest::Approx(all[static_cast<std::size_t>(k)].first));
  }
}

TEST_CASE("csv round trip") {
  const char* path = "unit_support_tmp.csv";
  {
    CsvWriter w(path, {"a", "b"});
    w.row({1.0, 0.1234567890123456789});
    w.row({-2.5, 3e-300});
  }
  CsvTable t = read_csv(path);
  REQUIRE(t.columns.size() == 2);
  CHECK(t.col("b") == 1);
  CHECK(t.values(0, 1) == 0.1234567890123456789);
  CHECK(t.values(1, 1) == 3e-300);
  std::remove(path);
}
