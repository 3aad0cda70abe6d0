#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "inertia/montecarlo.hpp"
#include "inertia/regimes.hpp"

#include <cmath>

using namespace inertia;

namespace {

bool inside_unit_ball(const Vec& x) { return x.norm() < 1.0; }

}  // namespace

TEST_CASE("deterministic 1d escape crosses at ln 2") {
  SystemSpec spec = SystemSpec::toy1d();
  Vec x0 = Vec::Constant(1, 0.5);
  const Scalar dt = 1e-3;
  MCEstimate est = mc_escape_time(spec, x0, inside_unit_ball, 0.0, dt, dt, 4, 1);
  CHECK(est.stderr_ == 0.0);  // zero variance for deterministic dynamics
  CHECK(std::abs(est.mean - std::log(2.0)) <= dt + 1e-12);
  CHECK(est.censored == 0);
}

TEST_CASE("escape estimate matches the analytic value within 3 stderr") {
  SystemSpec spec = SystemSpec::toy1d();
  Vec x0 = Vec::Constant(1, 0.3);
  const Scalar sigma = 0.2, dt = 2e-3;
  MCEstimate est = mc_escape_time(spec, x0, inside_unit_ball, sigma, dt, dt, 4000, 7);
  // reference value from the closed-form escape-time integral
  // (dependence is smooth; dt bias at 2e-3 is far below 3 stderr here)
  const Scalar ref = 1.34977161;  // analytic_escape_time(0.3, 0.2), precomputed
  CHECK(std::abs(est.mean - ref) < 3 * est.stderr_ + dt);
}

TEST_CASE("stderr shrinks like one over sqrt n") {
  SystemSpec spec = SystemSpec::toy1d();
  Vec x0 = Vec::Constant(1, 0.3);
  MCEstimate small = mc_escape_time(spec, x0, inside_unit_ball, 0.15, 5e-3, 5e-3, 500, 3);
  MCEstimate big = mc_escape_time(spec, x0, inside_unit_ball, 0.15, 5e-3, 5e-3, 2000, 3);
  Scalar ratio = small.stderr_ / big.stderr_;
  CHECK(ratio > 1.5);  // ideal is 2
  CHECK(ratio < 2.7);
}

TEST_CASE("fixed seed reproduces the estimate exactly") {
  SystemSpec spec = SystemSpec::toy3d();
  Vec x0 = Vec::Constant(3, 0.1);
  MCEstimate a = mc_escape_time(spec, x0, inside_unit_ball, 0.05, 0.1, 0.1, 64, 99);
  MCEstimate b = mc_escape_time(spec, x0, inside_unit_ball, 0.05, 0.1, 0.1, 64, 99);
  CHECK(a.mean == b.mean);
  CHECK(a.stderr_ == b.stderr_);
}

TEST_CASE("step cap censors and reports") {
  SystemSpec spec = SystemSpec::toy1d();
  Vec x0 = Vec::Constant(1, 1e-8);
  // cap far below the deterministic escape time: everything censors
  CHECK_THROWS_AS(
      mc_escape_time(spec, x0, inside_unit_ball, 0.0, 1e-3, 1e-3, 4, 11, 100),
      NumericalError);
  // mixed case: noisy realizations escape, cap keeps the count visible
  MCEstimate est = mc_escape_time(spec, x0, inside_unit_ball, 0.3, 1e-2, 1e-2, 200, 11, 120);
  CHECK(est.censored + est.n_samples == 200);
  CHECK(est.n_samples > 0);
}

TEST_CASE("regime lifetimes reduce to the deterministic generator at sigma zero") {
  SystemSpec spec = SystemSpec::toy1d();
  Vec x0 = Vec::Constant(1, 1e-4);
  const Scalar dt = 5e-2;
  const Index n_steps = 20000;
  LifetimeEstimate mc = mc_regime_lifetimes(
      spec, x0, 0.0, dt, dt, n_steps,
      [](const Vec& x) { return std::abs(x[0]) < 1.0; }, 4242);

  // same computation straight from the base trajectory generator
  TrajectoryDataset ds = sample_trajectory(spec, x0, n_steps, dt, dt, 0.0, 4242);
  std::vector<char> member(static_cast<std::size_t>(ds.points.rows()));
  for (Index i = 0; i < ds.points.rows(); ++i)
    member[static_cast<std::size_t>(i)] = std::abs(ds.points(i, 0)) < 1.0;
  DeterministicLifetimes direct = deterministic_lifetimes(member, dt);

  CHECK(mc.estimate.mean == direct.mean);
  CHECK(mc.estimate.n_samples == static_cast<Index>(direct.lifetimes.size()));
  CHECK_FALSE(mc.low_samples);
}

TEST_CASE("few visits raise the low-sample flag") {
  SystemSpec spec = SystemSpec::toy1d();
  Vec x0 = Vec::Constant(1, 0.5);
  LifetimeEstimate est = mc_regime_lifetimes(
      spec, x0, 0.0, 5e-2, 5e-2, 200, [](const Vec& x) { return std::abs(x[0]) < 1.0; },
      5);
  CHECK(est.low_samples);
}
