#pragma once

#include "inertia/kernel.hpp"
#include "inertia/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace inertia {

// Markov chain P = T D realized implicitly: T is the unit index shift,
// so row i of P is row i+1 of D and P is never materialized.
struct DiffusionChain {
  DiffusionMatrix d;

  Index n() const { return d.d.cols(); }
  Scalar dt() const { return d.dt; }
  Scalar sigma() const { return d.sigma; }

  // y = P x
  Vec apply(const Vec& x) const;
  // y = P^T w  (push a distribution one step forward)
  Vec apply_transpose(const Vec& w) const;
  // Materialized P, for small instances and tests.
  SpMat implied_p() const;
};

enum class SolveMethod { Auto, Dense, SparseLU, Gmres };

struct EscapeSolveOptions {
  SolveMethod method = SolveMethod::Auto;
  Index dense_threshold = 1500;    // below this, go straight to dense
  Index dense_fallback_max = 20000;
  Scalar residual_tol = 1e-8;      // on ||(I-Q) theta/dt - 1||_inf
  int gmres_restart = 100;
  int gmres_max_iters = 10000;
  Scalar gmres_tol = 1e-10;
};

// Expected escape times theta = dt (I - Q)^{-1} 1 over the regime index
// set, where Q is P restricted to regime x regime. Solver cascade:
// sparse LU first, then ILU-preconditioned GMRES, then a dense solve.
Vec escape_times(const DiffusionChain& chain, const std::vector<Index>& regime,
                 const EscapeSolveOptions& options = {});

// Same solve on an explicitly assembled Q (tests, small chains).
Vec escape_times_from_q(const SpMat& q, Scalar dt, const EscapeSolveOptions& options = {});

// Deterministic escape steps from the base trajectory: theta0_i = dt * k
// where k is the number of steps until the trajectory index leaves the
// regime. membership has one flag per point (length N or N+1); a run
// still inside the regime at the end of the data is censored.
struct DeterministicEscape {
  Vec theta0;                  // over regime indices
  std::vector<char> censored;  // run hit the end of the trajectory
};
DeterministicEscape deterministic_escape_times(const std::vector<char>& membership,
                                               const std::vector<Index>& regime, Scalar dt);

// Stationary distribution mu P = mu by damped power iteration (the lazy
// chain (P+I)/2 has the same fixed vector and cannot oscillate).
Vec stationary_distribution(const DiffusionChain& chain, Scalar tol = 1e-10,
                            Index max_iters = 1000000);

enum class EntryMode { Stationary, UniformEntries };

// Entry distribution nu over the regime. Stationary mode pushes the
// stationary mass outside the regime one step forward and restricts;
// uniform-entries mode weights the base trajectory's entry points equally.
Vec entry_distribution(const DiffusionChain& chain, const std::optional<Vec>& mu,
                       const std::vector<Index>& regime, const std::vector<char>& membership,
                       EntryMode mode);

// Indices i in the regime whose predecessor lies outside (trajectory entry points).
std::vector<Index> entry_points(const std::vector<Index>& regime,
                                const std::vector<char>& membership);

Scalar expected_lifetime(const Vec& nu, const Vec& theta);

// Verifies that the implied chain has a single strongly connected
// component; otherwise reports the smallest closed (trapped) set.
void check_irreducible(const DiffusionChain& chain);

struct LifetimeReport {
  Vec sigma_grid;
  Vec lifetimes;
  Vec stderrs;  // empty when the method is deterministic
  std::string method;
};

// Escape times across a sigma grid plus the derived per-point inertia
// summary: sigma_max(X_i), R(X_i) and the boundary flag for points one
// deterministic step from escape.
struct EscapeProfile {
  std::vector<Index> regime;
  Vec sigma_grid;
  Mat theta;        // |regime| x |grid|, NaN where a solve failed
  Vec theta0;
  Vec r_max;        // theta(i, argmax)/theta0_i - 1
  Vec sigma_max;
  std::vector<char> flagged;           // within one deterministic step of escape
  std::vector<std::string> solve_errors;  // one entry per failed grid point
  std::string plateau_warning;
};

struct InertiaProfileOptions {
  EscapeSolveOptions solve;
  // optional diagnostic plateau (lo, hi); a grid outside it only warns
  std::optional<std::pair<Scalar, Scalar>> plateau;
};

EscapeProfile inertia_profile(const TrajectoryDataset& ds, const std::vector<Index>& regime,
                              const std::vector<char>& membership, const Vec& sigma_grid,
                              const InertiaProfileOptions& options = {});

}  // namespace inertia
