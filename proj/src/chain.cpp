#include "inertia/chain.hpp"

#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace inertia {

Vec DiffusionChain::apply(const Vec& x) const {
  Vec full = d.d * x;          // length N+1
  return full.segment(1, n());  // row i of P is row i+1 of D
}

Vec DiffusionChain::apply_transpose(const Vec& w) const {
  Vec out = Vec::Zero(n());
  for (Index i = 0; i < n(); ++i) {
    Scalar wi = w[i];
    if (wi == 0) continue;
    for (SpMat::InnerIterator it(d.d, i + 1); it; ++it) out[it.col()] += wi * it.value();
  }
  return out;
}

SpMat DiffusionChain::implied_p() const {
  return d.d.bottomRows(n());
}

namespace {

SpMat restrict_to_regime(const DiffusionChain& chain, const std::vector<Index>& regime) {
  const Index m = static_cast<Index>(regime.size());
  std::vector<Index> slot(static_cast<std::size_t>(chain.n()), -1);
  for (Index a = 0; a < m; ++a) slot[static_cast<std::size_t>(regime[a])] = a;

  SpMat q(m, m);
  Eigen::VectorXi counts(m);
  for (Index a = 0; a < m; ++a) {
    int c = 0;
    for (SpMat::InnerIterator it(chain.d.d, regime[a] + 1); it; ++it)
      if (slot[static_cast<std::size_t>(it.col())] >= 0) ++c;
    counts[a] = c;
  }
  q.reserve(counts);
  for (Index a = 0; a < m; ++a)
    for (SpMat::InnerIterator it(chain.d.d, regime[a] + 1); it; ++it) {
      Index b = slot[static_cast<std::size_t>(it.col())];
      if (b >= 0) q.insert(a, b) = it.value();
    }
  q.makeCompressed();
  return q;
}

Scalar residual_inf(const SpMat& a_minus, const Vec& x) {
  // ||(I - Q) x - 1||_inf with a_minus = Q
  Vec r = x - a_minus * x;
  r.array() -= 1.0;
  return r.cwiseAbs().maxCoeff();
}

Vec solve_dense(const SpMat& q) {
  Mat a = Mat::Identity(q.rows(), q.cols()) - Mat(q);
  Eigen::PartialPivLU<Mat> lu(a);
  return lu.solve(Vec::Ones(q.rows()));
}

Vec solve_sparse_lu(const SpMat& q, bool& ok) {
  SpMat a(q.rows(), q.cols());
  a.setIdentity();
  a = (a - q).pruned();
  a.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<Scalar>> lu;
  Eigen::SparseMatrix<Scalar> a_cm(a);
  lu.compute(a_cm);
  if (lu.info() != Eigen::Success) {
    ok = false;
    return Vec();
  }
  Vec x = lu.solve(Vec::Ones(q.rows()));
  ok = lu.info() == Eigen::Success;
  return x;
}

Vec solve_gmres(const SpMat& q, const EscapeSolveOptions& opt, bool& ok) {
  Eigen::SparseMatrix<Scalar> a(q.rows(), q.cols());
  a.setIdentity();
  a = (a - Eigen::SparseMatrix<Scalar>(q)).pruned();
  a.makeCompressed();
  Eigen::GMRES<Eigen::SparseMatrix<Scalar>, Eigen::IncompleteLUT<Scalar>> gmres;
  gmres.set_restart(opt.gmres_restart);
  gmres.setMaxIterations(opt.gmres_max_iters);
  gmres.setTolerance(opt.gmres_tol);
  gmres.compute(a);
  if (gmres.info() != Eigen::Success) {
    ok = false;
    return Vec();
  }
  Vec x = gmres.solve(Vec::Ones(q.rows()));
  ok = gmres.info() == Eigen::Success;
  return x;
}

}  // namespace

Vec escape_times_from_q(const SpMat& q, Scalar dt, const EscapeSolveOptions& opt) {
  const Index m = q.rows();
  if (m == 0) throw ConfigError("escape_times: empty regime");

  auto finish = [&](Vec x) {
    Scalar res = residual_inf(q, x);
    if (!(res < opt.residual_tol)) {
      std::ostringstream msg;
      msg << "escape_times: solution residual " << res
          << " exceeds tolerance; (I - Q) appears singular "
             "(the regime contains an invariant subset)";
      throw NumericalError(msg.str());
    }
    return Vec(dt * x);
  };

  switch (opt.method) {
    case SolveMethod::Dense:
      return finish(solve_dense(q));
    case SolveMethod::SparseLU: {
      bool ok = true;
      Vec x = solve_sparse_lu(q, ok);
      if (!ok) throw NumericalError("escape_times: sparse LU factorization failed");
      return finish(std::move(x));
    }
    case SolveMethod::Gmres: {
      bool ok = true;
      Vec x = solve_gmres(q, opt, ok);
      if (!ok) throw NumericalError("escape_times: GMRES did not converge");
      return finish(std::move(x));
    }
    case SolveMethod::Auto:
      break;
  }

  if (m <= opt.dense_threshold) return finish(solve_dense(q));

  bool ok = true;
  Vec x = solve_sparse_lu(q, ok);
  if (ok && residual_inf(q, x) < opt.residual_tol) return Vec(dt * x);

  ok = true;
  x = solve_gmres(q, opt, ok);
  if (ok && residual_inf(q, x) < opt.residual_tol) return Vec(dt * x);

  if (m <= opt.dense_fallback_max) return finish(solve_dense(q));
  throw NumericalError("escape_times: all solver paths failed");
}

Vec escape_times(const DiffusionChain& chain, const std::vector<Index>& regime,
                 const EscapeSolveOptions& opt) {
  if (regime.empty()) throw ConfigError("escape_times: empty regime");
  SpMat q = restrict_to_regime(chain, regime);
  return escape_times_from_q(q, chain.dt(), opt);
}

DeterministicEscape deterministic_escape_times(const std::vector<char>& membership,
                                               const std::vector<Index>& regime, Scalar dt) {
  DeterministicEscape out;
  out.theta0.resize(static_cast<Index>(regime.size()));
  out.censored.assign(regime.size(), 0);
  const Index len = static_cast<Index>(membership.size());
  for (std::size_t a = 0; a < regime.size(); ++a) {
    Index i = regime[a];
    Index k = 1;
    while (i + k < len && membership[static_cast<std::size_t>(i + k)]) ++k;
    if (i + k >= len) out.censored[a] = 1;  // ran off the end of the data
    out.theta0[static_cast<Index>(a)] = dt * static_cast<Scalar>(k);
  }
  return out;
}

Vec stationary_distribution(const DiffusionChain& chain, Scalar tol, Index max_iters) {
  const Index n = chain.n();
  Vec mu = Vec::Constant(n, 1.0 / static_cast<Scalar>(n));
  for (Index iter = 0; iter < max_iters; ++iter) {
    Vec pushed = chain.apply_transpose(mu);
    Scalar residual = (pushed - mu).cwiseAbs().sum();
    if (residual < tol) return mu / mu.sum();
    mu = 0.5 * (mu + pushed);      // lazy-chain step, same fixed vector
    mu /= mu.sum();
  }
  Vec pushed = chain.apply_transpose(mu);
  std::ostringstream msg;
  msg << "stationary_distribution: no convergence after " << max_iters
      << " iterations, residual " << (pushed - mu).cwiseAbs().sum();
  throw NumericalError(msg.str());
}

std::vector<Index> entry_points(const std::vector<Index>& regime,
                                const std::vector<char>& membership) {
  std::vector<Index> entries;
  for (Index i : regime)
    if (i >= 1 && !membership[static_cast<std::size_t>(i - 1)]) entries.push_back(i);
  return entries;
}

Vec entry_distribution(const DiffusionChain& chain, const std::optional<Vec>& mu,
                       const std::vector<Index>& regime, const std::vector<char>& membership,
                       EntryMode mode) {
  const Index n = chain.n();
  if (static_cast<Index>(regime.size()) >= n)
    throw ConfigError("entry_distribution: regime complement is empty");

  Vec nu = Vec::Zero(static_cast<Index>(regime.size()));
  if (mode == EntryMode::UniformEntries) {
    auto entries = entry_points(regime, membership);
    if (entries.empty())
      throw NumericalError("entry_distribution: trajectory never enters the regime");
    std::vector<char> is_entry(membership.size(), 0);
    for (Index e : entries) is_entry[static_cast<std::size_t>(e)] = 1;
    for (std::size_t a = 0; a < regime.size(); ++a)
      if (is_entry[static_cast<std::size_t>(regime[a])])
        nu[static_cast<Index>(a)] = 1.0 / static_cast<Scalar>(entries.size());
    return nu;
  }

  if (!mu) throw ConfigError("entry_distribution: stationary mode needs mu");
  Vec outside = *mu;
  for (Index i : regime) outside[i] = 0;  // keep only mass outside the regime
  Vec pushed = chain.apply_transpose(outside);
  Scalar total = 0;
  for (std::size_t a = 0; a < regime.size(); ++a) {
    nu[static_cast<Index>(a)] = pushed[regime[a]];
    total += pushed[regime[a]];
  }
  if (!(total > 0))
    throw NumericalError("entry_distribution: regime unreachable in one step");
  return nu / total;
}

Scalar expected_lifetime(const Vec& nu, const Vec& theta) {
  if (nu.size() != theta.size())
    throw ConfigError("expected_lifetime: nu and theta sizes differ");
  return nu.dot(theta);
}

namespace {

// Iterative Tarjan SCC over the implied chain's sparsity pattern.
struct SccResult {
  std::vector<int> component;  // per node
  int count = 0;
};

SccResult strongly_connected_components(const SpMat& d, Index n) {
  SccResult result;
  result.component.assign(static_cast<std::size_t>(n), -1);
  std::vector<Index> low(static_cast<std::size_t>(n), 0), num(static_cast<std::size_t>(n), -1);
  std::vector<char> on_stack(static_cast<std::size_t>(n), 0);
  std::vector<Index> stack;
  Index counter = 0;

  struct Frame {
    Index v;
    SpMat::InnerIterator it;
  };

  for (Index root = 0; root < n; ++root) {
    if (num[static_cast<std::size_t>(root)] != -1) continue;
    std::vector<Frame> frames;
    frames.push_back({root, SpMat::InnerIterator(d, root + 1)});
    num[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = counter++;
    stack.push_back(root);
    on_stack[static_cast<std::size_t>(root)] = 1;
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.it) {
        Index w = f.it.col();
        ++f.it;
        if (num[static_cast<std::size_t>(w)] == -1) {
          num[static_cast<std::size_t>(w)] = low[static_cast<std::size_t>(w)] = counter++;
          stack.push_back(w);
          on_stack[static_cast<std::size_t>(w)] = 1;
          frames.push_back({w, SpMat::InnerIterator(d, w + 1)});
        } else if (on_stack[static_cast<std::size_t>(w)]) {
          low[static_cast<std::size_t>(f.v)] =
              std::min(low[static_cast<std::size_t>(f.v)], num[static_cast<std::size_t>(w)]);
        }
      } else {
        Index v = f.v;
        frames.pop_back();
        if (!frames.empty()) {
          Index parent = frames.back().v;
          low[static_cast<std::size_t>(parent)] =
              std::min(low[static_cast<std::size_t>(parent)], low[static_cast<std::size_t>(v)]);
        }
        if (low[static_cast<std::size_t>(v)] == num[static_cast<std::size_t>(v)]) {
          for (;;) {
            Index w = stack.back();
            stack.pop_back();
            on_stack[static_cast<std::size_t>(w)] = 0;
            result.component[static_cast<std::size_t>(w)] = result.count;
            if (w == v) break;
          }
          ++result.count;
        }
      }
    }
  }
  return result;
}

}  // namespace

void check_irreducible(const DiffusionChain& chain) {
  const Index n = chain.n();
  SccResult scc = strongly_connected_components(chain.d.d, n);
  if (scc.count == 1) return;

  // find the smallest closed component (no edges leaving it)
  std::vector<Index> size(static_cast<std::size_t>(scc.count), 0);
  std::vector<char> closed(static_cast<std::size_t>(scc.count), 1);
  for (Index v = 0; v < n; ++v) {
    int c = scc.component[static_cast<std::size_t>(v)];
    ++size[static_cast<std::size_t>(c)];
    for (SpMat::InnerIterator it(chain.d.d, v + 1); it; ++it)
      if (scc.component[static_cast<std::size_t>(it.col())] != c)
        closed[static_cast<std::size_t>(c)] = 0;
  }
  int best = -1;
  for (int c = 0; c < scc.count; ++c)
    if (closed[static_cast<std::size_t>(c)] &&
        (best < 0 || size[static_cast<std::size_t>(c)] < size[static_cast<std::size_t>(best)]))
      best = c;

  std::ostringstream msg;
  msg << "chain is reducible: " << scc.count << " strongly connected components";
  if (best >= 0) {
    msg << "; smallest trapped set has " << size[static_cast<std::size_t>(best)]
        << " states (e.g.";
    int listed = 0;
    for (Index v = 0; v < n && listed < 5; ++v)
      if (scc.component[static_cast<std::size_t>(v)] == best) {
        msg << ' ' << v;
        ++listed;
      }
    msg << ")";
  }
  throw NumericalError(msg.str());
}

EscapeProfile inertia_profile(const TrajectoryDataset& ds, const std::vector<Index>& regime,
                              const std::vector<char>& membership, const Vec& sigma_grid,
                              const InertiaProfileOptions& options) {
  if (regime.empty()) throw ConfigError("inertia_profile: empty regime");
  EscapeProfile profile;
  profile.regime = regime;
  profile.sigma_grid = sigma_grid;
  const Index m = static_cast<Index>(regime.size());
  const Index g = sigma_grid.size();
  profile.theta.setConstant(m, g, std::numeric_limits<Scalar>::quiet_NaN());

  if (options.plateau) {
    auto [lo, hi] = *options.plateau;
    if (sigma_grid[0] < lo || sigma_grid[g - 1] > hi) {
      std::ostringstream warn;
      warn << "sigma grid [" << sigma_grid[0] << ", " << sigma_grid[g - 1]
           << "] extends outside the diagnostic plateau [" << lo << ", " << hi << "]";
      profile.plateau_warning = warn.str();
    }
  }

  DeterministicEscape det = deterministic_escape_times(membership, regime, ds.dt);
  profile.theta0 = det.theta0;
  profile.flagged.assign(regime.size(), 0);
  for (std::size_t a = 0; a < regime.size(); ++a)
    if (det.censored[a] || det.theta0[static_cast<Index>(a)] <= ds.dt)
      profile.flagged[a] = 1;

  // rows of D needed for Q: shifted regime rows
  std::vector<Index> rows(regime.size());
  for (std::size_t a = 0; a < regime.size(); ++a) rows[a] = regime[a] + 1;

  for (Index k = 0; k < g; ++k) {
    try {
      SpMat q = diffusion_submatrix(ds, sigma_grid[k], rows, regime);
      Vec theta = escape_times_from_q(q, ds.dt, options.solve);
      profile.theta.col(k) = theta;
    } catch (const std::exception& err) {
      std::ostringstream msg;
      msg << "sigma=" << sigma_grid[k] << ": " << err.what();
      profile.solve_errors.push_back(msg.str());
    }
  }

  profile.r_max.resize(m);
  profile.sigma_max.resize(m);
  for (Index a = 0; a < m; ++a) {
    Scalar best = -std::numeric_limits<Scalar>::infinity();
    Index best_k = -1;
    for (Index k = 0; k < g; ++k) {
      Scalar v = profile.theta(a, k);
      if (std::isfinite(v) && v > best) {
        best = v;
        best_k = k;
      }
    }
    if (best_k < 0) {
      profile.r_max[a] = std::numeric_limits<Scalar>::quiet_NaN();
      profile.sigma_max[a] = std::numeric_limits<Scalar>::quiet_NaN();
    } else {
      profile.r_max[a] = best / profile.theta0[a] - 1.0;
      profile.sigma_max[a] = sigma_grid[best_k];
    }
  }
  return profile;
}

}  // namespace inertia
