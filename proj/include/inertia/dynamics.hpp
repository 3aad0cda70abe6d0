#pragma once

#include "inertia/rng.hpp"
#include "inertia/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace inertia {

enum class SystemKind { Toy1D, Toy3D, CdV };

std::string to_string(SystemKind kind);
SystemKind system_kind_from_string(const std::string& name);

// Coefficients of the six-mode barotropic channel model. The defaults
// come from the spectral truncation formulas (see standard()); every
// coefficient can be overridden through the config file.
struct CdVParams {
  Scalar C = 0;
  Scalar x1_star = 0;
  Scalar x4_star = 0;
  Scalar alpha1 = 0, alpha2 = 0;
  Scalar beta1 = 0, beta2 = 0;
  Scalar delta1 = 0, delta2 = 0;
  Scalar gamma1 = 0, gamma2 = 0;
  Scalar gamma_tilde1 = 0, gamma_tilde2 = 0;
  Scalar eps_int = 0;

  // Evaluate the spectral-truncation formulas for channel half-width b,
  // beta-plane strength beta, orographic coupling gamma, damping C and
  // zonal forcing (x1_star, x4_star). time_scale multiplies the whole
  // vector field: it changes the time unit, never the attractor geometry.
  static CdVParams from_geometry(Scalar b, Scalar beta, Scalar gamma, Scalar C,
                                 Scalar x1_star, Scalar x4_star, Scalar time_scale = 1.0);

  // Shipped default configuration: a chaotic regime-transitioning setup
  // with distinct blocking and zonal fixed points.
  static CdVParams standard();

  void validate() const;
};

struct SystemSpec {
  SystemKind kind = SystemKind::Toy1D;
  int dim = 1;
  Scalar reinsertion_scale = 5e-2;  // epsilon of the toy reinsertion law
  Scalar domain_radius = 2.0;
  Scalar regime_radius = 1.0;
  CdVParams cdv;

  static SystemSpec toy1d(Scalar epsilon = 5e-2);
  static SystemSpec toy3d(Scalar epsilon = 5e-3);
  static SystemSpec cdv_standard();

  void validate() const;
};

// Uniformly sampled trajectory X_1..X_{N+1} (rows 0..N), spacing dt.
struct TrajectoryDataset {
  Mat points;  // (N+1) x dim
  Scalar dt = 0;
  Scalar base_sigma = 0;
  std::uint64_t seed = 0;
  int dim = 0;
  std::vector<Index> reinsertion_indices;  // 0-based rows that are fresh reinsertions

  Index n_states() const { return points.rows() - 1; }  // N
};

// Toy reinsertion draw: c_i ~ N(0, epsilon) with epsilon read as the
// standard deviation. 1D returns sign * ||(c1,c2,c3)||, 3D returns the
// vector itself.
Vec draw_reinsertion(const SystemSpec& spec, Scalar sign, RngStream& rng);

// One sampling step of the toy systems. Exact Ornstein-Uhlenbeck update
// between reinsertions:
//   x' = e^{dt} x + sigma_dt xi,  sigma_dt = sigma sqrt((e^{2 dt}-1)/2),
// which matches the continuous-time variance at every dt. Points at or
// beyond the domain boundary are reinserted instead.
Vec ou_step(const Eigen::Ref<const Vec>& state, Scalar sigma, Scalar dt,
            const SystemSpec& spec, RngStream& rng);

// Right-hand side of the six-mode model.
Vec6 cdv_rhs(const Vec6& state, const CdVParams& p);

// Explicit midpoint (RK2) step plus Euler-Maruyama noise increment.
Vec6 cdv_step(const Vec6& state, const CdVParams& p, Scalar sigma, Scalar dt_star,
              RngStream& rng);

// Sample n_steps+1 points spaced dt apart. Toys use the exact stepper
// (dt_star must equal dt); CdV integrates with inner step dt_star, and
// dt must be an integer multiple of dt_star. Deterministic given seed.
TrajectoryDataset sample_trajectory(const SystemSpec& spec, const Vec& x0, Index n_steps,
                                    Scalar dt, Scalar dt_star, Scalar sigma,
                                    std::uint64_t seed);

// Drop the first k sampling steps (attractor burn-in); reinsertion
// bookkeeping is shifted accordingly.
TrajectoryDataset drop_prefix(const TrajectoryDataset& ds, Index k);

// Trajectory persistence: CSV with '#'-prefixed header lines carrying
// dt, dim, seed, sigma and reinsertion indices, then step,x1..x_dim rows.
void save_trajectory(const std::string& path, const TrajectoryDataset& ds);
TrajectoryDataset load_trajectory(const std::string& path);

}  // namespace inertia
