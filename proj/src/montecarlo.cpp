#include "inertia/montecarlo.hpp"

#include "inertia/parallel.hpp"
#include "inertia/regimes.hpp"

#include <cmath>

namespace inertia {

namespace {

// One sampling step of either system family, sharing the exact code path
// with sample_trajectory so sigma = 0 Monte Carlo runs reproduce the base
// trajectory generator bit for bit.
Vec advance_sample(const SystemSpec& spec, const Vec& state, Scalar sigma, Scalar dt,
                   Scalar dt_star, Index substeps, RngStream& rng) {
  if (spec.kind == SystemKind::CdV) {
    Vec6 z = state;
    for (Index s = 0; s < substeps; ++s) z = cdv_step(z, spec.cdv, sigma, dt_star, rng);
    return z;
  }
  return ou_step(state, sigma, dt, spec, rng);
}

Index substeps_for(const SystemSpec& spec, Scalar dt, Scalar dt_star) {
  if (spec.kind != SystemKind::CdV) {
    if (dt_star != dt)
      throw ConfigError("toy systems use dt_star == dt (exact stepper)");
    return 1;
  }
  Scalar ratio = dt / dt_star;
  Index substeps = static_cast<Index>(std::llround(ratio));
  if (substeps < 1 || std::abs(ratio - static_cast<Scalar>(substeps)) > 1e-9 * ratio)
    throw ConfigError("dt must be an integer multiple of dt_star");
  return substeps;
}

}  // namespace

MCEstimate mc_escape_time(const SystemSpec& spec, const Vec& x0,
                          const std::function<bool(const Vec&)>& inside, Scalar sigma,
                          Scalar dt, Scalar dt_star, Index n_realizations,
                          std::uint64_t seed, Index step_cap) {
  spec.validate();
  if (n_realizations < 1) throw ConfigError("mc_escape_time: need n_realizations >= 1");
  if (!inside(x0)) throw ConfigError("mc_escape_time: x0 is not inside the regime");
  Index substeps = substeps_for(spec, dt, dt_star);

  std::vector<Scalar> times(static_cast<std::size_t>(n_realizations), -1.0);
  parallel_for(static_cast<std::size_t>(n_realizations), [&](std::size_t r) {
    RngStream rng = RngStream::substream(seed, r);
    Vec state = x0;
    for (Index step = 1; step <= step_cap; ++step) {
      state = advance_sample(spec, state, sigma, dt, dt_star, substeps, rng);
      if (!inside(state)) {
        times[r] = dt * static_cast<Scalar>(step);
        return;
      }
    }
    // cap hit: leave the slot negative (censored)
  });

  MCEstimate est;
  est.sigma = sigma;
  est.dt = dt;
  Scalar sum = 0;
  Index n = 0;
  for (Scalar t : times) {
    if (t < 0) {
      ++est.censored;
      continue;
    }
    sum += t;
    ++n;
  }
  if (n == 0) throw NumericalError("mc_escape_time: every realization was censored");
  est.n_samples = n;
  est.mean = sum / static_cast<Scalar>(n);
  Scalar ss = 0;
  for (Scalar t : times)
    if (t >= 0) ss += (t - est.mean) * (t - est.mean);
  est.stderr_ = n > 1 ? std::sqrt(ss / static_cast<Scalar>(n - 1) / static_cast<Scalar>(n))
                      : 0.0;
  return est;
}

LifetimeEstimate mc_regime_lifetimes(const SystemSpec& spec, const Vec& x0, Scalar sigma,
                                     Scalar dt, Scalar dt_star, Index n_steps,
                                     const std::function<bool(const Vec&)>& membership,
                                     std::uint64_t seed) {
  spec.validate();
  Index substeps = substeps_for(spec, dt, dt_star);
  RngStream rng = RngStream::substream(seed, 0);

  std::vector<char> member(static_cast<std::size_t>(n_steps) + 1);
  Vec state = x0;
  member[0] = membership(state) ? 1 : 0;
  for (Index n = 1; n <= n_steps; ++n) {
    state = advance_sample(spec, state, sigma, dt, dt_star, substeps, rng);
    member[static_cast<std::size_t>(n)] = membership(state) ? 1 : 0;
  }

  DeterministicLifetimes lifetimes = deterministic_lifetimes(member, dt);
  LifetimeEstimate out;
  out.estimate.sigma = sigma;
  out.estimate.dt = dt;
  out.estimate.n_samples = static_cast<Index>(lifetimes.lifetimes.size());
  out.estimate.mean = lifetimes.mean;
  Scalar ss = 0;
  for (Scalar v : lifetimes.lifetimes) ss += (v - lifetimes.mean) * (v - lifetimes.mean);
  Index n = out.estimate.n_samples;
  out.estimate.stderr_ =
      n > 1 ? std::sqrt(ss / static_cast<Scalar>(n - 1) / static_cast<Scalar>(n)) : 0.0;
  out.low_samples = n < 10;
  return out;
}

}  // namespace inertia
