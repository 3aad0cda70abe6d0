#pragma once

#include "inertia/dynamics.hpp"
#include "inertia/types.hpp"

#include <functional>

namespace inertia {

struct MCEstimate {
  Scalar mean = 0;
  Scalar stderr_ = 0;  // sample std / sqrt(n)
  Index n_samples = 0;
  Scalar sigma = 0;
  Scalar dt = 0;
  Index censored = 0;  // realizations that hit the step cap; excluded from
                       // the mean, which is then biased low
};

// Direct estimate of the expected escape time: each realization runs
// until inside(state) first fails at a sample time (multiples of dt).
MCEstimate mc_escape_time(const SystemSpec& spec, const Vec& x0,
                          const std::function<bool(const Vec&)>& inside, Scalar sigma,
                          Scalar dt, Scalar dt_star, Index n_realizations,
                          std::uint64_t seed, Index step_cap = 10000000);

// Regime lifetimes from one long trajectory: the membership sequence is
// evaluated on the dt sampling grid and completed visits are averaged.
// n_samples < 10 completed visits is reported via the low_samples flag.
struct LifetimeEstimate {
  MCEstimate estimate;
  bool low_samples = false;
};
LifetimeEstimate mc_regime_lifetimes(const SystemSpec& spec, const Vec& x0, Scalar sigma,
                                     Scalar dt, Scalar dt_star, Index n_steps,
                                     const std::function<bool(const Vec&)>& membership,
                                     std::uint64_t seed);

}  // namespace inertia
