#pragma once

#include <cstdint>
#include <random>

namespace inertia {

// SplitMix64 step; used to whiten seeds and derive independent substreams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Seeded random stream. Substreams derived from a master seed are
// statistically independent, so Monte Carlo realizations can run in
// parallel and still be individually reproducible.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) {
    std::uint64_t s = seed;
    gen_.seed(splitmix64(s));
  }

  static RngStream substream(std::uint64_t master_seed, std::uint64_t index) {
    std::uint64_t s = master_seed;
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = a ^ (index + 0x9e3779b97f4a7c15ull);
    return RngStream(splitmix64(b));
  }

  double normal() { return normal_(gen_); }
  double uniform() { return uniform_(gen_); }

  std::uint64_t uniform_index(std::uint64_t n) {
    std::uniform_int_distribution<std::uint64_t> d(0, n - 1);
    return d(gen_);
  }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace inertia
