#pragma once

#include "inertia/dynamics.hpp"
#include "inertia/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace inertia {

// Line-oriented "key = value" configuration. '#' starts a comment.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;
  static KeyValueConfig from_file(const std::string& path);
  static KeyValueConfig from_string(const std::string& text);

  bool has(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback) const;
  Scalar get_real(const std::string& key, Scalar fallback) const;
  Index get_int(const std::string& key, Index fallback) const;
  std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const;
  std::vector<Scalar> get_reals(const std::string& key) const;  // comma separated

  void set(const std::string& key, const std::string& value);
  std::string serialize() const;  // stable key order
  std::uint64_t hash() const;     // FNV-1a over serialize()

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// Fully resolved run settings shared by the CLI commands.
struct RunConfig {
  SystemSpec spec;
  Vec x0;
  Index n_steps = 20000;
  Scalar dt = 5e-2;
  Scalar dt_star = 5e-2;
  Scalar base_sigma = 0;
  std::uint64_t seed = 1;
  Index burn_in = 0;  // sampling steps discarded before recording

  Scalar sigma_min = 1e-2;
  Scalar sigma_max = 1e-1;
  int sigma_per_decade = 20;

  std::string trajectory_path;
  std::string regime_source = "auto";  // auto | ball | path to a partition csv
  Scalar cluster_sigma = 1e-2;
  int n_eigenvectors = 4;
  int k_clusters = 2;
  int kmeans_restarts = 10;
  std::string entry_mode = "uniform-entries";  // or "stationary"

  Index mc_steps = 1000000;
  Index mc_realizations = 100;
  Index step_cap = 10000000;

  std::string out_dir = ".";

  static RunConfig from_config(const KeyValueConfig& kv);
  KeyValueConfig to_config() const;  // resolved snapshot, reloadable
};

Vec geometric_grid(Scalar lo, Scalar hi, int per_decade);

}  // namespace inertia
