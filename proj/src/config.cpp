#include "inertia/config.hpp"

#include "inertia/csv.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace inertia {

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_string(buffer.str());
}

KeyValueConfig KeyValueConfig::from_string(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << "config line " << line_no << " is not 'key = value': " << line;
      throw ConfigError(msg.str());
    }
    cfg.values_[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return cfg;
}

bool KeyValueConfig::has(const std::string& key) const { return values_.count(key) > 0; }

std::string KeyValueConfig::get(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

Scalar KeyValueConfig::get_real(const std::string& key, Scalar fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' is not a number: " + it->second);
  }
}

Index KeyValueConfig::get_int(const std::string& key, Index fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    return static_cast<Index>(std::stoll(it->second));
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' is not an integer: " + it->second);
  }
}

std::uint64_t KeyValueConfig::get_seed(const std::string& key, std::uint64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    return std::stoull(it->second);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' is not a seed: " + it->second);
  }
}

std::vector<Scalar> KeyValueConfig::get_reals(const std::string& key) const {
  std::vector<Scalar> out;
  auto it = values_.find(key);
  if (it == values_.end()) return out;
  std::istringstream iss(it->second);
  std::string field;
  while (std::getline(iss, field, ',')) {
    field = trim(field);
    if (field.empty()) continue;
    try {
      out.push_back(std::stod(field));
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "' has a non-numeric entry: " + field);
    }
  }
  return out;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  values_[key] = value;
}

std::string KeyValueConfig::serialize() const {
  std::ostringstream out;
  for (const auto& [key, value] : values_) out << key << " = " << value << "\n";
  return out.str();
}

std::uint64_t KeyValueConfig::hash() const {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (char c : serialize()) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

Vec geometric_grid(Scalar lo, Scalar hi, int per_decade) {
  if (!(lo > 0) || !(hi > lo)) throw ConfigError("sigma grid needs 0 < min < max");
  if (per_decade < 1) throw ConfigError("sigma grid needs at least 1 point per decade");
  Scalar decades = std::log10(hi / lo);
  Index n = static_cast<Index>(std::ceil(decades * per_decade)) + 1;
  if (n < 2) n = 2;
  Vec grid(n);
  for (Index i = 0; i < n; ++i)
    grid[i] = lo * std::pow(10.0, decades * static_cast<Scalar>(i) / static_cast<Scalar>(n - 1));
  grid[n - 1] = hi;
  return grid;
}

RunConfig RunConfig::from_config(const KeyValueConfig& kv) {
  RunConfig rc;
  std::string system = kv.get("system", "toy1d");
  SystemKind kind = system_kind_from_string(system);
  switch (kind) {
    case SystemKind::Toy1D:
      rc.spec = SystemSpec::toy1d(kv.get_real("epsilon", 5e-2));
      rc.dt = kv.get_real("dt", 5e-2);
      rc.x0 = Vec::Constant(1, 1e-4);
      break;
    case SystemKind::Toy3D:
      rc.spec = SystemSpec::toy3d(kv.get_real("epsilon", 5e-3));
      rc.dt = kv.get_real("dt", 1e-1);
      rc.x0 = Vec::Constant(3, 5e-2);
      break;
    case SystemKind::CdV: {
      rc.spec.kind = SystemKind::CdV;
      rc.spec.dim = 6;
      if (kv.has("cdv_alpha1")) {
        CdVParams p;
        p.C = kv.get_real("cdv_C", 0.1);
        p.x1_star = kv.get_real("cdv_x1_star", 0.95);
        p.x4_star = kv.get_real("cdv_x4_star", -0.76095);
        p.alpha1 = kv.get_real("cdv_alpha1", 0);
        p.alpha2 = kv.get_real("cdv_alpha2", 0);
        p.beta1 = kv.get_real("cdv_beta1", 0);
        p.beta2 = kv.get_real("cdv_beta2", 0);
        p.delta1 = kv.get_real("cdv_delta1", 0);
        p.delta2 = kv.get_real("cdv_delta2", 0);
        p.gamma1 = kv.get_real("cdv_gamma1", 0);
        p.gamma2 = kv.get_real("cdv_gamma2", 0);
        p.gamma_tilde1 = kv.get_real("cdv_gamma_tilde1", 0);
        p.gamma_tilde2 = kv.get_real("cdv_gamma_tilde2", 0);
        p.eps_int = kv.get_real("cdv_eps_int", 0);
        rc.spec.cdv = p;
      } else {
        Scalar x1_star = kv.get_real("cdv_x1_star", 0.95);
        rc.spec.cdv = CdVParams::from_geometry(
            kv.get_real("cdv_b", 1.6), kv.get_real("cdv_beta", 1.25),
            kv.get_real("cdv_gamma", 0.33), kv.get_real("cdv_C", 0.045), x1_star,
            kv.get_real("cdv_x4_star", -0.801 * x1_star),
            kv.get_real("cdv_time_scale", 1.0));
      }
      rc.spec.cdv.validate();
      rc.dt = kv.get_real("dt", 10.0);
      rc.x0 = Vec(6);
      rc.x0 << rc.spec.cdv.x1_star, 0.1, 0.1, rc.spec.cdv.x4_star, 0.1, 0.1;
      break;
    }
  }
  rc.dt_star = kv.get_real("dt_star", kind == SystemKind::CdV ? 1e-3 : rc.dt);
  if (kind != SystemKind::CdV && !kv.has("dt_star")) rc.dt_star = rc.dt;
  auto x0_values = kv.get_reals("x0");
  if (!x0_values.empty()) {
    if (static_cast<int>(x0_values.size()) == 1 && rc.spec.dim > 1) {
      rc.x0 = Vec::Constant(rc.spec.dim, x0_values[0]);
    } else if (static_cast<int>(x0_values.size()) == rc.spec.dim) {
      rc.x0 = Eigen::Map<const Vec>(x0_values.data(), rc.spec.dim);
    } else {
      throw ConfigError("x0 has wrong number of components");
    }
  }
  rc.n_steps = kv.get_int("n_steps", 20000);
  rc.burn_in = kv.get_int("burn_in", kind == SystemKind::CdV ? 200 : 0);
  rc.base_sigma = kv.get_real("sigma", 0.0);
  rc.seed = kv.get_seed("seed", 1);
  rc.sigma_min = kv.get_real("sigma_min", rc.sigma_min);
  rc.sigma_max = kv.get_real("sigma_max", rc.sigma_max);
  rc.sigma_per_decade = static_cast<int>(kv.get_int("sigma_per_decade", rc.sigma_per_decade));
  rc.trajectory_path = kv.get("trajectory", "");
  rc.regime_source = kv.get("regime", "auto");
  rc.cluster_sigma = kv.get_real("cluster_sigma", rc.cluster_sigma);
  rc.n_eigenvectors = static_cast<int>(kv.get_int("n_eigenvectors", rc.n_eigenvectors));
  rc.k_clusters = static_cast<int>(kv.get_int("k_clusters", rc.k_clusters));
  rc.kmeans_restarts = static_cast<int>(kv.get_int("kmeans_restarts", rc.kmeans_restarts));
  rc.entry_mode = kv.get("entry_mode", rc.entry_mode);
  if (rc.entry_mode != "uniform-entries" && rc.entry_mode != "stationary")
    throw ConfigError("entry_mode must be 'uniform-entries' or 'stationary'");
  rc.mc_steps = kv.get_int("mc_steps", rc.mc_steps);
  rc.mc_realizations = kv.get_int("mc_realizations", rc.mc_realizations);
  rc.step_cap = kv.get_int("step_cap", rc.step_cap);
  rc.out_dir = kv.get("out", ".");
  return rc;
}

KeyValueConfig RunConfig::to_config() const {
  KeyValueConfig kv;
  kv.set("system", to_string(spec.kind));
  if (spec.kind == SystemKind::CdV) {
    const CdVParams& p = spec.cdv;
    kv.set("cdv_C", format_full(p.C));
    kv.set("cdv_x1_star", format_full(p.x1_star));
    kv.set("cdv_x4_star", format_full(p.x4_star));
    kv.set("cdv_alpha1", format_full(p.alpha1));
    kv.set("cdv_alpha2", format_full(p.alpha2));
    kv.set("cdv_beta1", format_full(p.beta1));
    kv.set("cdv_beta2", format_full(p.beta2));
    kv.set("cdv_delta1", format_full(p.delta1));
    kv.set("cdv_delta2", format_full(p.delta2));
    kv.set("cdv_gamma1", format_full(p.gamma1));
    kv.set("cdv_gamma2", format_full(p.gamma2));
    kv.set("cdv_gamma_tilde1", format_full(p.gamma_tilde1));
    kv.set("cdv_gamma_tilde2", format_full(p.gamma_tilde2));
    kv.set("cdv_eps_int", format_full(p.eps_int));
  } else {
    kv.set("epsilon", format_full(spec.reinsertion_scale));
  }
  std::ostringstream x0s;
  for (Index i = 0; i < x0.size(); ++i) x0s << (i ? "," : "") << format_full(x0[i]);
  kv.set("x0", x0s.str());
  kv.set("n_steps", std::to_string(n_steps));
  kv.set("burn_in", std::to_string(burn_in));
  kv.set("dt", format_full(dt));
  kv.set("dt_star", format_full(dt_star));
  kv.set("sigma", format_full(base_sigma));
  kv.set("seed", std::to_string(seed));
  kv.set("sigma_min", format_full(sigma_min));
  kv.set("sigma_max", format_full(sigma_max));
  kv.set("sigma_per_decade", std::to_string(sigma_per_decade));
  if (!trajectory_path.empty()) kv.set("trajectory", trajectory_path);
  kv.set("regime", regime_source);
  kv.set("cluster_sigma", format_full(cluster_sigma));
  kv.set("n_eigenvectors", std::to_string(n_eigenvectors));
  kv.set("k_clusters", std::to_string(k_clusters));
  kv.set("kmeans_restarts", std::to_string(kmeans_restarts));
  kv.set("entry_mode", entry_mode);
  kv.set("mc_steps", std::to_string(mc_steps));
  kv.set("mc_realizations", std::to_string(mc_realizations));
  kv.set("step_cap", std::to_string(step_cap));
  kv.set("out", out_dir);
  return kv;
}

}  // namespace inertia
