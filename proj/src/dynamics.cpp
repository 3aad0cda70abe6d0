#include "inertia/dynamics.hpp"

#include "inertia/csv.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace inertia {

std::string to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::Toy1D: return "toy1d";
    case SystemKind::Toy3D: return "toy3d";
    case SystemKind::CdV: return "cdv";
  }
  return "?";
}

SystemKind system_kind_from_string(const std::string& name) {
  if (name == "toy1d") return SystemKind::Toy1D;
  if (name == "toy3d") return SystemKind::Toy3D;
  if (name == "cdv") return SystemKind::CdV;
  throw ConfigError("unknown system '" + name + "' (expected toy1d, toy3d or cdv)");
}

CdVParams CdVParams::from_geometry(Scalar b, Scalar beta, Scalar gamma, Scalar C,
                                   Scalar x1_star, Scalar x4_star, Scalar time_scale) {
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar s2 = std::numbers::sqrt2_v<Scalar>;
  const Scalar b2 = b * b;
  auto alpha = [&](Scalar m) {
    return 8 * s2 / pi * m * m / (4 * m * m - 1) * (b2 + m * m - 1) / (b2 + m * m);
  };
  auto beta_m = [&](Scalar m) { return beta * b2 / (b2 + m * m); };
  auto delta = [&](Scalar m) {
    return 64 * s2 / (15 * pi) * (b2 - m * m + 1) / (b2 + m * m);
  };
  // form drag on the zonal modes (momentum-budget projection, no inverse
  // wave Laplacian) and topographic coupling in the wave equations
  auto gamma_tilde = [&](Scalar m) { return gamma * 4 * m / (4 * m * m - 1) * s2 * b / pi; };
  auto gamma_m = [&](Scalar m) {
    return gamma * 4 * m * m * m / (4 * m * m - 1) * s2 * b / (pi * (b2 + m * m));
  };

  CdVParams p;
  p.C = C;
  p.x1_star = x1_star;
  p.x4_star = x4_star;
  p.alpha1 = alpha(1);
  p.alpha2 = alpha(2);
  p.beta1 = beta_m(1);
  p.beta2 = beta_m(2);
  p.delta1 = delta(1);
  p.delta2 = delta(2);
  p.gamma_tilde1 = gamma_tilde(1);
  p.gamma_tilde2 = gamma_tilde(2);
  p.gamma1 = gamma_m(1);
  p.gamma2 = gamma_m(2);
  p.eps_int = 16 * s2 / (5 * pi);
  if (time_scale != 1.0) {
    for (Scalar* coeff : {&p.C, &p.alpha1, &p.alpha2, &p.beta1, &p.beta2, &p.delta1,
                          &p.delta2, &p.gamma1, &p.gamma2, &p.gamma_tilde1,
                          &p.gamma_tilde2, &p.eps_int})
      *coeff *= time_scale;
  }
  p.validate();
  return p;
}

CdVParams CdVParams::standard() {
  // Chaotic configuration with blocking/zonal regime transitions; see
  // README for how the geometry parameters were chosen.
  return from_geometry(/*b=*/1.6, /*beta=*/1.25, /*gamma=*/0.33, /*C=*/0.045,
                       /*x1_star=*/0.95, /*x4_star=*/-0.801 * 0.95);
}

void CdVParams::validate() const {
  if (!(C > 0)) throw ConfigError("CdV damping C must be positive");
  for (Scalar v : {x1_star, x4_star, alpha1, alpha2, beta1, beta2, delta1, delta2, gamma1,
                   gamma2, gamma_tilde1, gamma_tilde2, eps_int}) {
    if (!std::isfinite(v)) throw ConfigError("CdV parameter is not finite");
  }
}

SystemSpec SystemSpec::toy1d(Scalar epsilon) {
  SystemSpec s;
  s.kind = SystemKind::Toy1D;
  s.dim = 1;
  s.reinsertion_scale = epsilon;
  s.validate();
  return s;
}

SystemSpec SystemSpec::toy3d(Scalar epsilon) {
  SystemSpec s;
  s.kind = SystemKind::Toy3D;
  s.dim = 3;
  s.reinsertion_scale = epsilon;
  s.validate();
  return s;
}

SystemSpec SystemSpec::cdv_standard() {
  SystemSpec s;
  s.kind = SystemKind::CdV;
  s.dim = 6;
  s.cdv = CdVParams::standard();
  s.validate();
  return s;
}

void SystemSpec::validate() const {
  switch (kind) {
    case SystemKind::Toy1D:
      if (dim != 1) throw ConfigError("toy1d requires dim == 1");
      break;
    case SystemKind::Toy3D:
      if (dim != 3) throw ConfigError("toy3d requires dim == 3");
      break;
    case SystemKind::CdV:
      if (dim != 6) throw ConfigError("cdv requires dim == 6");
      cdv.validate();
      return;
  }
  if (!(reinsertion_scale > 0)) throw ConfigError("reinsertion scale must be positive");
  if (!(regime_radius < domain_radius))
    throw ConfigError("regime radius must be smaller than the domain radius");
}

Vec draw_reinsertion(const SystemSpec& spec, Scalar sign, RngStream& rng) {
  const Scalar eps = spec.reinsertion_scale;
  if (spec.kind == SystemKind::Toy1D) {
    Scalar c1 = eps * rng.normal(), c2 = eps * rng.normal(), c3 = eps * rng.normal();
    Vec out(1);
    out[0] = sign * std::sqrt(c1 * c1 + c2 * c2 + c3 * c3);
    return out;
  }
  if (spec.kind == SystemKind::Toy3D) {
    Vec out(3);
    for (int i = 0; i < 3; ++i) out[i] = eps * rng.normal();
    return out;
  }
  throw ConfigError("reinsertion is defined for the toy systems only");
}

Vec ou_step(const Eigen::Ref<const Vec>& state, Scalar sigma, Scalar dt,
            const SystemSpec& spec, RngStream& rng) {
  if (!state.allFinite()) throw NumericalError("ou_step: non-finite state");
  if (state.norm() >= spec.domain_radius) {
    Scalar sign = state.size() == 1 && state[0] < 0 ? -1.0 : 1.0;
    return draw_reinsertion(spec, sign, rng);
  }
  Vec out = std::exp(dt) * state;
  if (sigma > 0) {
    Scalar sigma_dt = sigma * std::sqrt((std::exp(2 * dt) - 1) / 2);
    for (Index i = 0; i < out.size(); ++i) out[i] += sigma_dt * rng.normal();
  }
  return out;
}

Vec6 cdv_rhs(const Vec6& state, const CdVParams& p) {
  const Scalar x1 = state[0], x2 = state[1], x3 = state[2];
  const Scalar x4 = state[3], x5 = state[4], x6 = state[5];
  Vec6 out;
  out[0] = -p.C * (x1 - p.x1_star) + p.gamma_tilde1 * x3;
  out[1] = -p.C * x2 + p.beta1 * x3 - p.alpha1 * x1 * x3 - p.delta1 * x4 * x6;
  out[2] = -p.C * x3 - p.beta1 * x2 + p.alpha1 * x1 * x2 + p.delta1 * x4 * x5 -
           p.gamma1 * x1;
  out[3] = -p.C * (x4 - p.x4_star) + p.eps_int * (x2 * x6 - x3 * x5) + p.gamma_tilde2 * x6;
  out[4] = -p.C * x5 + p.beta2 * x6 - p.alpha2 * x1 * x6 - p.delta2 * x4 * x3;
  out[5] = -p.C * x6 - p.beta2 * x5 + p.alpha2 * x1 * x5 + p.delta2 * x4 * x2 -
           p.gamma2 * x4;
  return out;
}

Vec6 cdv_step(const Vec6& state, const CdVParams& p, Scalar sigma, Scalar dt_star,
              RngStream& rng) {
  Vec6 k1 = dt_star * cdv_rhs(state, p);
  Vec6 k2 = dt_star * cdv_rhs(state + 0.5 * k1, p);
  Vec6 out = state + k2;
  if (sigma > 0) {
    Scalar amp = sigma * std::sqrt(dt_star);
    for (int i = 0; i < 6; ++i) out[i] += amp * rng.normal();
  }
  if (!out.allFinite()) throw NumericalError("cdv_step: state blew up");
  return out;
}

TrajectoryDataset sample_trajectory(const SystemSpec& spec, const Vec& x0, Index n_steps,
                                    Scalar dt, Scalar dt_star, Scalar sigma,
                                    std::uint64_t seed) {
  spec.validate();
  if (n_steps < 1) throw ConfigError("sample_trajectory: n_steps must be >= 1");
  if (x0.size() != spec.dim) throw ConfigError("sample_trajectory: x0 has wrong dimension");

  Index substeps = 1;
  if (spec.kind == SystemKind::CdV) {
    Scalar ratio = dt / dt_star;
    substeps = static_cast<Index>(std::llround(ratio));
    if (substeps < 1 || std::abs(ratio - static_cast<Scalar>(substeps)) > 1e-9 * ratio)
      throw ConfigError("sample_trajectory: dt must be an integer multiple of dt_star");
  } else if (dt_star != dt) {
    throw ConfigError("sample_trajectory: toy systems use dt_star == dt (exact stepper)");
  }

  TrajectoryDataset ds;
  ds.dt = dt;
  ds.base_sigma = sigma;
  ds.seed = seed;
  ds.dim = spec.dim;
  ds.points.resize(n_steps + 1, spec.dim);
  ds.points.row(0) = x0.transpose();

  RngStream rng = RngStream::substream(seed, 0);
  Vec state = x0;
  for (Index n = 1; n <= n_steps; ++n) {
    if (spec.kind == SystemKind::CdV) {
      Vec6 z = state;
      for (Index s = 0; s < substeps; ++s) z = cdv_step(z, spec.cdv, sigma, dt_star, rng);
      state = z;
    } else {
      bool reinserted = state.norm() >= spec.domain_radius;
      state = ou_step(state, sigma, dt, spec, rng);
      if (reinserted) ds.reinsertion_indices.push_back(n);
    }
    ds.points.row(n) = state.transpose();
  }
  return ds;
}

TrajectoryDataset drop_prefix(const TrajectoryDataset& ds, Index k) {
  if (k <= 0) return ds;
  if (ds.points.rows() - k < 2)
    throw ConfigError("drop_prefix: burn-in leaves fewer than 2 points");
  TrajectoryDataset out;
  out.dt = ds.dt;
  out.base_sigma = ds.base_sigma;
  out.seed = ds.seed;
  out.dim = ds.dim;
  out.points = ds.points.bottomRows(ds.points.rows() - k);
  for (Index i : ds.reinsertion_indices)
    if (i >= k) out.reinsertion_indices.push_back(i - k);
  return out;
}

void save_trajectory(const std::string& path, const TrajectoryDataset& ds) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "# dt = " << format_full(ds.dt) << "\n";
  out << "# dim = " << ds.dim << "\n";
  out << "# seed = " << ds.seed << "\n";
  out << "# sigma = " << format_full(ds.base_sigma) << "\n";
  out << "# reinsertion_indices =";
  for (Index i : ds.reinsertion_indices) out << ' ' << i;
  out << "\n";
  out << "step";
  for (int d = 1; d <= ds.dim; ++d) out << ",x" << d;
  out << "\n";
  for (Index i = 0; i < ds.points.rows(); ++i) {
    out << i;
    for (int d = 0; d < ds.dim; ++d) out << ',' << format_full(ds.points(i, d));
    out << "\n";
  }
  if (!out) throw IoError("failed while writing '" + path + "'");
}

TrajectoryDataset load_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trajectory file '" + path + "'");
  TrajectoryDataset ds;
  std::string line;
  std::vector<Vec> rows;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.substr(1);
      auto eq = body.find('=');
      if (eq == std::string::npos) continue;
      std::string key = trim(body.substr(0, eq));
      std::string value = trim(body.substr(eq + 1));
      if (key == "dt") ds.dt = std::stod(value);
      else if (key == "dim") ds.dim = std::stoi(value);
      else if (key == "seed") ds.seed = std::stoull(value);
      else if (key == "sigma") ds.base_sigma = std::stod(value);
      else if (key == "reinsertion_indices") {
        std::istringstream iss(value);
        Index idx;
        while (iss >> idx) ds.reinsertion_indices.push_back(idx);
      }
      continue;
    }
    if (!header_seen) {  // column header row
      header_seen = true;
      continue;
    }
    auto fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != ds.dim + 1)
      throw IoError("trajectory row with wrong field count in '" + path + "'");
    Vec row(ds.dim);
    for (int d = 0; d < ds.dim; ++d) row[d] = std::stod(fields[static_cast<std::size_t>(d) + 1]);
    rows.push_back(std::move(row));
  }
  if (ds.dim <= 0 || rows.size() < 2)
    throw IoError("trajectory file '" + path + "' is missing header or data");
  ds.points.resize(static_cast<Index>(rows.size()), ds.dim);
  for (std::size_t i = 0; i < rows.size(); ++i)
    ds.points.row(static_cast<Index>(i)) = rows[i].transpose();
  return ds;
}

}  // namespace inertia
