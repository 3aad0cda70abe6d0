#include <CLI11.hpp>

#include "inertia/chain.hpp"
#include "inertia/config.hpp"
#include "inertia/csv.hpp"
#include "inertia/dynamics.hpp"
#include "inertia/kernel.hpp"
#include "inertia/montecarlo.hpp"
#include "inertia/oracle.hpp"
#include "inertia/regimes.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace inertia;

namespace {

constexpr const char* kVersion = "0.1.0";

struct CliOverrides {
  std::string config_path;
  std::string out_dir;
  std::optional<std::string> system;
  std::optional<std::uint64_t> seed;
  std::optional<double> sigma_min, sigma_max;
  std::optional<int> sigma_per_decade;
  std::optional<std::string> regime;
  std::optional<std::string> entry_mode;
  std::optional<std::string> trajectory;
};

KeyValueConfig resolve_config(const CliOverrides& cli) {
  KeyValueConfig kv;
  if (!cli.config_path.empty()) kv = KeyValueConfig::from_file(cli.config_path);
  if (cli.system) kv.set("system", *cli.system);
  if (cli.seed) kv.set("seed", std::to_string(*cli.seed));
  if (cli.sigma_min) kv.set("sigma_min", format_full(*cli.sigma_min));
  if (cli.sigma_max) kv.set("sigma_max", format_full(*cli.sigma_max));
  if (cli.sigma_per_decade) kv.set("sigma_per_decade", std::to_string(*cli.sigma_per_decade));
  if (cli.regime) kv.set("regime", *cli.regime);
  if (cli.entry_mode) kv.set("entry_mode", *cli.entry_mode);
  if (cli.trajectory) kv.set("trajectory", *cli.trajectory);
  if (!cli.out_dir.empty()) kv.set("out", cli.out_dir);
  return kv;
}

void write_manifest(const RunConfig& rc, const std::string& command) {
  KeyValueConfig snapshot = rc.to_config();
  fs::create_directories(rc.out_dir);
  std::ofstream out(fs::path(rc.out_dir) / (command + "_manifest.txt"));
  if (!out) throw IoError("cannot write manifest in '" + rc.out_dir + "'");
  out << "# run manifest: reloadable with --config\n";
  out << "# command = " << command << "\n";
  out << "# version = " << kVersion << "\n";
  out << "# config_hash = " << snapshot.hash() << "\n";
  out << snapshot.serialize();
}

std::string out_path(const RunConfig& rc, const std::string& name) {
  fs::create_directories(rc.out_dir);
  return (fs::path(rc.out_dir) / name).string();
}

TrajectoryDataset load_or_simulate(const RunConfig& rc) {
  if (!rc.trajectory_path.empty()) return load_trajectory(rc.trajectory_path);
  TrajectoryDataset ds = sample_trajectory(rc.spec, rc.x0, rc.n_steps + rc.burn_in, rc.dt,
                                           rc.dt_star, rc.base_sigma, rc.seed);
  return drop_prefix(ds, rc.burn_in);
}

std::vector<char> geometric_membership(const SystemSpec& spec, const TrajectoryDataset& ds) {
  std::vector<char> member(static_cast<std::size_t>(ds.points.rows()));
  for (Index i = 0; i < ds.points.rows(); ++i)
    member[static_cast<std::size_t>(i)] = ds.points.row(i).norm() < spec.regime_radius;
  return member;
}

struct RegimeData {
  std::vector<Index> regime;     // indices over the N states
  std::vector<char> membership;  // length N+1 (trailing point included)
};

RegimeData regime_from_partition_csv(const std::string& path, Index n_states) {
  CsvTable table = read_csv(path);
  Index idx_col = table.col("index");
  Index flag_col = table.col("in_regime");
  if (idx_col < 0 || flag_col < 0)
    throw ConfigError("partition file '" + path + "' needs 'index' and 'in_regime' columns");
  RegimeData data;
  data.membership.assign(static_cast<std::size_t>(n_states) + 1, 0);
  for (Index r = 0; r < table.values.rows(); ++r) {
    Index i = static_cast<Index>(table.values(r, idx_col));
    if (i < 0 || i >= n_states)
      throw ConfigError("partition index out of range in '" + path + "'");
    if (table.values(r, flag_col) != 0) {
      data.membership[static_cast<std::size_t>(i)] = 1;
      data.regime.push_back(i);
    }
  }
  if (data.regime.empty()) throw ConfigError("partition file defines an empty regime");
  std::sort(data.regime.begin(), data.regime.end());
  return data;
}

RegimeData resolve_regime(const RunConfig& rc, const TrajectoryDataset& ds) {
  if (rc.regime_source == "ball" ||
      (rc.regime_source == "auto" && rc.spec.kind != SystemKind::CdV)) {
    std::vector<char> member = geometric_membership(rc.spec, ds);
    RegimeData data;
    data.membership = member;
    for (Index i = 0; i < ds.n_states(); ++i)
      if (member[static_cast<std::size_t>(i)]) data.regime.push_back(i);
    if (data.regime.empty()) throw ConfigError("ball regime is empty");
    return data;
  }
  if (rc.regime_source == "auto")
    throw ConfigError(
        "regime 'auto' for cdv needs a partition: run the cluster command first "
        "and pass --regime <partition.csv>");
  return regime_from_partition_csv(rc.regime_source, ds.n_states());
}

Vec sigma_grid_of(const RunConfig& rc) {
  return geometric_grid(rc.sigma_min, rc.sigma_max, rc.sigma_per_decade);
}

int cmd_simulate(const RunConfig& rc) {
  TrajectoryDataset ds = sample_trajectory(rc.spec, rc.x0, rc.n_steps + rc.burn_in, rc.dt,
                                           rc.dt_star, rc.base_sigma, rc.seed);
  ds = drop_prefix(ds, rc.burn_in);
  save_trajectory(out_path(rc, "trajectory.csv"), ds);
  write_manifest(rc, "simulate");
  std::cout << "trajectory: " << ds.points.rows() << " rows, "
            << ds.reinsertion_indices.size() << " reinsertions -> "
            << out_path(rc, "trajectory.csv") << "\n";
  return 0;
}

int cmd_diagnose(const RunConfig& rc, const KeyValueConfig& kv) {
  TrajectoryDataset ds = load_or_simulate(rc);
  Vec grid = sigma_grid_of(rc);
  DiagnosticCurve curve = kernel_sum_curve(ds, grid);

  auto dump = [&](const DiagnosticCurve& c, const std::string& name) {
    CsvWriter w(out_path(rc, name),
                {"sigma", "log_sigma", "normalized_sum", "log_sum", "local_slope"});
    for (Index k = 0; k < c.sigma_grid.size(); ++k)
      w.row({c.sigma_grid[k], std::log(c.sigma_grid[k]), c.norm_sums[k], c.log_sums[k],
             c.slopes[k]});
  };
  dump(curve, "diagnostic.csv");
  auto [lo, hi] = curve.plateau();
  std::cout << "all points: d_est = " << curve.d_est << " at sigma* = " << curve.sigma_star
            << ", plateau [" << lo << ", " << hi << "]\n";

  if (rc.regime_source != "auto" && rc.regime_source != "ball") {
    RegimeData regime = regime_from_partition_csv(rc.regime_source, ds.n_states());
    // regime points plus everything within the halo radius
    Scalar halo_sigma = kv.get_real("halo_sigma", 0.03);
    Scalar halo = 3 * halo_sigma * std::sqrt(2 * ds.dt);
    Mat regime_pts(static_cast<Index>(regime.regime.size()), ds.dim);
    for (std::size_t a = 0; a < regime.regime.size(); ++a)
      regime_pts.row(static_cast<Index>(a)) = ds.points.row(regime.regime[a]);
    KdTree regime_tree(regime_pts);
    std::vector<Index> subset;
    for (Index i = 0; i < ds.points.rows(); ++i) {
      Scalar d = 0;
      regime_tree.nearest(ds.points.row(i).transpose(), &d);
      if (d <= halo) subset.push_back(i);
    }
    Mat sub(static_cast<Index>(subset.size()), ds.dim);
    for (std::size_t a = 0; a < subset.size(); ++a)
      sub.row(static_cast<Index>(a)) = ds.points.row(subset[a]);
    DiagnosticCurve rcurve = kernel_sum_curve(sub, ds.dt, grid);
    dump(rcurve, "diagnostic_regime.csv");
    auto [rlo, rhi] = rcurve.plateau();
    std::cout << "regime points: d_est = " << rcurve.d_est
              << " at sigma* = " << rcurve.sigma_star << ", plateau [" << rlo << ", " << rhi
              << "]\n";
  }
  write_manifest(rc, "diagnose");
  return 0;
}

int cmd_cluster(const RunConfig& rc, const KeyValueConfig& kv) {
  TrajectoryDataset ds = load_or_simulate(rc);
  DiffusionChain chain;
  chain.d = diffusion_matrix(similarity_matrix(ds, rc.cluster_sigma));
  check_irreducible(chain);

  std::vector<std::string> warnings;
  Mat embedding = spectral_embed(chain, rc.n_eigenvectors, rc.seed, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

  Vec anchor;
  auto anchor_values = kv.get_reals("anchor");
  if (!anchor_values.empty()) {
    if (static_cast<int>(anchor_values.size()) != rc.spec.dim)
      throw ConfigError("anchor has wrong dimension");
    anchor = Eigen::Map<const Vec>(anchor_values.data(), rc.spec.dim);
  } else if (rc.spec.kind == SystemKind::CdV) {
    // equilibria from a coarse grid of starts; blocking = weakest zonal flow
    std::vector<Vec6> starts;
    for (Scalar u = 0.2; u <= 1.41; u += 0.15)
      for (Scalar v = -1.0; v <= 0.01; v += 0.2) {
        Vec6 s;
        s << u, 0.05, 0.05, v, 0.05, 0.05;
        starts.push_back(s);
      }
    std::vector<Vec6> roots = cdv_equilibria(rc.spec.cdv, starts);
    if (roots.empty()) throw NumericalError("no cdv equilibrium found for the anchor");
    CsvWriter w(out_path(rc, "fixed_points.csv"),
                {"x1", "x2", "x3", "x4", "x5", "x6", "role"});
    for (std::size_t r = 0; r < roots.size(); ++r) {
      std::vector<std::string> row;
      for (int d = 0; d < 6; ++d) row.push_back(format_full(roots[r][d]));
      row.push_back(r == 0 ? "blocking" : (r + 1 == roots.size() ? "zonal" : "middle"));
      w.raw_row(row);
    }
    anchor = roots.front();
    std::cout << "fixed points: " << roots.size() << " (blocking x1 = " << anchor[0]
              << ")\n";
  } else {
    anchor = Vec::Zero(rc.spec.dim);  // the toy regime surrounds the origin
  }

  RegimePartition part =
      kmeans_partition(embedding, rc.k_clusters, rc.seed, anchor,
                       ds.points.topRows(ds.n_states()), rc.kmeans_restarts,
                       rc.cluster_sigma);
  CsvWriter w(out_path(rc, "partition.csv"), {"index", "label", "in_regime"});
  for (Index i = 0; i < ds.n_states(); ++i)
    w.row({static_cast<Scalar>(i),
           static_cast<Scalar>(part.labels[static_cast<std::size_t>(i)]),
           static_cast<Scalar>(part.membership[static_cast<std::size_t>(i)])});
  write_manifest(rc, "cluster");
  std::cout << "blocking cluster: " << part.regime.size() << " of " << ds.n_states()
            << " points -> " << out_path(rc, "partition.csv") << "\n";
  return 0;
}

int cmd_escape(const RunConfig& rc) {
  TrajectoryDataset ds = load_or_simulate(rc);
  RegimeData regime = resolve_regime(rc, ds);
  Vec grid = sigma_grid_of(rc);
  EscapeProfile profile = inertia_profile(ds, regime.regime, regime.membership, grid);
  for (const auto& err : profile.solve_errors) std::cerr << "warning: " << err << "\n";
  if (!profile.plateau_warning.empty())
    std::cerr << "warning: " << profile.plateau_warning << "\n";

  {
    CsvWriter w(out_path(rc, "escape_profile.csv"),
                {"index", "theta0", "r_max", "sigma_max", "flagged"});
    for (std::size_t a = 0; a < regime.regime.size(); ++a)
      w.row({static_cast<Scalar>(regime.regime[a]), profile.theta0[static_cast<Index>(a)],
             profile.r_max[static_cast<Index>(a)], profile.sigma_max[static_cast<Index>(a)],
             static_cast<Scalar>(profile.flagged[a])});
  }
  {
    std::vector<std::string> cols = {"index"};
    for (Index k = 0; k < grid.size(); ++k) cols.push_back("theta_" + format_full(grid[k]));
    CsvWriter w(out_path(rc, "thetas.csv"), cols);
    for (std::size_t a = 0; a < regime.regime.size(); ++a) {
      std::vector<Scalar> row = {static_cast<Scalar>(regime.regime[a])};
      for (Index k = 0; k < grid.size(); ++k)
        row.push_back(profile.theta(static_cast<Index>(a), k));
      w.row(row);
    }
  }
  write_manifest(rc, "escape");
  std::cout << "escape profile over " << regime.regime.size() << " regime points and "
            << grid.size() << " noise levels\n";
  return 0;
}

int cmd_lifetimes(const RunConfig& rc) {
  TrajectoryDataset ds = load_or_simulate(rc);
  RegimeData regime = resolve_regime(rc, ds);
  Vec grid = sigma_grid_of(rc);

  std::vector<Index> rows(regime.regime.size());
  for (std::size_t a = 0; a < regime.regime.size(); ++a) rows[a] = regime.regime[a] + 1;

  CsvWriter w(out_path(rc, "lifetimes_markov.csv"), {"sigma", "lifetime"});
  for (Index k = 0; k < grid.size(); ++k) {
    SpMat q = diffusion_submatrix(ds, grid[k], rows, regime.regime);
    Vec theta = escape_times_from_q(q, ds.dt);
    Vec nu;
    if (rc.entry_mode == "stationary") {
      DiffusionChain chain;
      chain.d = diffusion_matrix(similarity_matrix(ds, grid[k]));
      check_irreducible(chain);
      Vec mu = stationary_distribution(chain);
      nu = entry_distribution(chain, mu, regime.regime, regime.membership,
                              EntryMode::Stationary);
    } else {
      DiffusionChain dummy;  // uniform-entries only needs the index bookkeeping
      dummy.d.d = SpMat(ds.n_states() + 1, ds.n_states());
      dummy.d.dt = ds.dt;
      nu = entry_distribution(dummy, std::nullopt, regime.regime, regime.membership,
                              EntryMode::UniformEntries);
    }
    w.row({grid[k], expected_lifetime(nu, theta)});
  }
  write_manifest(rc, "lifetimes");
  std::cout << "markov lifetimes over " << grid.size() << " noise levels -> "
            << out_path(rc, "lifetimes_markov.csv") << "\n";
  return 0;
}

int cmd_oracle(const RunConfig& rc, const KeyValueConfig& kv) {
  if (rc.spec.kind != SystemKind::Toy1D)
    throw ConfigError("the analytic oracle exists for toy1d only");
  Vec grid = sigma_grid_of(rc);
  auto xs = kv.get_reals("oracle_x");
  if (!xs.empty()) {
    CsvWriter w(out_path(rc, "oracle.csv"), {"x", "sigma", "tau"});
    for (Scalar x : xs)
      for (Index k = 0; k < grid.size(); ++k)
        w.row({x, grid[k], analytic_escape_time(x, grid[k])});
    std::cout << "oracle grid: " << xs.size() << " x " << grid.size() << " -> "
              << out_path(rc, "oracle.csv") << "\n";
  } else {
    // average over the base trajectory's reinsertion positions
    TrajectoryDataset ds = load_or_simulate(rc);
    std::vector<Scalar> samples;
    for (Index i : ds.reinsertion_indices) samples.push_back(ds.points(i, 0));
    if (samples.empty()) throw ConfigError("trajectory has no reinsertions to average over");
    CsvWriter w(out_path(rc, "oracle_lifetimes.csv"), {"sigma", "lifetime"});
    for (Index k = 0; k < grid.size(); ++k)
      w.row({grid[k], analytic_lifetime(grid[k], samples)});
    std::cout << "oracle lifetimes over " << samples.size() << " reinsertions -> "
              << out_path(rc, "oracle_lifetimes.csv") << "\n";
  }
  write_manifest(rc, "oracle");
  return 0;
}

int cmd_mc(const RunConfig& rc, const std::string& mode) {
  Vec grid = sigma_grid_of(rc);
  if (mode == "lifetimes") {
    std::optional<TrajectoryDataset> ds;
    std::optional<KdTree> tree;
    std::vector<char> labels;
    std::function<bool(const Vec&)> membership;
    Vec x0 = rc.x0;
    if (rc.spec.kind == SystemKind::CdV) {
      ds = load_or_simulate(rc);
      RegimeData regime = resolve_regime(rc, *ds);
      tree.emplace(ds->points.topRows(ds->n_states()));
      labels.assign(regime.membership.begin(), regime.membership.begin() + ds->n_states());
      membership = [&tree, &labels](const Vec& x) {
        return classify_point_nn(x, *tree, labels, 10);
      };
      x0 = ds->points.row(ds->n_states()).transpose();  // start on the attractor
    } else {
      Scalar radius = rc.spec.regime_radius;
      membership = [radius](const Vec& x) { return x.norm() < radius; };
    }
    CsvWriter w(out_path(rc, "mc_lifetimes.csv"), {"sigma", "mean", "stderr", "n"});
    for (Index k = 0; k < grid.size(); ++k) {
      LifetimeEstimate est = mc_regime_lifetimes(rc.spec, x0, grid[k], rc.dt, rc.dt_star,
                                                 rc.mc_steps, membership, rc.seed + 1);
      if (est.low_samples)
        std::cerr << "warning: sigma=" << grid[k] << " produced only "
                  << est.estimate.n_samples << " completed visits\n";
      w.row({grid[k], est.estimate.mean, est.estimate.stderr_,
             static_cast<Scalar>(est.estimate.n_samples)});
    }
    write_manifest(rc, "mc");
    return 0;
  }
  if (mode != "escape") throw ConfigError("mc mode must be 'escape' or 'lifetimes'");

  std::function<bool(const Vec&)> inside;
  std::optional<KdTree> regime_tree;
  if (rc.spec.kind == SystemKind::CdV) {
    TrajectoryDataset ds = load_or_simulate(rc);
    RegimeData regime = resolve_regime(rc, ds);
    Mat regime_pts(static_cast<Index>(regime.regime.size()), ds.dim);
    for (std::size_t a = 0; a < regime.regime.size(); ++a)
      regime_pts.row(static_cast<Index>(a)) = ds.points.row(regime.regime[a]);
    regime_tree.emplace(std::move(regime_pts));
    inside = [&regime_tree](const Vec& x) {
      return !escaped_by_distance(x, *regime_tree, 1e-1);
    };
  } else {
    Scalar radius = rc.spec.regime_radius;
    inside = [radius](const Vec& x) { return x.norm() < radius; };
  }
  CsvWriter w(out_path(rc, "mc_escape.csv"), {"sigma", "mean", "stderr", "n", "censored"});
  for (Index k = 0; k < grid.size(); ++k) {
    MCEstimate est = mc_escape_time(rc.spec, rc.x0, inside, grid[k], rc.dt, rc.dt_star,
                                    rc.mc_realizations, rc.seed + 2, rc.step_cap);
    if (est.censored)
      std::cerr << "warning: sigma=" << grid[k] << " censored " << est.censored
                << " realizations at the step cap\n";
    w.row({grid[k], est.mean, est.stderr_, static_cast<Scalar>(est.n_samples),
           static_cast<Scalar>(est.censored)});
  }
  write_manifest(rc, "mc");
  return 0;
}

int cmd_compare(const RunConfig& rc) {
  TrajectoryDataset ds = load_or_simulate(rc);
  RegimeData regime = resolve_regime(rc, ds);
  Vec grid = sigma_grid_of(rc);

  // Markov chain lifetimes with uniform entry weights
  std::vector<Index> rows(regime.regime.size());
  for (std::size_t a = 0; a < regime.regime.size(); ++a) rows[a] = regime.regime[a] + 1;
  Vec markov(grid.size());
  for (Index k = 0; k < grid.size(); ++k) {
    SpMat q = diffusion_submatrix(ds, grid[k], rows, regime.regime);
    Vec theta = escape_times_from_q(q, ds.dt);
    DiffusionChain dummy;
    dummy.d.d = SpMat(ds.n_states() + 1, ds.n_states());
    dummy.d.dt = ds.dt;
    Vec nu = entry_distribution(dummy, std::nullopt, regime.regime, regime.membership,
                                EntryMode::UniformEntries);
    markov[k] = expected_lifetime(nu, theta);
  }

  // Monte Carlo lifetimes on the same grid
  std::function<bool(const Vec&)> membership;
  std::optional<KdTree> tree;
  std::vector<char> labels;
  if (rc.spec.kind == SystemKind::CdV) {
    tree.emplace(ds.points.topRows(ds.n_states()));
    labels.assign(regime.membership.begin(), regime.membership.begin() + ds.n_states());
    membership = [&tree, &labels](const Vec& x) {
      return classify_point_nn(x, *tree, labels, 10);
    };
  } else {
    Scalar radius = rc.spec.regime_radius;
    membership = [radius](const Vec& x) { return x.norm() < radius; };
  }
  Vec mc_x0 = rc.spec.kind == SystemKind::CdV
                  ? Vec(ds.points.row(ds.n_states()).transpose())
                  : rc.x0;
  Vec mc_mean(grid.size()), mc_stderr(grid.size());
  for (Index k = 0; k < grid.size(); ++k) {
    LifetimeEstimate est = mc_regime_lifetimes(rc.spec, mc_x0, grid[k], rc.dt, rc.dt_star,
                                               rc.mc_steps, membership, rc.seed + 1);
    mc_mean[k] = est.estimate.mean;
    mc_stderr[k] = est.estimate.stderr_;
  }

  // the analytic reference exists for the scalar toy system
  bool with_analytic = rc.spec.kind == SystemKind::Toy1D;
  Vec analytic(grid.size());
  if (with_analytic) {
    std::vector<Scalar> samples;
    for (Index i : ds.reinsertion_indices) samples.push_back(ds.points(i, 0));
    if (samples.empty()) throw ConfigError("trajectory has no reinsertions to average over");
    for (Index k = 0; k < grid.size(); ++k)
      analytic[k] = analytic_lifetime(grid[k], samples);
  }

  std::vector<std::string> cols = {"sigma", "markov", "mc", "mc_stderr"};
  if (with_analytic) cols.push_back("analytic");
  CsvWriter w(out_path(rc, "compare.csv"), cols);
  for (Index k = 0; k < grid.size(); ++k) {
    std::vector<Scalar> row = {grid[k], markov[k], mc_mean[k], mc_stderr[k]};
    if (with_analytic) row.push_back(analytic[k]);
    w.row(row);
  }
  write_manifest(rc, "compare");
  std::cout << "lifetime comparison over " << grid.size() << " noise levels -> "
            << out_path(rc, "compare.csv") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic-inertia detection from trajectory data"};
  app.require_subcommand(1);

  CliOverrides cli;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", cli.config_path, "key = value configuration file");
    sub->add_option("--out", cli.out_dir, "output directory");
    sub->add_option_function<std::string>(
        "--system", [&](const std::string& v) { cli.system = v; }, "toy1d, toy3d or cdv");
    sub->add_option_function<std::uint64_t>("--seed",
                                            [&](std::uint64_t v) { cli.seed = v; });
    sub->add_option_function<double>("--sigma-min", [&](double v) { cli.sigma_min = v; });
    sub->add_option_function<double>("--sigma-max", [&](double v) { cli.sigma_max = v; });
    sub->add_option_function<int>("--sigma-per-decade",
                                  [&](int v) { cli.sigma_per_decade = v; });
    sub->add_option_function<std::string>(
        "--regime", [&](const std::string& v) { cli.regime = v; },
        "ball, auto, or path to a partition csv");
    sub->add_option_function<std::string>(
        "--entry-mode", [&](const std::string& v) { cli.entry_mode = v; },
        "stationary or uniform-entries");
    sub->add_option_function<std::string>(
        "--trajectory", [&](const std::string& v) { cli.trajectory = v; });
  };

  CLI::App* simulate = app.add_subcommand("simulate", "sample a trajectory");
  CLI::App* diagnose = app.add_subcommand("diagnose", "kernel-sum dimension diagnostic");
  CLI::App* cluster = app.add_subcommand("cluster", "spectral regime identification");
  CLI::App* escape = app.add_subcommand("escape", "escape-time profile over noise levels");
  CLI::App* lifetimes = app.add_subcommand("lifetimes", "markov-chain regime lifetimes");
  CLI::App* oracle = app.add_subcommand("oracle", "analytic escape times (toy1d)");
  CLI::App* mc = app.add_subcommand("mc", "monte carlo estimates");
  CLI::App* compare = app.add_subcommand("compare", "markov vs monte carlo (vs analytic)");
  std::string mc_mode = "lifetimes";
  mc->add_option("--mode", mc_mode, "escape or lifetimes");
  for (CLI::App* sub : {simulate, diagnose, cluster, escape, lifetimes, oracle, mc, compare})
    add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    KeyValueConfig kv = resolve_config(cli);
    RunConfig rc = RunConfig::from_config(kv);
    if (simulate->parsed()) return cmd_simulate(rc);
    if (diagnose->parsed()) return cmd_diagnose(rc, kv);
    if (cluster->parsed()) return cmd_cluster(rc, kv);
    if (escape->parsed()) return cmd_escape(rc);
    if (lifetimes->parsed()) return cmd_lifetimes(rc);
    if (oracle->parsed()) return cmd_oracle(rc, kv);
    if (mc->parsed()) return cmd_mc(rc, mc_mode);
    if (compare->parsed()) return cmd_compare(rc);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
