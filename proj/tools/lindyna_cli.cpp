// Command-line front end: `run` executes one experiment configuration,
// `sweep` expands a (alpha0, N0) grid, `verify` exercises the closed-form
// oracles. Exit codes: 0 ok, 1 configuration error, 2 diverged runs under
// --strict.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "lindyna/analysis.hpp"
#include "lindyna/harness.hpp"
#include "lindyna/planners.hpp"
#include "lindyna/rng.hpp"

using namespace lindyna;

namespace {

std::string num_tag(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

void write_meta(const ExperimentConfig& cfg, Algorithm alg, int diverged,
                const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write metadata file: " + path);
  out << "env.name = " << cfg.env << "\n"
      << "alg.name = " << to_string(alg) << "\n"
      << "alg.p = " << cfg.p << "\n"
      << "alg.gamma = " << cfg.gamma << "\n"
      << "alg.epsilon = " << cfg.epsilon << "\n"
      << "schedule.alpha0 = " << num_tag(cfg.alpha0) << "\n"
      << "schedule.n0 = " << num_tag(cfg.n0) << "\n"
      << "run.episodes = " << cfg.episodes << "\n"
      << "run.seeds = " << cfg.seeds << "\n"
      << "run.base_seed = " << cfg.base_seed << "\n"
      << "eval.cadence = " << cfg.eval_cadence << "\n"
      << "eval.episodes = " << cfg.eval_episodes << "\n"
      << "eval.seed = " << cfg.eval_seed << "\n"
      << "env.step_cap = " << cfg.step_cap << "\n"
      << "features.tilings = " << cfg.tile.tilings << "\n"
      << "features.grid = " << cfg.tile.grid << "\n"
      << "features.hash_dim = " << cfg.tile.hash_dim << "\n"
      << "features.seed = " << cfg.tile.seed << "\n"
      << "result.diverged_runs = " << diverged << "\n";
}

// Runs one (config, algorithm) cell, writes CSV + metadata, returns the
// number of diverged trials.
int run_cell(const ExperimentConfig& cfg, Algorithm alg, const std::string& stem, int jobs) {
  const std::vector<LearningCurve> curves =
      is_control(alg) ? run_control(cfg, alg, jobs) : run_policy_eval(cfg, alg, jobs);
  int diverged = 0;
  for (const LearningCurve& c : curves)
    if (c.diverged) ++diverged;
  if (static_cast<int>(curves.size()) - diverged >= 2) {
    emit_csv(aggregate(curves), stem + ".csv");
  } else {
    emit_csv(AggregatedCurve{}, stem + ".csv");  // header only; nothing to average
  }
  write_meta(cfg, alg, diverged, stem + ".meta");
  std::cout << stem << ".csv  (" << curves.size() << " runs, " << diverged << " diverged)\n";
  return diverged;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, int seeds_override,
            int jobs, bool strict, bool expand_grid) {
  ExperimentConfig cfg = ExperimentConfig::parse_file(config_path);
  if (seeds_override > 0) cfg.seeds = seeds_override;
  if (!expand_grid && cfg.has_grid())
    throw ConfigError("config declares a schedule grid; use the sweep command");

  std::filesystem::create_directories(out_dir);
  std::vector<double> alphas = cfg.alpha0_grid.empty() ? std::vector<double>{cfg.alpha0}
                                                       : cfg.alpha0_grid;
  std::vector<double> n0s = cfg.n0_grid.empty() ? std::vector<double>{cfg.n0} : cfg.n0_grid;
  if (!expand_grid) {
    alphas = {cfg.alpha0};
    n0s = {cfg.n0};
  }

  int diverged = 0;
  for (const Algorithm alg : cfg.algorithms) {
    for (const double a0 : alphas) {
      for (const double n0 : n0s) {
        ExperimentConfig cell = cfg;
        cell.alpha0 = a0;
        cell.n0 = n0;
        std::string stem = out_dir + "/" + cfg.env + "_" + to_string(alg);
        if (expand_grid) stem += "_a" + num_tag(a0) + "_n" + num_tag(n0);
        diverged += run_cell(cell, alg, stem, jobs);
      }
    }
  }
  if (strict && diverged > 0) {
    std::cerr << "strict mode: " << diverged << " diverged run(s)\n";
    return 2;
  }
  return 0;
}

bool check(bool ok, const std::string& what, int& failures) {
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << what << "\n";
  if (!ok) ++failures;
  return ok;
}

// Closed-form oracle spot checks, a quick subset of the full test suites.
int cmd_verify() {
  int failures = 0;
  RngStream rng(515151);

  auto random_sparse = [&](int dim) {
    std::vector<Entry> entries;
    const int nnz = 1 + rng.uniform_int(dim - 1);
    for (int k = 0; k < nnz; ++k) {
      double v = 2.0 * rng.uniform01() - 1.0;
      if (v == 0.0) v = 0.5;
      entries.push_back({rng.uniform_int(dim), v});
    }
    return SparseVec::from_unsorted(dim, std::move(entries));
  };

  // LSTD solution == fixed point of the least-squares model
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + rng.uniform_int(5);
    TransitionDataset data(n);
    for (int k = 0; k < 40; ++k)
      data.add(random_sparse(n), 2.0 * rng.uniform01() - 1.0, random_sparse(n));
    const Theta a = analysis::lstd_solve(data, 0.9);
    const Theta b = analysis::fixed_point(fit_least_squares(data), 0.9);
    for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  check(worst <= 1e-8, "LSTD equivalence on 20 random datasets (max diff " + num_tag(worst) + ")",
        failures);

  // both update rules stationary at the closed-form fixed point
  double drift = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + rng.uniform_int(4);
    LinearModel m(n, 0.0);
    Eigen::MatrixXd F(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) F(i, j) = 2.0 * rng.uniform01() - 1.0;
    F *= 0.8 / analysis::numerical_radius(F);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j)
        if (F(i, j) != 0.0) m.set_entry(i, j, F(i, j));
      m.set_b(i, 2.0 * rng.uniform01() - 1.0);
    }
    const Theta star = analysis::fixed_point(m, 0.9);
    for (int i = 0; i < n; ++i) {
      const SparseVec phi = unit_basis(i, n);
      const auto [phi_next, r] = m.predict(phi);
      Theta td = star, rg = star;
      td0_update(td, phi, r, phi_next, 0.9, 1.0);
      rg_update(rg, phi, r, phi_next, 0.9, 1.0);
      for (int k = 0; k < n; ++k) {
        drift = std::max(drift, std::abs(td[k] - star[k]));
        drift = std::max(drift, std::abs(rg[k] - star[k]));
      }
    }
  }
  check(drift <= 1e-12, "fixed-point stationarity on 10 random models (max drift " +
                            num_tag(drift) + ")",
        failures);

  // sampled quadratic forms never exceed the numerical radius
  bool bounded = true;
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 2 + rng.uniform_int(5);
    Eigen::MatrixXd F(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) F(i, j) = 2.0 * rng.uniform01() - 1.0;
    const double r = analysis::numerical_radius(F);
    for (int k = 0; k < 1000; ++k) {
      Eigen::VectorXd x(n);
      for (int i = 0; i < n; ++i) x(i) = 2.0 * rng.uniform01() - 1.0;
      if (x.norm() == 0.0) continue;
      x.normalize();
      bounded = bounded && x.dot(F * x) <= r + 1e-9;
    }
  }
  check(bounded, "numerical radius bounds sampled quadratic forms", failures);

  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear Dyna planning experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  int seeds = 0, jobs = 1;
  bool strict = false;

  CLI::App* run = app.add_subcommand("run", "run one experiment configuration");
  run->add_option("config", config_path, "configuration file")->required();
  run->add_option("--out", out_dir, "output directory (default: out)");
  run->add_option("--seeds", seeds, "override run.seeds");
  run->add_option("--jobs", jobs, "concurrent trials");
  run->add_flag("--strict", strict, "exit 2 on any diverged run");

  CLI::App* sweep = app.add_subcommand("sweep", "expand the (alpha0, N0) grid of a configuration");
  sweep->add_option("config", config_path, "configuration file")->required();
  sweep->add_option("--out", out_dir, "output directory (default: out)");
  sweep->add_option("--seeds", seeds, "override run.seeds");
  sweep->add_option("--jobs", jobs, "concurrent trials");
  sweep->add_flag("--strict", strict, "exit 2 on any diverged run");

  CLI::App* verify = app.add_subcommand("verify", "run the closed-form oracle checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) return cmd_verify();
    return cmd_run(config_path, out_dir, seeds, jobs, strict, sweep->parsed());
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
