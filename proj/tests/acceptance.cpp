// Acceptance suite: every release criterion checked at its pinned tolerance,
// one PASS/FAIL line per criterion. Exit code is the number of failures.
//
// Run all criteria:            ./acceptance_tests
// Run a subset (by number):    ./acceptance_tests 1 4 9

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lindyna/analysis.hpp"
#include "lindyna/envs.hpp"
#include "lindyna/harness.hpp"
#include "lindyna/planners.hpp"
#include "oracles.hpp"

using namespace lindyna;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof(buf), pattern, args);
  va_end(args);
  return buf;
}

TransitionDataset random_dataset(RngStream& rng, int n, int count) {
  TransitionDataset data(n);
  for (int k = 0; k < count; ++k)
    data.add(oracle::random_sparse(rng, n, 1 + rng.uniform_int(n - 1)), 2.0 * rng.uniform01() - 1.0,
             oracle::random_sparse(rng, n, 1 + rng.uniform_int(n - 1)));
  return data;
}

void copy_into(const Eigen::MatrixXd& F, const Eigen::VectorXd& b, LinearModel& m) {
  const int n = static_cast<int>(F.rows());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      if (F(i, j) != 0.0) m.set_entry(i, j, F(i, j));
    m.set_b(i, b(i));
  }
}

// ---------------------------------------------------------------------------
// 1. LSTD equivalence: the fixed point of the least-squares model matches the
//    direct LSTD solution on 100 random datasets.
// ---------------------------------------------------------------------------
Outcome criterion_lstd_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  RngStream rng(20260808);
  const double gammas[] = {0.5, 0.9, 0.99};
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int n = 2 + rng.uniform_int(7);                       // 2..8
    const int count = 20 + rng.uniform_int(61);                 // 20..80
    const double gamma = gammas[k % 3];
    const TransitionDataset data = random_dataset(rng, n, count);
    const Theta direct = analysis::lstd_solve(data, gamma);
    const Theta via_model = analysis::fixed_point(fit_least_squares(data), gamma);
    for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(direct[i] - via_model[i]));
  }
  const double elapsed = seconds_since(t0);
  return {worst <= 1e-8 && elapsed < 5.0,
          fmt("max |lstd - model fixed point| = %.3g (tol 1e-8), %.2f s (budget 5 s)", worst, elapsed)};
}

// ---------------------------------------------------------------------------
// 2. mu-independence: random-sampling planning reaches the same fixed point
//    under uniform and heavily skewed sampling distributions.
// ---------------------------------------------------------------------------
Outcome criterion_mu_independence() {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = 5;

  // F = S + K with S symmetric of largest eigenvalue 0.8 and K skew, so the
  // numerical radius is exactly 0.8.
  RngStream rng(11061);
  Eigen::MatrixXd R(n, n), K(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      R(i, j) = 2.0 * rng.uniform01() - 1.0;
      K(i, j) = 2.0 * rng.uniform01() - 1.0;
    }
  const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(R).householderQ();
  Eigen::VectorXd spectrum(n);
  spectrum << 0.8, 0.3, -0.2, 0.1, 0.5;
  const Eigen::MatrixXd S = Q * spectrum.asDiagonal() * Q.transpose();
  const Eigen::MatrixXd F = S + 0.25 * (K - K.transpose());
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) b(i) = 2.0 * rng.uniform01() - 1.0;

  const double radius = analysis::numerical_radius(F);
  const double gamma = 0.9;

  PlannerConfig uniform_cfg;
  uniform_cfg.gamma = gamma;
  PlannerConfig skew_cfg = uniform_cfg;
  skew_cfg.mu_weights = {0.9, 0.025, 0.025, 0.025, 0.025};

  DynaRandomPlanner uni(n, uniform_cfg, 501), skew(n, skew_cfg, 502);
  copy_into(F, b, uni.model());
  copy_into(F, b, skew.model());
  uni.freeze_model(true);
  skew.freeze_model(true);

  for (int t = 1; t <= 100000; ++t) {
    const double alpha = step_size(0.1, 1e6, t);
    uni.plan(1, alpha);
    skew.plan(1, alpha);
  }

  LinearModel m(n, 0.0);
  copy_into(F, b, m);
  const Theta star = analysis::fixed_point(m, gamma);
  double worst_uni = 0.0, worst_skew = 0.0, worst_gap = 0.0;
  for (int i = 0; i < n; ++i) {
    worst_uni = std::max(worst_uni, std::abs(uni.theta()[i] - star[i]));
    worst_skew = std::max(worst_skew, std::abs(skew.theta()[i] - star[i]));
    worst_gap = std::max(worst_gap, std::abs(uni.theta()[i] - skew.theta()[i]));
  }
  const double elapsed = seconds_since(t0);
  const bool pass = std::abs(radius - 0.8) < 1e-10 && worst_uni <= 1e-4 && worst_skew <= 1e-4 &&
                    worst_gap <= 1e-4 && elapsed < 10.0;
  return {pass, fmt("r(F) = %.12f; |uniform - star| = %.2g, |skew - star| = %.2g, gap = %.2g "
                    "(tol 1e-4), %.2f s (budget 10 s)",
                    radius, worst_uni, worst_skew, worst_gap, elapsed)};
}

// ---------------------------------------------------------------------------
// 3. Stability contrast on an expansion model: TD(0) planning trips the
//    divergence guard, residual-gradient planning still converges. The 2x2
//    instance comes from a seeded randomized search, frozen here.
// ---------------------------------------------------------------------------
constexpr std::uint64_t kContrastSearchSeed = 1;

Outcome criterion_stability_contrast() {
  const auto t0 = std::chrono::steady_clock::now();
  const double gamma = 0.9;

  // regenerate the frozen instance: first candidate from the search seed that
  // passes the static filters (expansion radius, well-posed fixed point,
  // unstable planning dynamics)
  RngStream rng(kContrastSearchSeed);
  Eigen::MatrixXd F(2, 2);
  Eigen::VectorXd b(2);
  bool found = false;
  for (int tries = 0; tries < 100000 && !found; ++tries) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) F(i, j) = 4.0 * rng.uniform01() - 2.0;
      b(i) = 2.0 * rng.uniform01() - 1.0;
    }
    const Eigen::MatrixXd G = Eigen::MatrixXd::Identity(2, 2) - gamma * F;
    const bool expansion = analysis::numerical_radius(F) > 1.05;
    const bool well_posed = std::abs(G.determinant()) > 0.1;
    const bool ode_unstable = G.determinant() < -0.02 || G.trace() < -0.02;
    found = expansion && well_posed && ode_unstable;
  }
  if (!found) return {false, "randomized search exhausted without a candidate"};

  LinearModel m(2, 0.0);
  copy_into(F, b, m);
  const Theta star = analysis::fixed_point(m, gamma);

  PlannerConfig cfg;
  cfg.gamma = gamma;
  DynaRandomPlanner td(2, cfg, 301);
  copy_into(F, b, td.model());
  td.freeze_model(true);
  bool tripped = false;
  long trip_step = -1;
  try {
    for (int t = 1; t <= 100000; ++t) td.plan(1, step_size(0.1, 1e6, t));
  } catch (const DivergenceError& e) {
    tripped = true;
    trip_step = e.step();
  }

  Theta rg_theta(2);
  RngStream mu(302);
  for (int t = 1; t <= 100000; ++t) {
    const int j = mu.uniform_int(2);
    const SparseVec phi = unit_basis(j, 2);
    const auto [phi_next, r] = m.predict(phi);
    rg_update(rg_theta, phi, r, phi_next, gamma, step_size(0.01, 1e6, t));
  }
  double rg_err = 0.0;
  for (int i = 0; i < 2; ++i) rg_err = std::max(rg_err, std::abs(rg_theta[i] - star[i]));

  const double elapsed = seconds_since(t0);
  const bool pass = tripped && rg_err <= 1e-4 && elapsed < 10.0;
  return {pass, fmt("r(F) = %.3f; TD guard %s (planning step %ld); |rg - star| = %.2g (tol 1e-4), "
                    "%.2f s (budget 10 s)",
                    analysis::numerical_radius(F), tripped ? "tripped" : "NOT tripped", trip_step,
                    rg_err, elapsed)};
}

// ---------------------------------------------------------------------------
// 4. Fixed-point stationarity: at theta = (I - gamma F')^-1 b both update
//    rules are exact no-ops on every basis vector.
// ---------------------------------------------------------------------------
Outcome criterion_stationarity() {
  RngStream rng(40404);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + rng.uniform_int(5);
    LinearModel m(n, 0.0);
    Eigen::MatrixXd F(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) F(i, j) = 2.0 * rng.uniform01() - 1.0;
    F *= 0.85 / analysis::numerical_radius(F);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) b(i) = 2.0 * rng.uniform01() - 1.0;
    copy_into(F, b, m);
    const double gamma = 0.9;
    const Theta star = analysis::fixed_point(m, gamma);
    for (int i = 0; i < n; ++i) {
      const SparseVec phi = unit_basis(i, n);
      const auto [phi_next, r] = m.predict(phi);
      Theta td = star, rg = star;
      td0_update(td, phi, r, phi_next, gamma, 1.0);
      rg_update(rg, phi, r, phi_next, gamma, 1.0);
      for (int k = 0; k < n; ++k) {
        worst = std::max(worst, std::abs(td[k] - star[k]));
        worst = std::max(worst, std::abs(rg[k] - star[k]));
      }
    }
  }
  return {worst <= 1e-12, fmt("max |theta change| over 50 models = %.3g (tol 1e-12)", worst)};
}

// ---------------------------------------------------------------------------
// 5. p = 0 reductions: every Dyna planner with planning disabled walks the
//    exact TD(0) trajectory; the control planner equals the Sarsa baseline.
// ---------------------------------------------------------------------------
Outcome criterion_p0_reductions() {
  bool identical = true;

  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    RngStream env(RngStream::derive(970, seed));
    PlannerConfig cfg;
    cfg.gamma = 1.0;
    cfg.p = 0;
    Td0Learner td(kBoyanFeatureDim, cfg.gamma);
    DynaRandomPlanner rnd(kBoyanFeatureDim, cfg, seed);
    DynaPwmaPlanner pwma(kBoyanFeatureDim, cfg);
    DynaMgPlanner mg(kBoyanFeatureDim, cfg);

    BoyanState s{kBoyanStartState};
    const SparseVec empty(kBoyanFeatureDim);
    int episode = 1;
    for (int step = 0; step < 1000; ++step) {
      if (s.terminal()) {
        s = BoyanState{kBoyanStartState};
        ++episode;
      }
      const double alpha = step_size(0.1, 1000, episode);
      const SparseVec phi = boyan_features(s.s);
      const BoyanStep st = boyan_step(s, env);
      const SparseVec& phi_next = st.terminal ? empty : boyan_features(st.next.s);
      td.observe(phi, st.reward, phi_next, alpha);
      rnd.observe(phi, st.reward, phi_next, alpha);
      pwma.observe(phi, st.reward, phi_next, alpha);
      mg.observe(phi, st.reward, phi_next, alpha);
      s = st.next;
      identical = identical && rnd.theta() == td.theta() && pwma.theta() == td.theta() &&
                  mg.theta() == td.theta();
    }
  }

  // control: the sarsa id forces p = 0 regardless of the configured p
  std::istringstream in(
      "env.name = mcar\n"
      "env.step_cap = 250\n"
      "alg.name = sarsa\n"
      "alg.p = 7\n"
      "schedule.alpha0 = 0.1\n"
      "schedule.n0 = 1000\n"
      "run.episodes = 5\n"
      "run.seeds = 5\n"
      "run.base_seed = 88\n");
  ExperimentConfig cfg = ExperimentConfig::parse(in);
  const auto sarsa = run_control(cfg, Algorithm::Sarsa);
  cfg.p = 0;
  const auto dyna0 = run_control(cfg, Algorithm::DynaControlMg);
  bool control_identical = sarsa.size() == dyna0.size();
  for (std::size_t k = 0; control_identical && k < sarsa.size(); ++k) {
    control_identical = sarsa[k].stream_hash == dyna0[k].stream_hash &&
                        sarsa[k].points.size() == dyna0[k].points.size();
    for (std::size_t p = 0; control_identical && p < sarsa[k].points.size(); ++p)
      control_identical = sarsa[k].points[p].loss == dyna0[k].points[p].loss;
  }

  return {identical && control_identical,
          fmt("policy evaluation bit-identical: %s; control bit-identical: %s",
              identical ? "yes" : "NO", control_identical ? "yes" : "NO")};
}

// ---------------------------------------------------------------------------
// 6. Chain policy-evaluation trend: best-of-grid Dyna-MG beats best-of-grid
//    TD(0) at episode 200 by at least two pooled standard errors.
// ---------------------------------------------------------------------------
struct CellResult {
  double alpha0, n0, mean, se;
};

CellResult best_cell(const ExperimentConfig& base, Algorithm alg, int jobs) {
  CellResult best{0, 0, 1e300, 0};
  for (const double a0 : {0.01, 0.1, 1.0}) {
    for (const double n0 : {100.0, 1000.0, 1e6}) {
      ExperimentConfig cfg = base;
      cfg.alpha0 = a0;
      cfg.n0 = n0;
      const auto curves = run_policy_eval(cfg, alg, jobs);
      int ok = 0;
      for (const LearningCurve& c : curves)
        if (!c.diverged) ++ok;
      if (ok < 2) continue;  // unstable cell, never the empirical best
      const AggregatedCurve agg = aggregate(curves);
      const auto& last = agg.points.back();
      if (last.mean < best.mean) best = {a0, n0, last.mean, last.stderr_mean};
    }
  }
  return best;
}

Outcome criterion_boyan_trend() {
  const auto t0 = std::chrono::steady_clock::now();
  std::istringstream in(
      "env.name = boyan\n"
      "alg.name = td0, dyna-mg\n"
      "alg.p = 1\n"
      "alg.gamma = 1\n"
      "run.episodes = 200\n"
      "run.seeds = 30\n"
      "run.base_seed = 2008\n"
      "eval.cadence = 200\n");
  const ExperimentConfig base = ExperimentConfig::parse(in);

  const CellResult td = best_cell(base, Algorithm::Td0, 2);
  const CellResult mg = best_cell(base, Algorithm::DynaMg, 2);
  const double pooled = std::sqrt(td.se * td.se + mg.se * mg.se);
  const double elapsed = seconds_since(t0);
  const bool pass = td.mean - mg.mean >= 2.0 * pooled && elapsed < 300.0;
  return {pass, fmt("td0 best (a0=%g, N0=%g): RMSE %.3f +- %.3f; dyna-mg best (a0=%g, N0=%g): "
                    "RMSE %.3f +- %.3f; margin %.3f vs 2*pooled %.3f, %.0f s (budget 300 s)",
                    td.alpha0, td.n0, td.mean, td.se, mg.alpha0, mg.n0, mg.mean, mg.se,
                    td.mean - mg.mean, 2.0 * pooled, elapsed)};
}

// ---------------------------------------------------------------------------
// 7. Mountain Car control trend: Dyna-MG control beats the Sarsa baseline over
//    episodes 1-20 by two pooled standard errors, with no separation over the
//    final 20 episodes.
// ---------------------------------------------------------------------------
struct WindowStats {
  double mean, se;
};

WindowStats window_stats(const std::vector<LearningCurve>& curves, int lo_ep, int hi_ep) {
  std::vector<double> per_seed;
  for (const LearningCurve& c : curves) {
    if (c.diverged) continue;
    double sum = 0.0;
    int count = 0;
    for (const auto& pt : c.points)
      if (pt.episode >= lo_ep && pt.episode <= hi_ep) {
        sum += pt.loss;
        ++count;
      }
    per_seed.push_back(sum / count);
  }
  const double k = static_cast<double>(per_seed.size());
  double mean = 0.0;
  for (double v : per_seed) mean += v;
  mean /= k;
  double ss = 0.0;
  for (double v : per_seed) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (k - 1.0)) / std::sqrt(k)};
}

Outcome criterion_mcar_control_trend() {
  const auto t0 = std::chrono::steady_clock::now();
  std::istringstream in(
      "env.name = mcar\n"
      "env.step_cap = 10000\n"
      "alg.name = sarsa, dyna-control-mg\n"
      "alg.p = 1\n"
      "alg.gamma = 1\n"
      "alg.epsilon = 0.1\n"
      "model.drop_tol = 1e-4\n"
      "schedule.alpha0 = 0.01\n"
      "schedule.n0 = 1000000\n"
      "run.episodes = 100\n"
      "run.seeds = 30\n"
      "run.base_seed = 331\n");
  const ExperimentConfig cfg = ExperimentConfig::parse(in);

  const auto sarsa = run_control(cfg, Algorithm::Sarsa, 2);
  const auto dyna = run_control(cfg, Algorithm::DynaControlMg, 2);

  const WindowStats s_early = window_stats(sarsa, 1, 20);
  const WindowStats d_early = window_stats(dyna, 1, 20);
  const WindowStats s_late = window_stats(sarsa, 81, 100);
  const WindowStats d_late = window_stats(dyna, 81, 100);

  const double pooled_early = std::sqrt(s_early.se * s_early.se + d_early.se * d_early.se);
  const double pooled_late = std::sqrt(s_late.se * s_late.se + d_late.se * d_late.se);
  const bool early_gap = s_early.mean - d_early.mean >= 2.0 * pooled_early;
  const bool late_tied = std::abs(s_late.mean - d_late.mean) < 2.0 * pooled_late;
  const double elapsed = seconds_since(t0);
  const bool pass = early_gap && late_tied && elapsed < 1800.0;
  return {pass,
          fmt("early steps/ep: sarsa %.0f +- %.0f vs dyna-mg %.0f +- %.0f (gap %.0f, need >= %.0f); "
              "late: %.0f +- %.0f vs %.0f +- %.0f (|diff| %.0f, need < %.0f); %.0f s (budget 1800 s)",
              s_early.mean, s_early.se, d_early.mean, d_early.se, s_early.mean - d_early.mean,
              2.0 * pooled_early, s_late.mean, s_late.se, d_late.mean, d_late.se,
              std::abs(s_late.mean - d_late.mean), 2.0 * pooled_late, elapsed)};
}

// ---------------------------------------------------------------------------
// 8. Fixed-point residual on a learned model: planning to queue exhaustion on
//    the model Dyna-MG learned from the chain drives the Bellman-style
//    residual below 1e-4.
// ---------------------------------------------------------------------------
Outcome criterion_learned_model_residual() {
  PlannerConfig cfg;
  cfg.gamma = 1.0;
  cfg.p = 1;
  DynaMgPlanner planner(kBoyanFeatureDim, cfg);
  RngStream env(606060);
  const SparseVec empty(kBoyanFeatureDim);
  for (int ep = 1; ep <= 300; ++ep) {
    const double alpha = step_size(0.1, 1000, ep);
    BoyanState s{kBoyanStartState};
    while (!s.terminal()) {
      const SparseVec phi = boyan_features(s.s);
      const BoyanStep st = boyan_step(s, env);
      const SparseVec& phi_next = st.terminal ? empty : boyan_features(st.next.s);
      planner.observe(phi, st.reward, phi_next, alpha);
      s = st.next;
    }
  }

  Theta theta = planner.theta();
  const double before = analysis::fixed_point_residual(planner.model(), theta, cfg.gamma);
  const long pops = sweep_to_exhaustion(planner.model(), theta, cfg.gamma, 1.0, 1e-9, 20000000);
  const double after = analysis::fixed_point_residual(planner.model(), theta, cfg.gamma);
  const bool pass = after < 1e-4 && before > after;
  return {pass, fmt("residual %.3g -> %.3g after %ld pops (tol 1e-4)", before, after, pops)};
}

// ---------------------------------------------------------------------------
// 9. Determinism: repeated invocations of the same run configuration produce
//    byte-identical CSV output.
// ---------------------------------------------------------------------------
Outcome criterion_determinism() {
  std::istringstream in1(
      "env.name = boyan\n"
      "alg.name = dyna-pwma\n"
      "alg.p = 3\n"
      "schedule.alpha0 = 0.1\n"
      "schedule.n0 = 1000\n"
      "run.episodes = 30\n"
      "run.seeds = 5\n"
      "run.base_seed = 12\n");
  const ExperimentConfig boyan_cfg = ExperimentConfig::parse(in1);
  const std::string a = csv_string(aggregate(run_policy_eval(boyan_cfg, Algorithm::DynaPwma, 2)));
  const std::string b = csv_string(aggregate(run_policy_eval(boyan_cfg, Algorithm::DynaPwma, 1)));

  std::istringstream in2(
      "env.name = mcar\n"
      "env.step_cap = 400\n"
      "alg.name = dyna-control-mg\n"
      "alg.p = 2\n"
      "schedule.alpha0 = 0.01\n"
      "schedule.n0 = 1000000\n"
      "run.episodes = 4\n"
      "run.seeds = 3\n"
      "run.base_seed = 13\n");
  const ExperimentConfig mcar_cfg = ExperimentConfig::parse(in2);
  const std::string c = csv_string(aggregate(run_control(mcar_cfg, Algorithm::DynaControlMg, 2)));
  const std::string d = csv_string(aggregate(run_control(mcar_cfg, Algorithm::DynaControlMg, 1)));

  const bool pass = a == b && c == d && !a.empty() && !c.empty();
  return {pass, fmt("policy-eval CSVs identical: %s; control CSVs identical: %s",
                    a == b ? "yes" : "NO", c == d ? "yes" : "NO")};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int number;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "LSTD equivalence of the model-based fixed point", criterion_lstd_equivalence},
      {2, "mu-independence of random-sampling planning", criterion_mu_independence},
      {3, "TD vs residual-gradient stability contrast", criterion_stability_contrast},
      {4, "fixed-point stationarity of both update rules", criterion_stationarity},
      {5, "p = 0 reductions are bit-identical", criterion_p0_reductions},
      {6, "chain policy-evaluation trend (Dyna-MG vs TD(0))", criterion_boyan_trend},
      {7, "Mountain Car control trend (Dyna-MG vs Sarsa)", criterion_mcar_control_trend},
      {8, "fixed-point residual on a learned model", criterion_learned_model_residual},
      {9, "byte-identical CSV output across invocations", criterion_determinism},
  };

  std::set<int> wanted;
  for (int k = 1; k < argc; ++k) wanted.insert(std::atoi(argv[k]));

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!wanted.empty() && !wanted.count(c.number)) continue;
    Outcome out{false, "threw an exception"};
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    if (!out.pass) ++failures;
    std::printf("[%s] %d. %s — %s\n", out.pass ? "PASS" : "FAIL", c.number, c.name,
                out.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
