#include "lindyna/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <thread>

#include "lindyna/analysis.hpp"
#include "lindyna/envs.hpp"
#include "lindyna/errors.hpp"
#include "lindyna/planners.hpp"

namespace lindyna {

namespace {

constexpr std::uint64_t kEnvStream = 1;
constexpr std::uint64_t kPlannerStream = 2;
constexpr std::uint64_t kPolicyStream = 3;

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void hash_mix(std::uint64_t& h, std::uint64_t x) {
  for (int k = 0; k < 8; ++k) {
    h ^= (x >> (8 * k)) & 0xff;
    h *= kFnvPrime;
  }
}

void hash_mix(std::uint64_t& h, double x) { hash_mix(h, std::bit_cast<std::uint64_t>(x)); }

void hash_mix(std::uint64_t& h, const std::string& s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= kFnvPrime;
  }
}

void hash_mix(std::uint64_t& h, const SparseVec& v) {
  hash_mix(h, static_cast<std::uint64_t>(v.nnz()));
  for (const Entry& e : v.entries()) {
    hash_mix(h, static_cast<std::uint64_t>(e.index));
    hash_mix(h, e.value);
  }
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for " + key + ": '" + value + "'");
  }
}

long parse_long(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad integer value for " + key + ": '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad seed value for " + key + ": '" + value + "'");
  }
}

PlannerConfig planner_config(const ExperimentConfig& cfg, Algorithm alg) {
  PlannerConfig pc;
  pc.gamma = cfg.gamma;
  pc.p = alg == Algorithm::Sarsa ? 0 : cfg.p;
  pc.epsilon = cfg.epsilon;
  pc.model_drop_tol = cfg.model_drop_tol;
  return pc;
}

// Uniform interface over the policy-evaluation learners.
struct EvalAgent {
  virtual ~EvalAgent() = default;
  virtual void observe(const SparseVec& phi, double r, const SparseVec& phi_next, double alpha) = 0;
  virtual const Theta& theta() const = 0;
};

template <class Learner>
struct EvalAgentImpl final : EvalAgent {
  template <class... Args>
  explicit EvalAgentImpl(Args&&... args) : learner(std::forward<Args>(args)...) {}
  void observe(const SparseVec& phi, double r, const SparseVec& phi_next, double alpha) override {
    learner.observe(phi, r, phi_next, alpha);
  }
  const Theta& theta() const override { return learner.theta(); }
  Learner learner;
};

std::unique_ptr<EvalAgent> make_eval_agent(Algorithm alg, int dim, const PlannerConfig& pc,
                                           std::uint64_t planner_seed) {
  switch (alg) {
    case Algorithm::Td0:
      return std::make_unique<EvalAgentImpl<Td0Learner>>(dim, pc.gamma, pc.theta_guard);
    case Algorithm::DynaRandom:
      return std::make_unique<EvalAgentImpl<DynaRandomPlanner>>(dim, pc, planner_seed);
    case Algorithm::DynaPwma:
      return std::make_unique<EvalAgentImpl<DynaPwmaPlanner>>(dim, pc);
    case Algorithm::DynaMg:
      return std::make_unique<EvalAgentImpl<DynaMgPlanner>>(dim, pc);
    default:
      throw ConfigError("algorithm " + to_string(alg) + " is not a policy-evaluation method");
  }
}

template <class TrialFn>
std::vector<LearningCurve> run_trials(int seeds, int jobs, TrialFn&& trial) {
  std::vector<LearningCurve> out(static_cast<std::size_t>(seeds));
  if (jobs <= 1) {
    for (int i = 0; i < seeds; ++i) out[static_cast<std::size_t>(i)] = trial(i);
    return out;
  }
  std::atomic<int> next{0};
  auto worker = [&] {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= seeds) return;
      out[static_cast<std::size_t>(i)] = trial(i);
    }
  };
  std::vector<std::thread> pool;
  const int k = std::min(jobs, seeds);
  pool.reserve(static_cast<std::size_t>(k));
  for (int t = 0; t < k; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return out;
}

LearningCurve run_policy_eval_trial(const ExperimentConfig& cfg, Algorithm alg, int trial_idx,
                                    const TileCoder* coder, const TransitionDataset* eval_data) {
  const bool boyan = cfg.env == "boyan";
  const int dim = boyan ? kBoyanFeatureDim : coder->dim();
  const std::uint64_t trial_seed = RngStream::derive(cfg.base_seed, static_cast<std::uint64_t>(trial_idx));
  RngStream env_rng(RngStream::derive(trial_seed, kEnvStream));
  const PlannerConfig pc = planner_config(cfg, alg);
  auto agent = make_eval_agent(alg, dim, pc, RngStream::derive(trial_seed, kPlannerStream));

  LearningCurve curve;
  curve.algorithm = to_string(alg);
  curve.seed = trial_seed;
  curve.config_hash = cfg.config_hash(alg);
  std::uint64_t shash = kFnvOffset;

  auto loss = [&] {
    return boyan ? analysis::rmse_vs_true(agent->theta())
                 : analysis::td_fixed_loss(*eval_data, agent->theta(), cfg.gamma);
  };
  curve.points.push_back({0, loss()});

  const SparseVec empty(dim);
  for (int ep = 1; ep <= cfg.episodes && !curve.diverged; ++ep) {
    const double alpha = step_size(cfg.alpha0, cfg.n0, ep);
    try {
      if (boyan) {
        BoyanState s{kBoyanStartState};
        while (!s.terminal()) {
          const SparseVec phi = boyan_features(s.s);
          const BoyanStep st = boyan_step(s, env_rng);
          const SparseVec& phi_next = st.terminal ? empty : boyan_features(st.next.s);
          hash_mix(shash, phi);
          hash_mix(shash, st.reward);
          hash_mix(shash, phi_next);
          agent->observe(phi, st.reward, phi_next, alpha);
          s = st.next;
        }
      } else {
        MCarState s;
        for (int step = 0; step < cfg.step_cap && !s.terminal(); ++step) {
          const SparseVec phi = coder->encode(s.position, s.velocity);
          const int a = mcar_eval_policy(s, env_rng);
          const MCarStep st = mcar_step(s, a);
          const SparseVec phi_next =
              st.terminal ? empty : coder->encode(st.next.position, st.next.velocity);
          hash_mix(shash, phi);
          hash_mix(shash, st.reward);
          hash_mix(shash, phi_next);
          agent->observe(phi, st.reward, phi_next, alpha);
          s = st.next;
        }
      }
    } catch (const DivergenceError& e) {
      curve.diverged = true;
      curve.diverged_step = e.step();
      break;
    }
    if (ep % cfg.eval_cadence == 0) curve.points.push_back({ep, loss()});
  }
  curve.stream_hash = shash;
  return curve;
}

LearningCurve run_control_trial(const ExperimentConfig& cfg, Algorithm alg, int trial_idx,
                                const TileCoder& coder) {
  const int dim = coder.dim();
  const std::uint64_t trial_seed = RngStream::derive(cfg.base_seed, static_cast<std::uint64_t>(trial_idx));
  const PlannerConfig pc = planner_config(cfg, alg);
  DynaControlPlanner agent(dim, kMcarActions, pc, RngStream::derive(trial_seed, kPolicyStream));

  LearningCurve curve;
  curve.algorithm = to_string(alg);
  curve.seed = trial_seed;
  curve.config_hash = cfg.config_hash(alg);
  std::uint64_t shash = kFnvOffset;

  const SparseVec empty(dim);
  for (int ep = 1; ep <= cfg.episodes && !curve.diverged; ++ep) {
    const double alpha = step_size(cfg.alpha0, cfg.n0, ep);
    MCarState s;
    int steps = 0;
    try {
      while (steps < cfg.step_cap && !s.terminal()) {
        const SparseVec phi = coder.encode(s.position, s.velocity);
        const int a = agent.select_action(phi);
        const MCarStep st = mcar_step(s, a);
        const SparseVec phi_next =
            st.terminal ? empty : coder.encode(st.next.position, st.next.velocity);
        hash_mix(shash, phi);
        hash_mix(shash, static_cast<std::uint64_t>(a));
        hash_mix(shash, st.reward);
        agent.observe(phi, a, st.reward, phi_next, alpha);
        s = st.next;
        ++steps;
      }
      curve.points.push_back({ep, static_cast<double>(steps)});
    } catch (const DivergenceError& e) {
      curve.diverged = true;
      curve.diverged_step = e.step();
    }
  }
  curve.stream_hash = shash;
  return curve;
}

}  // namespace

double step_size(double alpha0, double n0, int episode) {
  if (!(alpha0 > 0.0) || !(n0 > 0.0) || episode < 1)
    throw ContractViolation("step_size: need alpha0 > 0, N0 > 0, episode >= 1");
  return alpha0 * (n0 + 1.0) / (n0 + std::pow(static_cast<double>(episode), 1.1));
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "td0") return Algorithm::Td0;
  if (name == "dyna-random") return Algorithm::DynaRandom;
  if (name == "dyna-pwma") return Algorithm::DynaPwma;
  if (name == "dyna-mg") return Algorithm::DynaMg;
  if (name == "sarsa") return Algorithm::Sarsa;
  if (name == "dyna-control-mg") return Algorithm::DynaControlMg;
  throw ConfigError("unknown algorithm '" + name + "'");
}

std::string to_string(Algorithm alg) {
  switch (alg) {
    case Algorithm::Td0: return "td0";
    case Algorithm::DynaRandom: return "dyna-random";
    case Algorithm::DynaPwma: return "dyna-pwma";
    case Algorithm::DynaMg: return "dyna-mg";
    case Algorithm::Sarsa: return "sarsa";
    case Algorithm::DynaControlMg: return "dyna-control-mg";
  }
  throw ConfigError("unknown algorithm id");
}

bool is_control(Algorithm alg) {
  return alg == Algorithm::Sarsa || alg == Algorithm::DynaControlMg;
}

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
  ExperimentConfig cfg;
  cfg.algorithms.clear();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty value for " + key);

    if (key == "env.name") {
      cfg.env = value;
    } else if (key == "env.step_cap") {
      cfg.step_cap = static_cast<int>(parse_long(key, value));
    } else if (key == "alg.name") {
      for (const std::string& name : split_list(value))
        cfg.algorithms.push_back(algorithm_from_name(name));
    } else if (key == "alg.p") {
      cfg.p = static_cast<int>(parse_long(key, value));
    } else if (key == "alg.gamma") {
      cfg.gamma = parse_double(key, value);
    } else if (key == "alg.epsilon") {
      cfg.epsilon = parse_double(key, value);
    } else if (key == "model.drop_tol") {
      cfg.model_drop_tol = parse_double(key, value);
    } else if (key == "schedule.alpha0") {
      cfg.alpha0_grid.clear();
      for (const std::string& v : split_list(value)) cfg.alpha0_grid.push_back(parse_double(key, v));
      if (cfg.alpha0_grid.empty()) throw ConfigError("empty list for schedule.alpha0");
      cfg.alpha0 = cfg.alpha0_grid.front();
    } else if (key == "schedule.n0") {
      cfg.n0_grid.clear();
      for (const std::string& v : split_list(value)) cfg.n0_grid.push_back(parse_double(key, v));
      if (cfg.n0_grid.empty()) throw ConfigError("empty list for schedule.n0");
      cfg.n0 = cfg.n0_grid.front();
    } else if (key == "run.episodes") {
      cfg.episodes = static_cast<int>(parse_long(key, value));
    } else if (key == "run.seeds") {
      cfg.seeds = static_cast<int>(parse_long(key, value));
    } else if (key == "run.base_seed") {
      cfg.base_seed = parse_u64(key, value);
    } else if (key == "eval.cadence") {
      cfg.eval_cadence = static_cast<int>(parse_long(key, value));
    } else if (key == "eval.episodes") {
      cfg.eval_episodes = static_cast<int>(parse_long(key, value));
    } else if (key == "eval.seed") {
      cfg.eval_seed = parse_u64(key, value);
    } else if (key == "features.tilings") {
      cfg.tile.tilings = static_cast<int>(parse_long(key, value));
    } else if (key == "features.grid") {
      cfg.tile.grid = static_cast<int>(parse_long(key, value));
    } else if (key == "features.hash_dim") {
      cfg.tile.hash_dim = static_cast<int>(parse_long(key, value));
    } else if (key == "features.seed") {
      cfg.tile.seed = parse_u64(key, value);
    } else {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  if (cfg.algorithms.empty()) cfg.algorithms = {Algorithm::Td0};
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  return parse(in);
}

void ExperimentConfig::validate() const {
  if (env != "boyan" && env != "mcar") throw ConfigError("env.name must be boyan or mcar");
  if (algorithms.empty()) throw ConfigError("no algorithms configured");
  auto check_positive = [](double v, const char* what) {
    if (!(v > 0.0)) throw ConfigError(std::string(what) + " must be positive");
  };
  check_positive(alpha0, "schedule.alpha0");
  check_positive(n0, "schedule.n0");
  for (double a : alpha0_grid) check_positive(a, "schedule.alpha0");
  for (double n : n0_grid) check_positive(n, "schedule.n0");
  if (gamma < 0.0 || gamma > 1.0) throw ConfigError("alg.gamma must lie in [0, 1]");
  if (epsilon < 0.0 || epsilon > 1.0) throw ConfigError("alg.epsilon must lie in [0, 1]");
  if (p < 0) throw ConfigError("alg.p must be >= 0");
  if (model_drop_tol < 0.0) throw ConfigError("model.drop_tol must be >= 0");
  if (episodes < 1) throw ConfigError("run.episodes must be >= 1");
  if (seeds < 1) throw ConfigError("run.seeds must be >= 1");
  if (eval_cadence < 1) throw ConfigError("eval.cadence must be >= 1");
  if (eval_episodes < 1) throw ConfigError("eval.episodes must be >= 1");
  if (step_cap < 1) throw ConfigError("env.step_cap must be >= 1");
  if (tile.tilings < 1 || tile.grid < 1 || tile.hash_dim < 1)
    throw ConfigError("features.* must be positive");
  for (Algorithm alg : algorithms)
    if (is_control(alg) && env != "mcar")
      throw ConfigError("control algorithm " + to_string(alg) + " requires env.name = mcar");
}

std::uint64_t ExperimentConfig::config_hash(Algorithm alg) const {
  std::uint64_t h = kFnvOffset;
  hash_mix(h, env);
  hash_mix(h, to_string(alg));
  hash_mix(h, alpha0);
  hash_mix(h, n0);
  hash_mix(h, gamma);
  hash_mix(h, epsilon);
  hash_mix(h, static_cast<std::uint64_t>(p));
  hash_mix(h, model_drop_tol);
  hash_mix(h, static_cast<std::uint64_t>(episodes));
  hash_mix(h, static_cast<std::uint64_t>(seeds));
  hash_mix(h, base_seed);
  hash_mix(h, static_cast<std::uint64_t>(eval_cadence));
  hash_mix(h, static_cast<std::uint64_t>(eval_episodes));
  hash_mix(h, eval_seed);
  hash_mix(h, static_cast<std::uint64_t>(step_cap));
  hash_mix(h, static_cast<std::uint64_t>(tile.tilings));
  hash_mix(h, static_cast<std::uint64_t>(tile.grid));
  hash_mix(h, static_cast<std::uint64_t>(tile.hash_dim));
  hash_mix(h, tile.seed);
  return h;
}

TransitionDataset build_mcar_eval_dataset(const ExperimentConfig& cfg) {
  const TileCoder coder(cfg.tile);
  TransitionDataset data(coder.dim());
  RngStream rng(RngStream::derive(cfg.eval_seed, kEnvStream));
  const SparseVec empty(coder.dim());
  for (int ep = 0; ep < cfg.eval_episodes; ++ep) {
    MCarState s;
    for (int step = 0; step < cfg.step_cap && !s.terminal(); ++step) {
      const SparseVec phi = coder.encode(s.position, s.velocity);
      const int a = mcar_eval_policy(s, rng);
      const MCarStep st = mcar_step(s, a);
      const SparseVec phi_next =
          st.terminal ? empty : coder.encode(st.next.position, st.next.velocity);
      data.add(phi, st.reward, phi_next);
      s = st.next;
    }
  }
  return data;
}

std::vector<LearningCurve> run_policy_eval(const ExperimentConfig& cfg, Algorithm alg, int jobs) {
  cfg.validate();
  if (is_control(alg)) throw ConfigError("run_policy_eval: " + to_string(alg) + " is a control algorithm");
  if (cfg.env == "boyan") {
    return run_trials(cfg.seeds, jobs,
                      [&](int i) { return run_policy_eval_trial(cfg, alg, i, nullptr, nullptr); });
  }
  const TileCoder coder(cfg.tile);
  const TransitionDataset eval_data = build_mcar_eval_dataset(cfg);
  return run_trials(cfg.seeds, jobs,
                    [&](int i) { return run_policy_eval_trial(cfg, alg, i, &coder, &eval_data); });
}

std::vector<LearningCurve> run_control(const ExperimentConfig& cfg, Algorithm alg, int jobs) {
  cfg.validate();
  if (!is_control(alg)) throw ConfigError("run_control: " + to_string(alg) + " is not a control algorithm");
  if (cfg.env != "mcar") throw ConfigError("run_control: control requires env.name = mcar");
  const TileCoder coder(cfg.tile);
  return run_trials(cfg.seeds, jobs, [&](int i) { return run_control_trial(cfg, alg, i, coder); });
}

AggregatedCurve aggregate(const std::vector<LearningCurve>& curves) {
  if (curves.size() < 2) throw ContractViolation("aggregate: need at least two curves");
  std::vector<const LearningCurve*> kept;
  int diverged = 0;
  for (const LearningCurve& c : curves) {
    if (c.diverged)
      ++diverged;
    else
      kept.push_back(&c);
  }
  if (kept.size() < 2) throw ContractViolation("aggregate: fewer than two non-diverged curves");
  const std::size_t npts = kept.front()->points.size();
  for (const LearningCurve* c : kept) {
    if (c->points.size() != npts) throw ContractViolation("aggregate: mismatched evaluation points");
    for (std::size_t k = 0; k < npts; ++k)
      if (c->points[k].episode != kept.front()->points[k].episode)
        throw ContractViolation("aggregate: mismatched evaluation points");
  }

  AggregatedCurve out;
  out.points.reserve(npts);
  const double k = static_cast<double>(kept.size());
  for (std::size_t pt = 0; pt < npts; ++pt) {
    double mean = 0.0;
    for (const LearningCurve* c : kept) mean += c->points[pt].loss;
    mean /= k;
    double ss = 0.0;
    for (const LearningCurve* c : kept) {
      const double d = c->points[pt].loss - mean;
      ss += d * d;
    }
    const double stderr_mean = std::sqrt(ss / (k - 1.0)) / std::sqrt(k);
    out.points.push_back({kept.front()->points[pt].episode, mean, stderr_mean,
                          static_cast<int>(kept.size()), diverged});
  }
  return out;
}

void emit_csv(const AggregatedCurve& curve, std::ostream& out) {
  out << "episode,mean,stderr,n_runs,n_diverged\n";
  char buf[128];
  for (const AggregatedCurve::Point& p : curve.points) {
    std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g,%d,%d\n", p.episode, p.mean, p.stderr_mean,
                  p.n_runs, p.n_diverged);
    out << buf;
  }
  if (!out) throw IoError("emit_csv: write failure");
}

void emit_csv(const AggregatedCurve& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("emit_csv: cannot open for writing: " + path);
  emit_csv(curve, out);
}

std::string csv_string(const AggregatedCurve& curve) {
  std::ostringstream out;
  emit_csv(curve, out);
  return out.str();
}

}  // namespace lindyna
