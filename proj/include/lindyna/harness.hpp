#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lindyna/features.hpp"
#include "lindyna/model.hpp"

namespace lindyna {

/// Per-episode step size: alpha0 * (N0 + 1) / (N0 + t^1.1), t being the
/// 1-based episode number. Constant within an episode.
double step_size(double alpha0, double n0, int episode);

enum class Algorithm { Td0, DynaRandom, DynaPwma, DynaMg, Sarsa, DynaControlMg };

Algorithm algorithm_from_name(const std::string& name);
std::string to_string(Algorithm alg);
bool is_control(Algorithm alg);

/// One experiment cell: environment, algorithm(s), schedule, trial layout.
/// Parsed from flat key-value text (`section.key = value`); unknown keys are
/// errors, not warnings.
struct ExperimentConfig {
  std::string env = "boyan";  // boyan | mcar
  std::vector<Algorithm> algorithms{Algorithm::Td0};

  double alpha0 = 0.1;
  double n0 = 1000.0;
  std::vector<double> alpha0_grid;  // sweep cells; empty means {alpha0}
  std::vector<double> n0_grid;

  double gamma = 1.0;
  double epsilon = 0.1;
  int p = 1;
  double model_drop_tol = 1e-8;

  int episodes = 200;
  int seeds = 30;
  std::uint64_t base_seed = 1;

  int eval_cadence = 1;      // episodes between loss measurements
  int eval_episodes = 2000;  // frozen-policy episodes in the mcar loss dataset
  std::uint64_t eval_seed = 1000003;

  int step_cap = 10000;  // mcar episode truncation
  TileCoderConfig tile;

  static ExperimentConfig parse(std::istream& in);
  static ExperimentConfig parse_file(const std::string& path);

  /// Throws ConfigError on out-of-range values or an env/algorithm mismatch.
  void validate() const;

  bool has_grid() const { return alpha0_grid.size() > 1 || n0_grid.size() > 1; }

  /// Stable hash of every field that affects results, plus the algorithm.
  std::uint64_t config_hash(Algorithm alg) const;
};

/// Loss series for one trial.
struct LearningCurve {
  struct Point {
    int episode;
    double loss;
  };
  std::vector<Point> points;
  std::string algorithm;
  std::uint64_t seed = 0;         // derived trial seed
  std::uint64_t config_hash = 0;
  std::uint64_t stream_hash = 0;  // hash of the raw transition stream observed
  bool diverged = false;
  long diverged_step = -1;
};

/// Mean and standard error across trials, diverged runs excluded and counted.
struct AggregatedCurve {
  struct Point {
    int episode;
    double mean;
    double stderr_mean;
    int n_runs;
    int n_diverged;
  };
  std::vector<Point> points;
};

/// Policy evaluation (Boyan RMSE / Mountain Car fixed-TD loss). Trajectories
/// depend only on (base seed, trial index), so every algorithm sees the same
/// streams. jobs > 1 runs trials concurrently; output is order-independent.
std::vector<LearningCurve> run_policy_eval(const ExperimentConfig& cfg, Algorithm alg,
                                           int jobs = 1);

/// Control on Mountain Car; the per-episode loss is steps to goal, with
/// truncations recorded at the cap.
std::vector<LearningCurve> run_control(const ExperimentConfig& cfg, Algorithm alg, int jobs = 1);

AggregatedCurve aggregate(const std::vector<LearningCurve>& curves);

void emit_csv(const AggregatedCurve& curve, std::ostream& out);
void emit_csv(const AggregatedCurve& curve, const std::string& path);
std::string csv_string(const AggregatedCurve& curve);

/// Frozen-policy evaluation dataset for the Mountain Car loss, generated from
/// the dedicated evaluation seed.
TransitionDataset build_mcar_eval_dataset(const ExperimentConfig& cfg);

}  // namespace lindyna
