#pragma once

#include <cstdint>
#include <vector>

#include "lindyna/model.hpp"
#include "lindyna/rng.hpp"
#include "lindyna/sweep_queue.hpp"
#include "lindyna/theta.hpp"

namespace lindyna {

/// Shared planner knobs. The step size itself is passed per call: the
/// schedule lives in the harness and is constant within an episode.
struct PlannerConfig {
  double gamma = 1.0;
  int p = 1;                        // planning updates per real step
  double epsilon = 0.1;             // exploration rate (control only)
  std::vector<double> mu_weights;   // sampling weights over basis indices; empty = uniform
  double priority_threshold = 1e-9; // queue pushes at or below this are discarded
  double theta_guard = 1e12;        // |theta_i| beyond this trips DivergenceError
  double model_drop_tol = 1e-8;     // sparsity tolerance of the learned model
};

/// TD(0): theta += alpha * delta * phi with delta = r + gamma theta'phi' - theta'phi.
/// Returns delta. Throws DivergenceError if the update leaves theta non-finite
/// or past the guard.
double td0_update(Theta& theta, const SparseVec& phi, double reward, const SparseVec& phi_next,
                  double gamma, double alpha, long step = -1, double guard = 1e12);

/// Residual gradient: same delta, update direction (phi - gamma phi').
double rg_update(Theta& theta, const SparseVec& phi, double reward, const SparseVec& phi_next,
                 double gamma, double alpha, long step = -1, double guard = 1e12);

/// Draws basis indices for random-sampling planning.
class MuSampler {
 public:
  MuSampler(int n, std::vector<double> weights);
  int sample(RngStream& rng) const;

 private:
  int n_;
  std::vector<double> cumulative_;  // empty = uniform
};

/// Plain TD(0) learner on real experience; the p = 0 reference for the Dyna
/// planners.
class Td0Learner {
 public:
  Td0Learner(int dim, double gamma, double guard = 1e12)
      : theta_(dim), gamma_(gamma), guard_(guard) {}

  double observe(const SparseVec& phi, double reward, const SparseVec& phi_next, double alpha);

  const Theta& theta() const { return theta_; }
  Theta& theta() { return theta_; }
  long steps() const { return steps_; }

 private:
  Theta theta_;
  double gamma_;
  double guard_;
  long steps_ = 0;
};

/// Dyna with random-sampling planning: after the real TD(0) and model
/// updates, performs p planning updates on unit basis vectors drawn from mu.
class DynaRandomPlanner {
 public:
  DynaRandomPlanner(int dim, PlannerConfig cfg, std::uint64_t seed);

  void observe(const SparseVec& phi, double reward, const SparseVec& phi_next, double alpha);

  /// Planning only: runs extra model-generated updates at the given step size.
  void plan(long updates, double alpha);

  const Theta& theta() const { return theta_; }
  Theta& theta() { return theta_; }
  LinearModel& model() { return model_; }
  const LinearModel& model() const { return model_; }
  void freeze_model(bool frozen) { model_frozen_ = frozen; }
  long steps() const { return steps_; }

 private:
  void planning_update(double alpha);

  PlannerConfig cfg_;
  Theta theta_;
  LinearModel model_;
  MuSampler mu_;
  RngStream rng_;
  bool model_frozen_ = false;
  long steps_ = 0;
  long planning_steps_ = 0;
};

/// Dyna with PWMA prioritized sweeping: every observed feature seeds its
/// predecessors onto the queue; each planning pop updates one component and
/// re-seeds its predecessors.
class DynaPwmaPlanner {
 public:
  DynaPwmaPlanner(int dim, PlannerConfig cfg);

  void observe(const SparseVec& phi, double reward, const SparseVec& phi_next, double alpha);

  /// Planning only: up to `pops` queue-driven updates; stops when the queue
  /// empties. Returns the number of pops performed.
  long plan(long pops, double alpha);

  const Theta& theta() const { return theta_; }
  Theta& theta() { return theta_; }
  LinearModel& model() { return model_; }
  const LinearModel& model() const { return model_; }
  SweepQueue& queue() { return queue_; }
  const SweepQueue& queue() const { return queue_; }
  void freeze_model(bool frozen) { model_frozen_ = frozen; }
  long steps() const { return steps_; }

 private:
  PlannerConfig cfg_;
  Theta theta_;
  LinearModel model_;
  SweepQueue queue_;
  bool model_frozen_ = false;
  long steps_ = 0;
};

/// Dyna with MG prioritized sweeping: observed features queue themselves;
/// each planning pop updates every successor component of the popped feature
/// (the updates sit in an inner loop).
class DynaMgPlanner {
 public:
  DynaMgPlanner(int dim, PlannerConfig cfg);

  void observe(const SparseVec& phi, double reward, const SparseVec& phi_next, double alpha);

  long plan(long pops, double alpha);

  const Theta& theta() const { return theta_; }
  Theta& theta() { return theta_; }
  LinearModel& model() { return model_; }
  const LinearModel& model() const { return model_; }
  SweepQueue& queue() { return queue_; }
  const SweepQueue& queue() const { return queue_; }
  void freeze_model(bool frozen) { model_frozen_ = frozen; }
  long steps() const { return steps_; }

 private:
  PlannerConfig cfg_;
  Theta theta_;
  LinearModel model_;
  SweepQueue queue_;
  bool model_frozen_ = false;
  long steps_ = 0;
};

/// Greedy action under per-action models: argmax_a [b_a'phi + gamma theta'(F_a phi)],
/// ties broken by the lowest action index.
int greedy_action(const Theta& theta, const ActionModelSet& models, const SparseVec& phi,
                  double gamma);

/// Control Dyna (MG prioritized sweeping with per-action models). With p = 0
/// this is the model-free Sarsa-style baseline: the model still drives action
/// selection, but all value updates come from real experience.
class DynaControlPlanner {
 public:
  DynaControlPlanner(int dim, int n_actions, PlannerConfig cfg, std::uint64_t seed);

  /// Epsilon-greedy action for the current features.
  int select_action(const SparseVec& phi);

  /// One loop body after the environment transition: real TD(0) update,
  /// model update for the taken action, queue seeding and planning.
  void observe(const SparseVec& phi, int action, double reward, const SparseVec& phi_next,
               double alpha);

  long plan(long pops, double alpha);

  const Theta& theta() const { return theta_; }
  Theta& theta() { return theta_; }
  ActionModelSet& models() { return models_; }
  const ActionModelSet& models() const { return models_; }
  SweepQueue& queue() { return queue_; }
  long steps() const { return steps_; }

 private:
  double greedy_backup(int j) const;  // max_a [b_a(j) + gamma theta'(F_a e_j)]

  PlannerConfig cfg_;
  Theta theta_;
  ActionModelSet models_;
  SweepQueue queue_;
  RngStream rng_;
  long steps_ = 0;
};

/// Queue-exhaustive value sweep on a frozen model: seeds every index with its
/// current TD error magnitude, then pops until the queue drains (pushes at or
/// below the threshold are discarded) or max_pops is hit. Each pop applies
/// theta(i) += alpha * (b(i) + gamma theta'(F e_i) - theta(i)) and re-seeds
/// the popped component's predecessors. Returns the number of pops.
long sweep_to_exhaustion(const LinearModel& model, Theta& theta, double gamma, double alpha,
                         double priority_threshold = 1e-9, long max_pops = 100000000);

}  // namespace lindyna
