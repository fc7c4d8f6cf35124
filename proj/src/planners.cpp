#include "lindyna/planners.hpp"

#include <cmath>

namespace lindyna {

namespace {

void check_component(double x, double guard, long step, const char* who) {
  if (!(std::abs(x) <= guard)) throw DivergenceError(std::string(who) + ": parameter vector diverged", step);
}

}  // namespace

double td0_update(Theta& theta, const SparseVec& phi, double reward, const SparseVec& phi_next,
                  double gamma, double alpha, long step, double guard) {
  if (phi.dim() != theta.dim() || phi_next.dim() != theta.dim())
    throw ContractViolation("td0_update: dimension mismatch");
  const double delta = reward + gamma * theta.dot(phi_next) - theta.dot(phi);
  if (!std::isfinite(delta)) throw DivergenceError("td0_update: TD error is not finite", step);
  const double worst = theta.axpy(alpha * delta, phi);
  if (!(worst <= guard)) throw DivergenceError("td0_update: parameter vector diverged", step);
  return delta;
}

double rg_update(Theta& theta, const SparseVec& phi, double reward, const SparseVec& phi_next,
                 double gamma, double alpha, long step, double guard) {
  if (phi.dim() != theta.dim() || phi_next.dim() != theta.dim())
    throw ContractViolation("rg_update: dimension mismatch");
  const double delta = reward + gamma * theta.dot(phi_next) - theta.dot(phi);
  if (!std::isfinite(delta)) throw DivergenceError("rg_update: TD error is not finite", step);
  double worst = theta.axpy(alpha * delta, phi);
  const double back = theta.axpy(-alpha * delta * gamma, phi_next);
  if (!(worst <= guard) || !(back <= guard))
    throw DivergenceError("rg_update: parameter vector diverged", step);
  return delta;
}

MuSampler::MuSampler(int n, std::vector<double> weights) : n_(n) {
  if (n <= 0) throw ContractViolation("MuSampler: dimension must be positive");
  if (weights.empty()) return;  // uniform
  if (static_cast<int>(weights.size()) != n)
    throw ContractViolation("MuSampler: weight count must match dimension");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ContractViolation("MuSampler: negative weight");
    total += w;
  }
  if (total <= 0.0) throw ContractViolation("MuSampler: weights sum to zero");
  cumulative_.reserve(weights.size());
  double run = 0.0;
  for (double w : weights) {
    run += w / total;
    cumulative_.push_back(run);
  }
  cumulative_.back() = 1.0;
}

int MuSampler::sample(RngStream& rng) const {
  if (cumulative_.empty()) return rng.uniform_int(n_);
  const double u = rng.uniform01();
  int lo = 0, hi = n_ - 1;
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    if (cumulative_[static_cast<std::size_t>(mid)] <= u)
      lo = mid + 1;
    else
      hi = mid;
  }
  return lo;
}

double Td0Learner::observe(const SparseVec& phi, double reward, const SparseVec& phi_next,
                           double alpha) {
  ++steps_;
  return td0_update(theta_, phi, reward, phi_next, gamma_, alpha, steps_, guard_);
}

// ---------------------------------------------------------------------------
// Random-sampling Dyna
// ---------------------------------------------------------------------------

DynaRandomPlanner::DynaRandomPlanner(int dim, PlannerConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)),
      theta_(dim),
      model_(dim, cfg_.model_drop_tol),
      mu_(dim, cfg_.mu_weights),
      rng_(seed) {}

void DynaRandomPlanner::planning_update(double alpha) {
  ++planning_steps_;
  const int j = mu_.sample(rng_);
  const SparseVec sample = unit_basis(j, theta_.dim());
  auto [phi_next, reward] = model_.predict(sample);
  td0_update(theta_, sample, reward, phi_next, cfg_.gamma, alpha, planning_steps_, cfg_.theta_guard);
}

void DynaRandomPlanner::observe(const SparseVec& phi, double reward, const SparseVec& phi_next,
                                double alpha) {
  ++steps_;
  td0_update(theta_, phi, reward, phi_next, cfg_.gamma, alpha, steps_, cfg_.theta_guard);
  if (!model_frozen_) model_.update(phi, reward, phi_next, alpha);
  for (int k = 0; k < cfg_.p; ++k) planning_update(alpha);
}

void DynaRandomPlanner::plan(long updates, double alpha) {
  for (long k = 0; k < updates; ++k) planning_update(alpha);
}

// ---------------------------------------------------------------------------
// PWMA prioritized sweeping
// ---------------------------------------------------------------------------

DynaPwmaPlanner::DynaPwmaPlanner(int dim, PlannerConfig cfg)
    : cfg_(std::move(cfg)), theta_(dim), model_(dim, cfg_.model_drop_tol), queue_(dim) {}

void DynaPwmaPlanner::observe(const SparseVec& phi, double reward, const SparseVec& phi_next,
                              double alpha) {
  ++steps_;
  const double delta =
      td0_update(theta_, phi, reward, phi_next, cfg_.gamma, alpha, steps_, cfg_.theta_guard);
  if (!model_frozen_) model_.update(phi, reward, phi_next, alpha);
  // Predecessors of every observed feature go on the queue, significant or not.
  for (const Entry& pi : phi.entries()) {
    for (const Entry& e : model_.row_entries(pi.index)) {
      const double prio = std::abs(e.value * delta * pi.value);
      if (prio > cfg_.priority_threshold) queue_.push(e.index, prio);
    }
  }
  plan(cfg_.p, alpha);
}

long DynaPwmaPlanner::plan(long pops, double alpha) {
  long done = 0;
  while (done < pops && !queue_.empty()) {
    const int i = queue_.pop();
    const double delta =
        model_.b(i) + cfg_.gamma * model_.predicted_value(theta_.values(), i) - theta_[i];
    theta_[i] += alpha * delta;
    check_component(theta_[i], cfg_.theta_guard, steps_, "DynaPwmaPlanner::plan");
    for (const Entry& e : model_.row_entries(i)) {
      const double prio = std::abs(e.value * delta);
      if (prio > cfg_.priority_threshold) queue_.push(e.index, prio);
    }
    ++done;
  }
  return done;
}

// ---------------------------------------------------------------------------
// MG prioritized sweeping
// ---------------------------------------------------------------------------

DynaMgPlanner::DynaMgPlanner(int dim, PlannerConfig cfg)
    : cfg_(std::move(cfg)), theta_(dim), model_(dim, cfg_.model_drop_tol), queue_(dim) {}

void DynaMgPlanner::observe(const SparseVec& phi, double reward, const SparseVec& phi_next,
                            double alpha) {
  ++steps_;
  const double delta =
      td0_update(theta_, phi, reward, phi_next, cfg_.gamma, alpha, steps_, cfg_.theta_guard);
  if (!model_frozen_) model_.update(phi, reward, phi_next, alpha);
  for (const Entry& pi : phi.entries()) {
    const double prio = std::abs(delta * pi.value);
    if (prio > cfg_.priority_threshold) queue_.push(pi.index, prio);
  }
  plan(cfg_.p, alpha);
}

long DynaMgPlanner::plan(long pops, double alpha) {
  long done = 0;
  while (done < pops && !queue_.empty()) {
    const int i = queue_.pop();
    // Updates run in an inner loop: one pop touches every successor of i.
    for (const Entry& e : model_.row_entries(i)) {
      const int j = e.index;
      const double delta =
          model_.b(j) + cfg_.gamma * model_.predicted_value(theta_.values(), j) - theta_[j];
      theta_[j] += alpha * delta;
      check_component(theta_[j], cfg_.theta_guard, steps_, "DynaMgPlanner::plan");
      const double prio = std::abs(delta);
      if (prio > cfg_.priority_threshold) queue_.push(j, prio);
    }
    ++done;
  }
  return done;
}

// ---------------------------------------------------------------------------
// Control
// ---------------------------------------------------------------------------

int greedy_action(const Theta& theta, const ActionModelSet& models, const SparseVec& phi,
                  double gamma) {
  if (models.actions() == 0) throw ContractViolation("greedy_action: empty action set");
  int best = 0;
  double best_score = 0.0;
  for (int a = 0; a < models.actions(); ++a) {
    const LinearModel& m = models.model(a);
    double score = m.predicted_reward(phi);
    for (const Entry& e : phi.entries())
      score += gamma * e.value * m.predicted_value(theta.values(), e.index);
    if (a == 0 || score > best_score) {
      best = a;
      best_score = score;
    }
  }
  return best;
}

DynaControlPlanner::DynaControlPlanner(int dim, int n_actions, PlannerConfig cfg,
                                       std::uint64_t seed)
    : cfg_(std::move(cfg)),
      theta_(dim),
      models_(n_actions, dim, cfg_.model_drop_tol),
      queue_(dim),
      rng_(seed) {}

int DynaControlPlanner::select_action(const SparseVec& phi) {
  if (rng_.bernoulli(cfg_.epsilon)) return rng_.uniform_int(models_.actions());
  return greedy_action(theta_, models_, phi, cfg_.gamma);
}

double DynaControlPlanner::greedy_backup(int j) const {
  double best = 0.0;
  for (int a = 0; a < models_.actions(); ++a) {
    const LinearModel& m = models_.model(a);
    const double v = m.b(j) + cfg_.gamma * m.predicted_value(theta_.values(), j);
    if (a == 0 || v > best) best = v;
  }
  return best;
}

void DynaControlPlanner::observe(const SparseVec& phi, int action, double reward,
                                 const SparseVec& phi_next, double alpha) {
  ++steps_;
  const double delta =
      td0_update(theta_, phi, reward, phi_next, cfg_.gamma, alpha, steps_, cfg_.theta_guard);
  models_.model(action).update(phi, reward, phi_next, alpha);
  for (const Entry& pi : phi.entries()) {
    const double prio = std::abs(delta * pi.value);
    if (prio > cfg_.priority_threshold) queue_.push(pi.index, prio);
  }
  plan(cfg_.p, alpha);
}

long DynaControlPlanner::plan(long pops, double alpha) {
  long done = 0;
  while (done < pops && !queue_.empty()) {
    const int i = queue_.pop();
    for (int j : models_.row_union(i)) {
      const double delta = greedy_backup(j) - theta_[j];
      theta_[j] += alpha * delta;
      check_component(theta_[j], cfg_.theta_guard, steps_, "DynaControlPlanner::plan");
      const double prio = std::abs(delta);
      if (prio > cfg_.priority_threshold) queue_.push(j, prio);
    }
    ++done;
  }
  return done;
}

// ---------------------------------------------------------------------------
// Exhaustive sweep
// ---------------------------------------------------------------------------

long sweep_to_exhaustion(const LinearModel& model, Theta& theta, double gamma, double alpha,
                         double priority_threshold, long max_pops) {
  if (theta.dim() != model.dim()) throw ContractViolation("sweep_to_exhaustion: dimension mismatch");
  const int n = model.dim();
  SweepQueue queue(n);
  for (int i = 0; i < n; ++i) {
    const double delta = model.b(i) + gamma * model.predicted_value(theta.values(), i) - theta[i];
    const double prio = std::abs(delta);
    if (prio > priority_threshold) queue.push(i, prio);
  }
  long pops = 0;
  while (!queue.empty() && pops < max_pops) {
    const int i = queue.pop();
    const double delta = model.b(i) + gamma * model.predicted_value(theta.values(), i) - theta[i];
    theta[i] += alpha * delta;
    check_component(theta[i], 1e12, pops, "sweep_to_exhaustion");
    for (const Entry& e : model.row_entries(i)) {
      const double prio = std::abs(e.value * delta);
      if (prio > priority_threshold) queue.push(e.index, prio);
    }
    ++pops;
  }
  return pops;
}

}  // namespace lindyna
