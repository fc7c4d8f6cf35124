#include "lindyna/envs.hpp"

#include <algorithm>
#include <cmath>

namespace lindyna {

BoyanStep boyan_step(BoyanState state, RngStream& rng) {
  if (state.terminal()) throw ContractViolation("boyan_step: step from terminal state");
  if (state.s > 2) {
    const int next = rng.bernoulli(0.5) ? state.s - 1 : state.s - 2;
    return {{next}, -3.0, false};
  }
  if (state.s == 2) return {{1}, -2.0, false};
  return {{0}, 0.0, true};  // s == 1
}

double boyan_true_value(int s) {
  if (s < 0 || s >= kBoyanStateCount)
    throw ContractViolation("boyan_true_value: state out of range");
  return s == 0 ? 0.0 : -2.0 * (s - 1);
}

MCarStep mcar_step(MCarState state, int action) {
  if (state.terminal()) throw ContractViolation("mcar_step: step from terminal state");
  if (action < 0 || action >= kMcarActions) throw ContractViolation("mcar_step: bad action");
  double v = state.velocity + 0.001 * (action - 1) - 0.0025 * std::cos(3.0 * state.position);
  v = std::clamp(v, -kMcarMaxVel, kMcarMaxVel);
  double p = state.position + v;
  if (p < kMcarMinPos) {
    p = kMcarMinPos;
    v = 0.0;  // inelastic left wall
  } else if (p > kMcarMaxPos) {
    p = kMcarMaxPos;
  }
  MCarState next{p, v};
  return {next, -1.0, next.terminal()};
}

int mcar_eval_policy(const MCarState& state, RngStream& rng) {
  if (rng.bernoulli(0.1)) return rng.uniform_int(kMcarActions);
  return state.velocity < 0.0 ? 0 : 2;
}

}  // namespace lindyna
