#pragma once

#include "lindyna/features.hpp"
#include "lindyna/rng.hpp"
#include "lindyna/sparse_vec.hpp"

namespace lindyna {

// ---------------------------------------------------------------------------
// Boyan Chain: states 98..0, terminal at 0. From s > 2 the chain moves to
// s-1 or s-2 with equal probability and reward -3; 2 -> 1 pays -2, 1 -> 0
// pays 0. Undiscounted.
// ---------------------------------------------------------------------------

struct BoyanState {
  int s = kBoyanStartState;
  bool terminal() const { return s == 0; }
};

struct BoyanStep {
  BoyanState next;
  double reward;
  bool terminal;
};

BoyanStep boyan_step(BoyanState state, RngStream& rng);

/// Exact undiscounted value: V(0) = 0, V(s) = -2(s - 1) for s >= 1.
double boyan_true_value(int s);

// ---------------------------------------------------------------------------
// Mountain Car, standard constants. Actions: 0 reverse, 1 coast, 2 forward.
// ---------------------------------------------------------------------------

inline constexpr double kMcarMinPos = -1.2;
inline constexpr double kMcarMaxPos = 0.5;   // also the goal position
inline constexpr double kMcarMaxVel = 0.07;
inline constexpr double kMcarStartPos = -0.5;
inline constexpr int kMcarActions = 3;

struct MCarState {
  double position = kMcarStartPos;
  double velocity = 0.0;
  bool terminal() const { return position >= kMcarMaxPos; }
};

struct MCarStep {
  MCarState next;
  double reward;
  bool terminal;
};

MCarStep mcar_step(MCarState state, int action);

/// Fixed evaluation policy: accelerate in the direction of the current
/// velocity (forward on a zero-velocity tie), replaced by a uniformly random
/// action with 10% probability.
int mcar_eval_policy(const MCarState& state, RngStream& rng);

}  // namespace lindyna
