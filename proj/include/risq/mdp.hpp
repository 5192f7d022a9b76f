#pragma once

#include "risq/discrete_dist.hpp"
#include "risq/errors.hpp"
#include "risq/random.hpp"
#include "risq/types.hpp"

#include <vector>

namespace risq {

struct PolicySpec;

/// Finite-horizon MDP over discrete states and actions. Transition row
/// (s * num_actions + a) is the distribution of the next state; the cost
/// of a transition (s, a, s') is a finite-support distribution.
struct MdpSpec {
  index_t num_states = 0;
  index_t num_actions = 0;
  matrix_t transition;             // (S*A) x S, row-stochastic
  std::vector<DiscreteDist> cost;  // S*A*S entries, point mass at 0 by default
  vector_t initial_dist;           // length S
  scalar_t gamma = 1.0;
  index_t horizon = 1;

  index_t sa_row(index_t s, index_t a) const { return s * num_actions + a; }
  index_t cost_index(index_t s, index_t a, index_t s2) const { return sa_row(s, a) * num_states + s2; }
  const DiscreteDist& cost_dist(index_t s, index_t a, index_t s2) const { return cost[cost_index(s, a, s2)]; }

  /// Throws ConfigError unless all stochastic rows sum to 1 within 1e-12,
  /// probabilities are nonnegative, cost distributions are valid, gamma is
  /// in [0, 1] and the horizon is at least 1.
  void validate() const;
};

/// Convenience constructor: all transition rows uniform, all costs zero.
MdpSpec make_mdp(index_t num_states, index_t num_actions, index_t horizon, scalar_t gamma);

struct TrajectoryStep {
  index_t state = 0;
  index_t action = 0;
  scalar_t cost = 0;
};

/// A horizon-length rollout: (state, action, realized cost) per step plus
/// the terminal state.
struct Trajectory {
  std::vector<TrajectoryStep> steps;
  index_t terminal_state = 0;
};

struct WeightedTrajectory {
  Trajectory trajectory;
  scalar_t probability = 0;
};

/// Sum of gamma^t * cost_t over the trajectory's steps.
scalar_t discounted_cost(const Trajectory& traj, scalar_t gamma);

/// One rollout under the softmax policy, consuming `rng`.
Trajectory sample_trajectory(const MdpSpec& spec, const PolicySpec& policy, const vector_t& theta,
                             RandomStream& rng);

/// m independent rollouts. Trajectory i is drawn from rng.substream(i), so
/// the batch is reproducible and independent of evaluation order.
std::vector<Trajectory> sample_batch(const MdpSpec& spec, const PolicySpec& policy, const vector_t& theta,
                                     index_t m, const RandomStream& rng);

/// Same contract, reusing the capacity of `out` across calls.
void sample_batch_into(const MdpSpec& spec, const PolicySpec& policy, const vector_t& theta, index_t m,
                       const RandomStream& rng, std::vector<Trajectory>& out);

inline constexpr index_t kDefaultEnumerationCap = 1'000'000;

/// Every trajectory of nonzero probability, with the exact probability
/// given by the chain-rule product of initial, policy, transition and cost
/// factors. Throws CapacityError when the count exceeds `cap`.
std::vector<WeightedTrajectory> enumerate_trajectories(const MdpSpec& spec, const PolicySpec& policy,
                                                       const vector_t& theta,
                                                       index_t cap = kDefaultEnumerationCap);

}  // namespace risq
