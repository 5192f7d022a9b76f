#pragma once

#include "risq/mdp.hpp"
#include "risq/types.hpp"

namespace risq {

enum class PolicyKind { tabular_softmax, feature_softmax };

/// Softmax policy parameterization. Tabular: one logit per (s, a), theta
/// laid out state-major (theta[s * A + a]). Feature: logit(s, a) =
/// <theta, phi(s, a)> with phi rows stored state-major in `features`.
struct PolicySpec {
  PolicyKind kind = PolicyKind::tabular_softmax;
  index_t num_states = 0;
  index_t num_actions = 0;
  matrix_t features;  // (S*A) x d, feature_softmax only

  index_t dims() const {
    return kind == PolicyKind::tabular_softmax ? num_states * num_actions : features.cols();
  }
  void validate() const;
};

PolicySpec tabular_policy(index_t num_states, index_t num_actions);
PolicySpec feature_policy(index_t num_states, index_t num_actions, matrix_t features);

/// Softmax action distribution at state s. Entries are positive and sum
/// to 1; logits are shifted by their maximum before exponentiation.
vector_t action_probs(const PolicySpec& policy, const vector_t& theta, index_t s);

/// Same, writing into a caller-owned buffer (resized as needed). Hot loops
/// use this to avoid per-call allocation.
void action_probs_into(const PolicySpec& policy, const vector_t& theta, index_t s, vector_t& out);

/// Gradient of log pi_theta(a | s). Tabular closed form: entry (s, b) is
/// 1{b = a} - pi(b | s), other states zero. Feature form:
/// phi(s, a) - sum_b pi(b | s) phi(s, b).
vector_t log_prob_grad(const PolicySpec& policy, const vector_t& theta, index_t s, index_t a);

/// out += weight * grad log pi_theta(a | s). Allocation-free inner loop for
/// batch estimators.
void add_log_prob_grad(const PolicySpec& policy, const vector_t& theta, index_t s, index_t a,
                       scalar_t weight, vector_t& out);

/// Score of a trajectory: the sum of per-step log-probability gradients.
vector_t score(const PolicySpec& policy, const vector_t& theta, const Trajectory& traj);

/// out += weight * score(traj).
void add_score(const PolicySpec& policy, const vector_t& theta, const Trajectory& traj, scalar_t weight,
               vector_t& out);

}  // namespace risq
