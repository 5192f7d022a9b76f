#include "risq/policy.hpp"

#include "risq/errors.hpp"

#include <cmath>
#include <string>

namespace risq {

namespace {

void check_theta(const PolicySpec& policy, const vector_t& theta) {
  if (theta.size() != policy.dims()) {
    throw ConfigError("policy parameter dimension " + std::to_string(theta.size()) +
                      " does not match policy spec dimension " + std::to_string(policy.dims()));
  }
}

void check_state(const PolicySpec& policy, index_t s) {
  if (s < 0 || s >= policy.num_states) throw ArgumentError("state index out of range");
}

void check_action(const PolicySpec& policy, index_t a) {
  if (a < 0 || a >= policy.num_actions) throw ArgumentError("action index out of range");
}

}  // namespace

void PolicySpec::validate() const {
  if (num_states < 1 || num_actions < 1) throw ConfigError("policy: need at least one state and action");
  if (kind == PolicyKind::feature_softmax) {
    if (features.rows() != num_states * num_actions) {
      throw ConfigError("policy: feature matrix must have one row per (state, action)");
    }
    if (features.cols() < 1) throw ConfigError("policy: feature dimension must be positive");
    if (!features.allFinite()) throw ConfigError("policy: non-finite feature entry");
  }
}

PolicySpec tabular_policy(index_t num_states, index_t num_actions) {
  PolicySpec p;
  p.kind = PolicyKind::tabular_softmax;
  p.num_states = num_states;
  p.num_actions = num_actions;
  p.validate();
  return p;
}

PolicySpec feature_policy(index_t num_states, index_t num_actions, matrix_t features) {
  PolicySpec p{.kind = PolicyKind::feature_softmax,
               .num_states = num_states,
               .num_actions = num_actions,
               .features = std::move(features)};
  p.validate();
  return p;
}

void action_probs_into(const PolicySpec& policy, const vector_t& theta, index_t s, vector_t& out) {
  check_theta(policy, theta);
  check_state(policy, s);
  const index_t a_count = policy.num_actions;
  out.resize(a_count);
  if (policy.kind == PolicyKind::tabular_softmax) {
    out = theta.segment(s * a_count, a_count);
  } else {
    out.noalias() = policy.features.middleRows(s * a_count, a_count) * theta;
  }
  out.array() -= out.maxCoeff();
  out = out.array().exp();
  out /= out.sum();
}

vector_t action_probs(const PolicySpec& policy, const vector_t& theta, index_t s) {
  vector_t probs;
  action_probs_into(policy, theta, s, probs);
  return probs;
}

void add_log_prob_grad(const PolicySpec& policy, const vector_t& theta, index_t s, index_t a,
                       scalar_t weight, vector_t& out) {
  check_action(policy, a);
  thread_local vector_t probs;
  action_probs_into(policy, theta, s, probs);
  const index_t a_count = policy.num_actions;
  if (policy.kind == PolicyKind::tabular_softmax) {
    out.segment(s * a_count, a_count) -= weight * probs;
    out[s * a_count + a] += weight;
  } else {
    out += weight * policy.features.row(s * a_count + a).transpose();
    out.noalias() -= weight * (policy.features.middleRows(s * a_count, a_count).transpose() * probs);
  }
}

vector_t log_prob_grad(const PolicySpec& policy, const vector_t& theta, index_t s, index_t a) {
  vector_t g = vector_t::Zero(policy.dims());
  add_log_prob_grad(policy, theta, s, a, 1.0, g);
  return g;
}

void add_score(const PolicySpec& policy, const vector_t& theta, const Trajectory& traj, scalar_t weight,
               vector_t& out) {
  for (const TrajectoryStep& step : traj.steps) {
    add_log_prob_grad(policy, theta, step.state, step.action, weight, out);
  }
}

vector_t score(const PolicySpec& policy, const vector_t& theta, const Trajectory& traj) {
  vector_t g = vector_t::Zero(policy.dims());
  add_score(policy, theta, traj, 1.0, g);
  return g;
}

}  // namespace risq
