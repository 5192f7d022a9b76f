#include "risq/envs.hpp"

#include "risq/errors.hpp"
#include "risq/grad.hpp"
#include "risq/policy.hpp"
#include "risq/risk.hpp"

#include <algorithm>
#include <map>

namespace risq {

MdpSpec make_two_arm_bandit(scalar_t safe_cost, const DiscreteDist& risky_costs) {
  risky_costs.validate();
  if (!std::isfinite(safe_cost)) throw ConfigError("two_arm_bandit: safe cost must be finite");
  MdpSpec spec = make_mdp(/*num_states=*/1, /*num_actions=*/2, /*horizon=*/1, /*gamma=*/1.0);
  spec.cost[spec.cost_index(0, 0, 0)] = DiscreteDist::point_mass(safe_cost);
  spec.cost[spec.cost_index(0, 1, 0)] = risky_costs;
  spec.validate();
  return spec;
}

MdpSpec make_risky_chain(index_t length, scalar_t branch_cost_spread, scalar_t gamma) {
  if (length < 2) throw ArgumentError("risky_chain: length must be at least 2");
  if (!(branch_cost_spread >= 0)) throw ArgumentError("risky_chain: spread must be nonnegative");
  // state 0: start; state 1: calm branch; state 2: volatile branch
  MdpSpec spec = make_mdp(/*num_states=*/3, /*num_actions=*/2, /*horizon=*/length, gamma);
  spec.initial_dist = vector_t::Zero(3);
  spec.initial_dist[0] = 1.0;
  spec.transition.setZero();
  spec.transition(spec.sa_row(0, 0), 1) = 1.0;
  spec.transition(spec.sa_row(0, 1), 2) = 1.0;
  for (index_t a = 0; a < 2; ++a) {
    spec.transition(spec.sa_row(1, a), 1) = 1.0;
    spec.transition(spec.sa_row(2, a), 2) = 1.0;
  }
  const DiscreteDist calm = DiscreteDist::point_mass(1.0);
  const DiscreteDist volatile_cost =
      branch_cost_spread == 0
          ? calm
          : DiscreteDist{{1.0 - branch_cost_spread / 2, 0.5}, {1.0 + branch_cost_spread / 2, 0.5}};
  for (index_t a = 0; a < 2; ++a) {
    for (index_t s2 = 0; s2 < 3; ++s2) {
      spec.cost[spec.cost_index(1, a, s2)] = calm;
      spec.cost[spec.cost_index(2, a, s2)] = volatile_cost;
    }
  }
  spec.validate();
  return spec;
}

DiscreteDist conditional_return_dist(const MdpSpec& spec, index_t first_action, index_t cap) {
  const PolicySpec policy = tabular_policy(spec.num_states, spec.num_actions);
  const vector_t theta = vector_t::Zero(policy.dims());
  const auto all = enumerate_trajectories(spec, policy, theta, cap);

  // collapse to the cost support, conditioning on the first action
  std::map<scalar_t, scalar_t> mass;
  scalar_t total = 0;
  for (const WeightedTrajectory& wt : all) {
    if (wt.trajectory.steps.front().action != first_action) continue;
    mass[discounted_cost(wt.trajectory, spec.gamma)] += wt.probability;
    total += wt.probability;
  }
  if (mass.empty()) throw ArgumentError("conditional_return_dist: first action has zero probability");
  vector_t values(static_cast<index_t>(mass.size()));
  vector_t probs(static_cast<index_t>(mass.size()));
  index_t i = 0;
  for (const auto& [value, p] : mass) {
    values[i] = value;
    probs[i] = p / total;
    ++i;
  }
  return DiscreteDist{std::move(values), std::move(probs)};
}

namespace {

scalar_t risk_of(const RiskSpec& risk, const DiscreteDist& dist) {
  switch (risk.kind) {
    case RiskKind::expectile:
      return exact_expectile(dist, risk.nu);
    case RiskKind::ubsr:
      return exact_ubsr(dist, risk.loss, risk.lambda);
    case RiskKind::oce:
      return exact_oce(dist, risk.loss).oce;
  }
  throw ArgumentError("risk_of: unknown risk kind");
}

// Evaluates the risk of both first actions and records which one wins.
// Orderings are recomputed from the exact oracles, never hard-coded.
RiskPreference verified_preference(const EnvCatalogEntry& entry, const RiskSpec& risk,
                                   index_t expected_action) {
  const scalar_t v0 = risk_of(risk, entry.first_action_returns[0]);
  const scalar_t v1 = risk_of(risk, entry.first_action_returns[1]);
  const index_t winner = v0 < v1 ? 0 : 1;
  if (winner != expected_action) {
    throw ConfigError("catalog entry '" + entry.name + "': documented preference for risk '" + risk.text +
                      "' does not match the exact oracle");
  }
  RiskPreference pref{risk, winner, std::min(v0, v1), std::max(v0, v1)};
  return pref;
}

EnvCatalogEntry bandit_entry() {
  EnvCatalogEntry entry;
  entry.name = "risky_safe_bandit";
  entry.description =
      "one-step bandit: arm 0 costs 1.0 always; arm 1 costs 0 with probability 0.9 and 9 with "
      "probability 0.1 (lower mean, heavy upper tail)";
  entry.mdp = make_two_arm_bandit(1.0, DiscreteDist{{0.0, 0.9}, {9.0, 0.1}});
  entry.first_action_returns = {conditional_return_dist(entry.mdp, 0),
                                conditional_return_dist(entry.mdp, 1)};
  entry.preferences = {
      verified_preference(entry, expectile_risk(0.65), 0),
      verified_preference(entry, expectile_risk(0.35), 1),
      verified_preference(entry, ubsr_risk(make_identity(), 0.0), 1),  // mean chaser takes the tail
      verified_preference(entry, ubsr_risk(make_entropic(0.5), 1.0), 0),
      verified_preference(entry, ubsr_risk(make_quadratic(1e-2), 0.5), 0),
      verified_preference(entry, oce_risk(make_cvar(0.5)), 0),
      verified_preference(entry, oce_risk(make_mean_variance(2.0)), 0),
  };
  return entry;
}

EnvCatalogEntry equal_mean_bandit_entry() {
  EnvCatalogEntry entry;
  entry.name = "equal_mean_bandit";
  entry.description =
      "one-step bandit with equal arm means: arm 0 costs 1.0 always; arm 1 costs 0 with probability "
      "0.9 and 10 with probability 0.1";
  entry.mdp = make_two_arm_bandit(1.0, DiscreteDist{{0.0, 0.9}, {10.0, 0.1}});
  entry.first_action_returns = {conditional_return_dist(entry.mdp, 0),
                                conditional_return_dist(entry.mdp, 1)};
  entry.preferences = {
      verified_preference(entry, expectile_risk(0.65), 0),
      verified_preference(entry, expectile_risk(0.35), 1),
      verified_preference(entry, ubsr_risk(make_entropic(0.5), 1.0), 0),
      verified_preference(entry, oce_risk(make_mean_variance(2.0)), 0),
  };
  return entry;
}

EnvCatalogEntry chain_entry() {
  EnvCatalogEntry entry;
  entry.name = "risky_chain_3";
  entry.description =
      "3-step chain, gamma 0.9: the first action picks the calm branch (1 per step) or the volatile "
      "branch (1 +/- 1 per step, same mean)";
  entry.mdp = make_risky_chain(3, 2.0, 0.9);
  entry.first_action_returns = {conditional_return_dist(entry.mdp, 0),
                                conditional_return_dist(entry.mdp, 1)};
  entry.preferences = {
      verified_preference(entry, expectile_risk(0.65), 0),
      verified_preference(entry, expectile_risk(0.35), 1),
      verified_preference(entry, ubsr_risk(make_entropic(0.5), 1.0), 0),
      verified_preference(entry, oce_risk(make_cvar(0.5)), 0),
  };
  return entry;
}

}  // namespace

std::vector<EnvCatalogEntry> catalog() {
  return {bandit_entry(), equal_mean_bandit_entry(), chain_entry()};
}

}  // namespace risq
