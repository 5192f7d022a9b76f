#pragma once

#include "risq/discrete_dist.hpp"
#include "risq/mdp.hpp"
#include "risq/risk_spec.hpp"
#include "risq/types.hpp"

#include <string>
#include <vector>

namespace risq {

/// T = 1, one state, two actions: action 0 incurs `safe_cost`
/// deterministically, action 1 draws from `risky_costs`.
MdpSpec make_two_arm_bandit(scalar_t safe_cost, const DiscreteDist& risky_costs);

/// A `length`-step chain. The first action selects one of two absorbing
/// branches: branch 0 pays 1 per step deterministically, branch 1 pays
/// 1 +/- spread/2 with equal probability. Both branches have the same mean
/// per-step cost, so only dispersion separates them. The first step is
/// free.
MdpSpec make_risky_chain(index_t length, scalar_t branch_cost_spread, scalar_t gamma);

/// One documented, oracle-verified risk ordering of an environment: under
/// `risk`, the first action `preferred_action` attains the strictly lower
/// risk value.
struct RiskPreference {
  RiskSpec risk;
  index_t preferred_action = 0;
  scalar_t preferred_value = 0;
  scalar_t other_value = 0;
};

struct EnvCatalogEntry {
  std::string name;
  std::string description;
  MdpSpec mdp;
  /// Exact distribution of the discounted cost conditional on the first
  /// action (subsequent action choices do not affect costs in these
  /// environments).
  std::vector<DiscreteDist> first_action_returns;
  std::vector<RiskPreference> preferences;
};

/// Exact return distribution conditional on the first action, computed by
/// enumeration under the uniform policy and renormalization.
DiscreteDist conditional_return_dist(const MdpSpec& spec, index_t first_action,
                                     index_t cap = kDefaultEnumerationCap);

/// Small synthetic environments whose risk orderings are re-derived from
/// exact oracles every time the catalog is built.
std::vector<EnvCatalogEntry> catalog();

}  // namespace risq
