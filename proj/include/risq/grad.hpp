#pragma once

#include "risq/mdp.hpp"
#include "risq/policy.hpp"
#include "risq/risk.hpp"
#include "risq/risk_spec.hpp"
#include "risq/types.hpp"

#include <span>

namespace risq {

/// A sampled policy-gradient estimate with diagnostics. For ratio-form
/// estimators `denominator_value` is the (positive) sum in the denominator;
/// for expectation-form estimators it is 0.
struct GradEstimate {
  vector_t gradient;
  scalar_t risk_estimate = 0;
  index_t batch_size = 0;
  scalar_t denominator_value = 0;
  bool used_double_sampling = false;
};

/// Discounted costs of a trajectory batch.
vector_t batch_costs(const MdpSpec& spec, std::span<const Trajectory> batch);

/// Expectile gradient estimate from one batch:
/// [sum_j l_nu(c_j - xi_hat) g(theta, tau_j)] / [sum_j l'_nu(c_j - xi_hat)]
/// with xi_hat the empirical expectile of the batch costs. The denominator
/// is at least m * min(nu, 1 - nu).
GradEstimate expectile_policy_gradient(const MdpSpec& spec, const PolicySpec& policy, const vector_t& theta,
                                       std::span<const Trajectory> batch, scalar_t nu,
                                       scalar_t tol = kDefaultRootTol);

/// Shortfall-risk gradient estimate with a decoupled root: sr_hat is
/// solved on `batch`, and the weighted-score ratio is evaluated on the
/// independent same-size `hat_batch`:
/// [sum_j l(c(hat_tau_j) - sr_hat) g(theta, hat_tau_j)] /
/// [sum_j l'(c(hat_tau_j) - sr_hat)].
GradEstimate ubsr_policy_gradient(const MdpSpec& spec, const PolicySpec& policy, const vector_t& theta,
                                  std::span<const Trajectory> batch, std::span<const Trajectory> hat_batch,
                                  const LossFn& loss, scalar_t lambda, scalar_t tol = kDefaultRootTol);

/// Entropic shortfall gradient from a single batch, using the closed-form
/// root sr_hat = beta^-1 log(mean exp(beta c_j)):
/// beta^-1 * mean_j exp(beta (c_j - sr_hat)) g(theta, tau_j).
GradEstimate entropic_policy_gradient(const MdpSpec& spec, const PolicySpec& policy, const vector_t& theta,
                                      std::span<const Trajectory> batch, scalar_t beta,
                                      scalar_t tol = kDefaultRootTol);

/// Certainty-equivalent gradient estimate (no denominator):
/// mean_j l(c(hat_tau_j) - k_star) g(theta, hat_tau_j), with k_star the
/// shortfall root of the derivative loss at threshold 1, solved on the
/// independent `batch` costs.
GradEstimate oce_policy_gradient(const MdpSpec& spec, const PolicySpec& policy, const vector_t& theta,
                                 std::span<const Trajectory> batch, std::span<const Trajectory> hat_batch,
                                 const LossFn& loss, scalar_t tol = kDefaultRootTol);

/// Dispatch on a RiskSpec. `hat_batch` is ignored for single-batch risks
/// and must match `batch` in size for double-sampled ones.
GradEstimate risk_policy_gradient(const MdpSpec& spec, const PolicySpec& policy, const vector_t& theta,
                                  const RiskSpec& risk, std::span<const Trajectory> batch,
                                  std::span<const Trajectory> hat_batch, scalar_t tol = kDefaultRootTol);

/// Exact distribution of the discounted cost under the policy, by full
/// trajectory enumeration.
DiscreteDist return_distribution(const MdpSpec& spec, const PolicySpec& policy, const vector_t& theta,
                                 index_t cap = kDefaultEnumerationCap);

// Population-level gradients, with expectations replaced by exact sums over
// the enumerated trajectory space and the risk level solved exactly.
vector_t exact_expectile_gradient(const MdpSpec& spec, const PolicySpec& policy, const vector_t& theta,
                                  scalar_t nu, scalar_t tol = kDefaultRootTol,
                                  index_t cap = kDefaultEnumerationCap);
vector_t exact_ubsr_gradient(const MdpSpec& spec, const PolicySpec& policy, const vector_t& theta,
                             const LossFn& loss, scalar_t lambda, scalar_t tol = kDefaultRootTol,
                             index_t cap = kDefaultEnumerationCap);
vector_t exact_oce_gradient(const MdpSpec& spec, const PolicySpec& policy, const vector_t& theta,
                            const LossFn& loss, scalar_t tol = kDefaultRootTol,
                            index_t cap = kDefaultEnumerationCap);

/// Exact gradient / risk value for any RiskSpec.
vector_t exact_risk_gradient(const MdpSpec& spec, const PolicySpec& policy, const vector_t& theta,
                             const RiskSpec& risk, scalar_t tol = kDefaultRootTol,
                             index_t cap = kDefaultEnumerationCap);
scalar_t exact_risk_value(const MdpSpec& spec, const PolicySpec& policy, const vector_t& theta,
                          const RiskSpec& risk, scalar_t tol = kDefaultRootTol,
                          index_t cap = kDefaultEnumerationCap);

}  // namespace risq
