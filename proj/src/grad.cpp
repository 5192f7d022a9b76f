#include "risq/grad.hpp"

#include "risq/errors.hpp"

#include <cmath>
#include <string>

namespace risq {

vector_t batch_costs(const MdpSpec& spec, std::span<const Trajectory> batch) {
  vector_t costs(static_cast<index_t>(batch.size()));
  for (index_t j = 0; j < costs.size(); ++j) {
    costs[j] = discounted_cost(batch[static_cast<std::size_t>(j)], spec.gamma);
  }
  return costs;
}

GradEstimate expectile_policy_gradient(const MdpSpec& spec, const PolicySpec& policy, const vector_t& theta,
                                       std::span<const Trajectory> batch, scalar_t nu, scalar_t tol) {
  if (batch.empty()) throw ArgumentError("expectile_policy_gradient: empty batch");
  const vector_t costs = batch_costs(spec, batch);
  const scalar_t xi = empirical_expectile(costs, nu, tol);

  vector_t numerator = vector_t::Zero(policy.dims());
  scalar_t denominator = 0;
  for (index_t j = 0; j < costs.size(); ++j) {
    const scalar_t d = costs[j] - xi;
    const scalar_t weight = d > 0 ? nu * d : (1 - nu) * d;
    add_score(policy, theta, batch[static_cast<std::size_t>(j)], weight, numerator);
    denominator += d > 0 ? nu : 1 - nu;
  }
  return GradEstimate{.gradient = numerator / denominator,
                      .risk_estimate = xi,
                      .batch_size = costs.size(),
                      .denominator_value = denominator,
                      .used_double_sampling = false};
}

GradEstimate ubsr_policy_gradient(const MdpSpec& spec, const PolicySpec& policy, const vector_t& theta,
                                  std::span<const Trajectory> batch, std::span<const Trajectory> hat_batch,
                                  const LossFn& loss, scalar_t lambda, scalar_t tol) {
  if (batch.empty()) throw ArgumentError("ubsr_policy_gradient: empty batch");
  if (batch.size() != hat_batch.size()) {
    throw ArgumentError("ubsr_policy_gradient: batch and hat batch sizes differ (" +
                        std::to_string(batch.size()) + " vs " + std::to_string(hat_batch.size()) + ")");
  }
  const vector_t costs = batch_costs(spec, batch);
  const scalar_t sr = empirical_ubsr(costs, loss, lambda, tol);

  // The root comes from `batch`; weights and scores are evaluated together
  // on the independent `hat_batch`, so the weighted-score correlation that
  // carries the gradient survives while the root error stays decoupled.
  const vector_t hat_costs = batch_costs(spec, hat_batch);
  vector_t numerator = vector_t::Zero(policy.dims());
  scalar_t denominator = 0;
  for (index_t j = 0; j < hat_costs.size(); ++j) {
    const scalar_t d = hat_costs[j] - sr;
    add_score(policy, theta, hat_batch[static_cast<std::size_t>(j)], loss.eval(d), numerator);
    denominator += loss.deriv(d);
  }
  if (!(denominator > 0)) {
    throw RangeError("ubsr_policy_gradient: nonpositive denominator " + std::to_string(denominator));
  }
  return GradEstimate{.gradient = numerator / denominator,
                      .risk_estimate = sr,
                      .batch_size = costs.size(),
                      .denominator_value = denominator,
                      .used_double_sampling = true};
}

GradEstimate entropic_policy_gradient(const MdpSpec& spec, const PolicySpec& policy, const vector_t& theta,
                                      std::span<const Trajectory> batch, scalar_t beta, scalar_t tol) {
  (void)tol;  // closed-form root, no root finding
  if (batch.empty()) throw ArgumentError("entropic_policy_gradient: empty batch");
  if (!(beta > 0)) throw ArgumentError("entropic_policy_gradient: beta must be positive");
  const vector_t costs = batch_costs(spec, batch);
  const index_t m = costs.size();

  // sr = beta^-1 log(mean exp(beta c_j)), evaluated with a max shift; the
  // reweighting exp(beta (c_j - sr)) then stays within [0, m].
  const scalar_t cmax = costs.maxCoeff();
  const scalar_t mean_shifted = ((costs.array() - cmax) * beta).exp().mean();
  if (!std::isfinite(mean_shifted)) {
    throw RangeError("entropic_policy_gradient: exponent overflow in shortfall root");
  }
  const scalar_t sr = cmax + std::log(mean_shifted) / beta;

  vector_t grad = vector_t::Zero(policy.dims());
  for (index_t j = 0; j < m; ++j) {
    const scalar_t weight = std::exp(beta * (costs[j] - sr)) / (beta * static_cast<scalar_t>(m));
    add_score(policy, theta, batch[static_cast<std::size_t>(j)], weight, grad);
  }
  return GradEstimate{.gradient = std::move(grad),
                      .risk_estimate = sr,
                      .batch_size = m,
                      .denominator_value = 0,
                      .used_double_sampling = false};
}

GradEstimate oce_policy_gradient(const MdpSpec& spec, const PolicySpec& policy, const vector_t& theta,
                                 std::span<const Trajectory> batch, std::span<const Trajectory> hat_batch,
                                 const LossFn& loss, scalar_t tol) {
  if (batch.empty()) throw ArgumentError("oce_policy_gradient: empty batch");
  if (batch.size() != hat_batch.size()) {
    throw ArgumentError("oce_policy_gradient: batch and hat batch sizes differ (" +
                        std::to_string(batch.size()) + " vs " + std::to_string(hat_batch.size()) + ")");
  }
  const vector_t costs = batch_costs(spec, batch);
  const index_t m = costs.size();
  const OceResult oce = empirical_oce(costs, loss, tol);

  // Split root from `batch`, weighted scores from the independent `hat_batch`.
  const vector_t hat_costs = batch_costs(spec, hat_batch);
  vector_t grad = vector_t::Zero(policy.dims());
  for (index_t j = 0; j < m; ++j) {
    const scalar_t weight = loss.eval(hat_costs[j] - oce.kstar) / static_cast<scalar_t>(m);
    add_score(policy, theta, hat_batch[static_cast<std::size_t>(j)], weight, grad);
  }
  return GradEstimate{.gradient = std::move(grad),
                      .risk_estimate = oce.oce,
                      .batch_size = m,
                      .denominator_value = 0,
                      .used_double_sampling = true};
}

GradEstimate risk_policy_gradient(const MdpSpec& spec, const PolicySpec& policy, const vector_t& theta,
                                  const RiskSpec& risk, std::span<const Trajectory> batch,
                                  std::span<const Trajectory> hat_batch, scalar_t tol) {
  switch (risk.kind) {
    case RiskKind::expectile:
      return expectile_policy_gradient(spec, policy, theta, batch, risk.nu, tol);
    case RiskKind::ubsr:
      if (risk.loss.family == LossFamily::entropic) {
        return entropic_policy_gradient(spec, policy, theta, batch, risk.loss.p1, tol);
      }
      return ubsr_policy_gradient(spec, policy, theta, batch, hat_batch, risk.loss, risk.lambda, tol);
    case RiskKind::oce:
      return oce_policy_gradient(spec, policy, theta, batch, hat_batch, risk.loss, tol);
  }
  throw ArgumentError("risk_policy_gradient: unknown risk kind");
}

namespace {

struct Ensemble {
  std::vector<WeightedTrajectory> trajectories;
  vector_t costs;
  vector_t probs;
};

Ensemble enumerate_ensemble(const MdpSpec& spec, const PolicySpec& policy, const vector_t& theta,
                            index_t cap) {
  Ensemble e;
  e.trajectories = enumerate_trajectories(spec, policy, theta, cap);
  const index_t n = static_cast<index_t>(e.trajectories.size());
  e.costs.resize(n);
  e.probs.resize(n);
  for (index_t i = 0; i < n; ++i) {
    e.costs[i] = discounted_cost(e.trajectories[static_cast<std::size_t>(i)].trajectory, spec.gamma);
    e.probs[i] = e.trajectories[static_cast<std::size_t>(i)].probability;
  }
  return e;
}

}  // namespace

DiscreteDist return_distribution(const MdpSpec& spec, const PolicySpec& policy, const vector_t& theta,
                                 index_t cap) {
  Ensemble e = enumerate_ensemble(spec, policy, theta, cap);
  return DiscreteDist{std::move(e.costs), std::move(e.probs)};
}

vector_t exact_expectile_gradient(const MdpSpec& spec, const PolicySpec& policy, const vector_t& theta,
                                  scalar_t nu, scalar_t tol, index_t cap) {
  const Ensemble e = enumerate_ensemble(spec, policy, theta, cap);
  const scalar_t xi = exact_expectile(DiscreteDist{e.costs, e.probs}, nu, tol);
  vector_t numerator = vector_t::Zero(policy.dims());
  scalar_t denominator = 0;
  for (index_t i = 0; i < e.costs.size(); ++i) {
    const scalar_t d = e.costs[i] - xi;
    const scalar_t p = e.probs[i];
    add_score(policy, theta, e.trajectories[static_cast<std::size_t>(i)].trajectory,
              p * (d > 0 ? nu * d : (1 - nu) * d), numerator);
    denominator += p * (d > 0 ? nu : 1 - nu);
  }
  return numerator / denominator;
}

vector_t exact_ubsr_gradient(const MdpSpec& spec, const PolicySpec& policy, const vector_t& theta,
                             const LossFn& loss, scalar_t lambda, scalar_t tol, index_t cap) {
  const Ensemble e = enumerate_ensemble(spec, policy, theta, cap);
  const scalar_t sr = exact_ubsr(DiscreteDist{e.costs, e.probs}, loss, lambda, tol);
  vector_t numerator = vector_t::Zero(policy.dims());
  scalar_t denominator = 0;
  for (index_t i = 0; i < e.costs.size(); ++i) {
    const scalar_t d = e.costs[i] - sr;
    add_score(policy, theta, e.trajectories[static_cast<std::size_t>(i)].trajectory,
              e.probs[i] * loss.eval(d), numerator);
    denominator += e.probs[i] * loss.deriv(d);
  }
  if (!(denominator > 0)) {
    throw RangeError("exact_ubsr_gradient: nonpositive denominator " + std::to_string(denominator));
  }
  return numerator / denominator;
}

vector_t exact_oce_gradient(const MdpSpec& spec, const PolicySpec& policy, const vector_t& theta,
                            const LossFn& loss, scalar_t tol, index_t cap) {
  const Ensemble e = enumerate_ensemble(spec, policy, theta, cap);
  const OceResult oce = exact_oce(DiscreteDist{e.costs, e.probs}, loss, tol);
  vector_t grad = vector_t::Zero(policy.dims());
  for (index_t i = 0; i < e.costs.size(); ++i) {
    add_score(policy, theta, e.trajectories[static_cast<std::size_t>(i)].trajectory,
              e.probs[i] * loss.eval(e.costs[i] - oce.kstar), grad);
  }
  return grad;
}

vector_t exact_risk_gradient(const MdpSpec& spec, const PolicySpec& policy, const vector_t& theta,
                             const RiskSpec& risk, scalar_t tol, index_t cap) {
  switch (risk.kind) {
    case RiskKind::expectile:
      return exact_expectile_gradient(spec, policy, theta, risk.nu, tol, cap);
    case RiskKind::ubsr:
      return exact_ubsr_gradient(spec, policy, theta, risk.loss, risk.lambda, tol, cap);
    case RiskKind::oce:
      return exact_oce_gradient(spec, policy, theta, risk.loss, tol, cap);
  }
  throw ArgumentError("exact_risk_gradient: unknown risk kind");
}

scalar_t exact_risk_value(const MdpSpec& spec, const PolicySpec& policy, const vector_t& theta,
                          const RiskSpec& risk, scalar_t tol, index_t cap) {
  const DiscreteDist dist = return_distribution(spec, policy, theta, cap);
  switch (risk.kind) {
    case RiskKind::expectile:
      return exact_expectile(dist, risk.nu, tol);
    case RiskKind::ubsr:
      return exact_ubsr(dist, risk.loss, risk.lambda, tol);
    case RiskKind::oce:
      return exact_oce(dist, risk.loss, tol).oce;
  }
  throw ArgumentError("exact_risk_value: unknown risk kind");
}

}  // namespace risq
