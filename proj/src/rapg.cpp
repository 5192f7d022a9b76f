#include "risq/rapg.hpp"

#include "risq/errors.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <string>

namespace risq {

scalar_t RapgConfig::step_at(index_t i) const {
  if (step_schedule) return step_schedule(i);
  if (step_size) return *step_size;
  return 1.0 / std::sqrt(static_cast<scalar_t>(num_iterations));
}

index_t RapgConfig::batch_at(index_t i) const {
  if (batch_schedule) return batch_schedule(i);
  if (batch_size) return *batch_size;
  return static_cast<index_t>(std::ceil(std::sqrt(static_cast<scalar_t>(num_iterations))));
}

void RapgConfig::validate() const {
  if (num_iterations < 1) throw ConfigError("rapg: num_iterations must be at least 1");
  if (step_size && !(*step_size > 0)) throw ConfigError("rapg: step size must be positive");
  if (batch_size && *batch_size < 1) throw ConfigError("rapg: batch size must be at least 1");
  if (projection_box && !((*projection_box)[0] < (*projection_box)[1])) {
    throw ConfigError("rapg: projection box needs lo < hi");
  }
  risk.validate();
}

namespace {

constexpr scalar_t kSupNormWarnLevel = 50.0;

}  // namespace

RunRecord run_rapg_with(const vector_t& theta0, const RapgConfig& config, const GradientFn& gradient_fn) {
  config.validate();
  if (!theta0.allFinite()) throw ConfigError("rapg: non-finite initial parameters");
  const auto start = std::chrono::steady_clock::now();
  const index_t n = config.num_iterations;
  const RandomStream root(config.seed);

  RunRecord record;
  record.config = config;
  record.seed = config.seed;
  record.iterates.reserve(n + 1);
  record.grad_norm_sq.reserve(n);
  record.risk_estimates.reserve(n);
  record.iterates.push_back(theta0);

  vector_t theta = theta0;
  bool warned = false;
  for (index_t i = 0; i < n; ++i) {
    const index_t m = config.batch_at(i);
    if (m < 1) throw ConfigError("rapg: batch schedule produced m < 1 at iteration " + std::to_string(i));
    GradEstimate estimate;
    try {
      estimate = gradient_fn(theta, m, i, root);
    } catch (const Error& e) {
      throw Error(e.code(), "rapg iteration " + std::to_string(i) + ": " + e.what());
    }
    record.total_trajectories += estimate.used_double_sampling ? 2 * m : m;
    if (!estimate.gradient.allFinite()) {
      record.aborted = true;
      record.abort_iteration = i;
      record.abort_reason = "non-finite gradient estimate at iteration " + std::to_string(i);
      break;
    }
    theta -= config.step_at(i) * estimate.gradient;
    if (config.projection_box) {
      theta = theta.cwiseMax((*config.projection_box)[0]).cwiseMin((*config.projection_box)[1]);
    } else if (!warned && theta.lpNorm<Eigen::Infinity>() > kSupNormWarnLevel) {
      std::cerr << "rapg: warning: |theta|_inf exceeded " << kSupNormWarnLevel
                << " at iteration " << i << " with no projection box configured\n";
      warned = true;
    }
    record.iterates.push_back(theta);
    record.grad_norm_sq.push_back(estimate.gradient.squaredNorm());
    record.risk_estimates.push_back(estimate.risk_estimate);
  }

  const index_t completed = static_cast<index_t>(record.iterates.size()) - 1;
  if (completed > 0) {
    RandomStream selector = root.substream(static_cast<std::uint64_t>(2 * n));
    record.selected_index = 1 + selector.uniform_int(completed);
  }
  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

RunRecord run_rapg(const MdpSpec& spec, const PolicySpec& policy, const vector_t& theta0,
                   const RapgConfig& config) {
  spec.validate();
  policy.validate();
  const RiskSpec& risk = config.risk;
  const GradientFn gradient_fn = [&](const vector_t& theta, index_t m, index_t i,
                                     const RandomStream& root) {
    const auto batch = sample_batch(spec, policy, theta, m, root.substream(2 * i));
    if (!risk.double_sampled()) {
      return risk_policy_gradient(spec, policy, theta, risk, batch, {}, config.root_tol);
    }
    const auto hat_batch = sample_batch(spec, policy, theta, m, root.substream(2 * i + 1));
    return risk_policy_gradient(spec, policy, theta, risk, batch, hat_batch, config.root_tol);
  };
  return run_rapg_with(theta0, config, gradient_fn);
}

const vector_t& selected_iterate(const RunRecord& record) {
  if (record.selected_index < 1 ||
      record.selected_index >= static_cast<index_t>(record.iterates.size())) {
    throw ArgumentError("selected_iterate: record has no valid selected index");
  }
  return record.iterates[static_cast<std::size_t>(record.selected_index)];
}

const vector_t& select_uniform_iterate(const RunRecord& record, RandomStream& rng) {
  const index_t completed = static_cast<index_t>(record.iterates.size()) - 1;
  if (completed < 1) throw ArgumentError("select_uniform_iterate: record holds no updates");
  const index_t r = 1 + rng.uniform_int(completed);
  return record.iterates[static_cast<std::size_t>(r)];
}

StationarityReport stationarity_report(const MdpSpec& spec, const PolicySpec& policy, const vector_t& theta0,
                                       const RapgConfig& base, index_t num_seeds,
                                       std::span<const index_t> n_grid, const GradientFn& gradient_fn) {
  if (num_seeds < 1) throw ArgumentError("stationarity_report: need at least one seed");
  if (n_grid.empty()) throw ArgumentError("stationarity_report: empty N grid");

  StationarityReport report;
  report.num_seeds = num_seeds;
  const RandomStream seed_root(base.seed);
  for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
    StationarityPoint point;
    point.num_iterations = n_grid[gi];
    point.per_seed.reserve(num_seeds);
    for (index_t s = 0; s < num_seeds; ++s) {
      RapgConfig config = base;
      config.num_iterations = n_grid[gi];
      config.seed = seed_root.substream(gi * static_cast<std::size_t>(num_seeds) + s).seed();
      const RunRecord record = gradient_fn ? run_rapg_with(theta0, config, gradient_fn)
                                           : run_rapg(spec, policy, theta0, config);
      const vector_t grad =
          exact_risk_gradient(spec, policy, selected_iterate(record), config.risk, config.root_tol);
      point.per_seed.push_back(grad.squaredNorm());
    }
    scalar_t mean = 0;
    for (scalar_t v : point.per_seed) mean += v;
    mean /= static_cast<scalar_t>(num_seeds);
    scalar_t var = 0;
    for (scalar_t v : point.per_seed) var += (v - mean) * (v - mean);
    var = num_seeds > 1 ? var / static_cast<scalar_t>(num_seeds - 1) : 0;
    point.mean_grad_norm_sq = mean;
    point.standard_error = std::sqrt(var / static_cast<scalar_t>(num_seeds));
    report.points.push_back(std::move(point));
  }

  std::vector<scalar_t> log_n, log_mean;
  for (const StationarityPoint& p : report.points) {
    if (p.mean_grad_norm_sq > 0) {
      log_n.push_back(std::log(static_cast<scalar_t>(p.num_iterations)));
      log_mean.push_back(std::log(p.mean_grad_norm_sq));
    }
  }
  if (log_n.size() >= 2) {
    scalar_t sx = 0, sy = 0, sxx = 0, sxy = 0;
    const scalar_t n = static_cast<scalar_t>(log_n.size());
    for (std::size_t i = 0; i < log_n.size(); ++i) {
      sx += log_n[i];
      sy += log_mean[i];
      sxx += log_n[i] * log_n[i];
      sxy += log_n[i] * log_mean[i];
    }
    report.fitted_decay_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return report;
}

}  // namespace risq
