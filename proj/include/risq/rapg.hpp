#pragma once

#include "risq/grad.hpp"
#include "risq/mdp.hpp"
#include "risq/policy.hpp"
#include "risq/risk_spec.hpp"
#include "risq/types.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace risq {

/// Configuration of a risk-aware policy-gradient run. Unset step size and
/// batch size default to the 1/sqrt(N) and ceil(sqrt(N)) schedules.
struct RapgConfig {
  index_t num_iterations = 100;  // N
  std::optional<scalar_t> step_size;
  std::optional<index_t> batch_size;
  /// Optional per-iteration schedules (0-based iteration); they override
  /// the constant values above.
  std::function<scalar_t(index_t)> step_schedule;
  std::function<index_t(index_t)> batch_schedule;
  /// Optional coordinate box [lo, hi]; iterates are clipped into it.
  std::optional<std::array<scalar_t, 2>> projection_box;
  std::uint64_t seed = 0;
  RiskSpec risk;
  scalar_t root_tol = kDefaultRootTol;

  scalar_t step_at(index_t i) const;
  index_t batch_at(index_t i) const;
  void validate() const;
};

/// Everything a run produced: iterates theta_0 .. theta_N, per-iteration
/// estimated-gradient norms and risk estimates, and the uniformly drawn
/// index R in {1, ..., N} selecting the reported iterate.
struct RunRecord {
  std::vector<vector_t> iterates;
  std::vector<scalar_t> grad_norm_sq;
  std::vector<scalar_t> risk_estimates;
  index_t selected_index = 0;
  RapgConfig config;
  std::uint64_t seed = 0;
  double wall_seconds = 0;
  index_t total_trajectories = 0;
  bool aborted = false;
  std::string abort_reason;
  index_t abort_iteration = -1;
};

/// Gradient estimator hook: given the current parameters, the iteration's
/// batch size, the 0-based iteration index and the run's root stream,
/// produce a gradient estimate. Substreams 2*i and 2*i + 1 of the root are
/// reserved for iteration i's batches.
using GradientFn =
    std::function<GradEstimate(const vector_t& theta, index_t batch_size, index_t iteration,
                               const RandomStream& run_rng)>;

/// N iterations of theta <- theta - eta_i * grad_estimate, with optional
/// box projection; R is drawn at the end from the run's own stream.
/// A non-finite gradient aborts the run and marks the record; estimator
/// errors propagate with the iteration index attached.
RunRecord run_rapg_with(const vector_t& theta0, const RapgConfig& config, const GradientFn& gradient_fn);

/// Standard run: batches sampled from the MDP, gradient dispatched on the
/// configured risk (single-batch for expectile and entropic shortfall,
/// paired independent batches otherwise).
RunRecord run_rapg(const MdpSpec& spec, const PolicySpec& policy, const vector_t& theta0,
                   const RapgConfig& config);

/// Iterate at the recorded index R.
const vector_t& selected_iterate(const RunRecord& record);

/// Fresh uniform redraw of the reported iterate (variance studies).
const vector_t& select_uniform_iterate(const RunRecord& record, RandomStream& rng);

struct StationarityPoint {
  index_t num_iterations = 0;
  scalar_t mean_grad_norm_sq = 0;
  scalar_t standard_error = 0;
  std::vector<scalar_t> per_seed;
};

/// Multi-seed study of the exact gradient norm at the reported iterate as
/// the iteration budget grows.
struct StationarityReport {
  std::vector<StationarityPoint> points;
  scalar_t fitted_decay_slope = 0;  // slope of log mean against log N
  index_t num_seeds = 0;
};

/// Runs RAPG with `num_seeds` seeds per N in `n_grid` (schedules at their
/// defaults unless overridden in `base`), evaluates the exact gradient at
/// each reported iterate and aggregates. Requires an enumerable MDP.
/// `gradient_fn` substitutes the sampled estimator when provided (stubs,
/// exact-gradient studies).
StationarityReport stationarity_report(const MdpSpec& spec, const PolicySpec& policy, const vector_t& theta0,
                                       const RapgConfig& base, index_t num_seeds,
                                       std::span<const index_t> n_grid,
                                       const GradientFn& gradient_fn = nullptr);

}  // namespace risq
