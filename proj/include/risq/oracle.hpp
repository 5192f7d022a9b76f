#pragma once

#include "risq/discrete_dist.hpp"
#include "risq/loss.hpp"
#include "risq/random.hpp"
#include "risq/types.hpp"

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace risq {

/// Central finite differences of f at theta. The per-coordinate step is
/// step * max(1, |theta_i|). Non-finite function values raise OracleError.
vector_t finite_difference_gradient(const std::function<scalar_t(const vector_t&)>& f, const vector_t& theta,
                                    scalar_t step = 1e-5);

/// Grid minimization of k + E[l(X - k)] over n points of [lo, hi].
/// Returns (minimum value, argmin k). An argmin on the grid boundary raises
/// OracleError (widen the grid). Shares no root-finding code with the
/// bisection-based estimators, so agreement between the two is meaningful.
std::pair<scalar_t, scalar_t> brute_force_oce(const DiscreteDist& dist, const LossFn& loss, scalar_t lo,
                                              scalar_t hi, index_t n);

struct MsePoint {
  index_t m = 0;
  scalar_t mse = 0;
  index_t replications = 0;
};

struct MseCurve {
  std::vector<MsePoint> points;
  std::string target;
  scalar_t slope = 0;      // least-squares fit on (log m, log mse)
  bool flat_zero = false;  // all mse exactly zero; slope not defined
};

using VectorEstimator = std::function<vector_t(index_t m, RandomStream& rng)>;
using ScalarEstimator = std::function<scalar_t(index_t m, RandomStream& rng)>;

/// Empirical MSE of an estimator against an exact-oracle truth, over
/// independent replications at each batch size in m_list. Replication r at
/// m_list[i] uses rng.substream(i * replications + r).
MseCurve mse_curve(const VectorEstimator& estimator, const vector_t& truth, std::span<const index_t> m_list,
                   index_t replications, const RandomStream& rng, std::string target = "");
MseCurve mse_curve(const ScalarEstimator& estimator, scalar_t truth, std::span<const index_t> m_list,
                   index_t replications, const RandomStream& rng, std::string target = "");

/// Empirical frequency of |estimate - truth| >= eps for each eps, over
/// `replications` independent estimates at batch size m.
std::vector<std::pair<scalar_t, scalar_t>> tail_frequency(const ScalarEstimator& estimator, scalar_t truth,
                                                          index_t m, std::span<const scalar_t> eps_list,
                                                          index_t replications, const RandomStream& rng);

/// Least-squares slope of y against x.
scalar_t fit_slope(std::span<const scalar_t> x, std::span<const scalar_t> y);

}  // namespace risq
