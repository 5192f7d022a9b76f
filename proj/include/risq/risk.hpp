#pragma once

#include "risq/discrete_dist.hpp"
#include "risq/loss.hpp"
#include "risq/types.hpp"

#include <span>

namespace risq {

inline constexpr scalar_t kDefaultRootTol = 1e-10;

/// Empirical nu-expectile: the root of the empirical identification
/// residual k -> mean l_nu(x_j - k). Always inside [min, max] of the
/// samples; solved by bisection to absolute tolerance `tol`.
scalar_t empirical_expectile(std::span<const scalar_t> samples, scalar_t nu,
                             scalar_t tol = kDefaultRootTol);

/// Empirical shortfall risk: the smallest k (within tol) with
/// mean l(x_j - k) <= lambda. The search bracket is limited to
/// [min - range, max + range] with range = max - min + 1; a threshold whose
/// crossing lies outside raises InfeasibleThresholdError. The loss must be
/// strictly increasing and continuous.
scalar_t empirical_ubsr(std::span<const scalar_t> samples, const LossFn& loss, scalar_t lambda,
                        scalar_t tol = kDefaultRootTol);

struct OceResult {
  scalar_t oce = 0;
  scalar_t kstar = 0;
};

/// Empirical optimized certainty equivalent via the shortfall split:
/// kstar solves mean l'(x_j - k) <= 1 (smallest such k) and
/// oce = kstar + mean l(x_j - kstar). The loss must be OCE-eligible.
OceResult empirical_oce(std::span<const scalar_t> samples, const LossFn& loss,
                        scalar_t tol = kDefaultRootTol);

// Exact (atom-weighted) counterparts over a finite-support distribution.
scalar_t exact_expectile(const DiscreteDist& dist, scalar_t nu, scalar_t tol = kDefaultRootTol);
scalar_t exact_ubsr(const DiscreteDist& dist, const LossFn& loss, scalar_t lambda,
                    scalar_t tol = kDefaultRootTol);
OceResult exact_oce(const DiscreteDist& dist, const LossFn& loss, scalar_t tol = kDefaultRootTol);

// Eigen-vector conveniences.
scalar_t empirical_expectile(const vector_t& samples, scalar_t nu, scalar_t tol = kDefaultRootTol);
scalar_t empirical_ubsr(const vector_t& samples, const LossFn& loss, scalar_t lambda,
                        scalar_t tol = kDefaultRootTol);
OceResult empirical_oce(const vector_t& samples, const LossFn& loss, scalar_t tol = kDefaultRootTol);

}  // namespace risq
