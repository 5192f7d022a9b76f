#pragma once

#include "risq/types.hpp"

#include <functional>
#include <optional>
#include <string>

namespace risq {

enum class LossFamily {
  entropic,
  identity,
  quadratic,
  polynomial,
  cvar,
  onpv,
  mean_variance,
  quartic,
  expectile_e,
  expectile_l,
  expectile_lprime,
  derived,
};

/// A scalar loss with its derivative and analytic property flags.
///
/// Conventions: x+ = max(x, 0), x- = max(-x, 0). At kink points the
/// derivative evaluator returns the left limit (the x <= 0 branch).
struct LossFn {
  std::function<scalar_t(scalar_t)> eval;
  std::function<scalar_t(scalar_t)> deriv;
  std::string name;
  LossFamily family = LossFamily::derived;
  scalar_t p1 = 0;  // first constructor parameter (beta, b, a, alpha, nu)
  scalar_t p2 = 0;  // second constructor parameter where present

  struct Flags {
    bool convex = false;
    bool strictly_increasing = false;
    bool increasing = false;
    bool continuously_differentiable = false;
    /// The derivative crosses level 1 somewhere (sign change of deriv - 1);
    /// required for a well-posed shortfall decomposition of the optimized
    /// certainty equivalent.
    bool deriv_crosses_one = false;
    std::optional<scalar_t> lipschitz_bound;
  } flags;

  scalar_t operator()(scalar_t x) const { return eval(x); }

  /// Usable as a shortfall-risk loss: the empirical residual
  /// k -> mean l(x_j - k) must be continuous and strictly decreasing.
  bool ubsr_eligible() const { return flags.strictly_increasing; }

  /// Usable as an optimized-certainty-equivalent loss.
  bool oce_eligible() const { return flags.convex && flags.increasing && flags.deriv_crosses_one; }

  /// Loss whose eval is this loss's derivative (shortfall decomposition of
  /// the certainty equivalent uses it as the root-finding residual).
  LossFn derivative_loss() const;
};

// Loss constructors. Parameter ranges are validated and violations raise
// ArgumentError.

/// l(x) = exp(beta x), beta > 0. Exponent arguments beyond 700 raise RangeError.
LossFn make_entropic(scalar_t beta);

/// l(x) = x.
LossFn make_identity();

/// l(x) = [x+]^2 - b [x-], b >= 0.
LossFn make_quadratic(scalar_t b);

/// l(x) = a^-1 [x+]^a, a >= 1.
LossFn make_polynomial(scalar_t a);

/// l(x) = (1 - alpha)^-1 x+, alpha in (0, 1).
LossFn make_cvar(scalar_t alpha);

/// l(x) = a x+ - b x-, a > 1 > b > 0.
LossFn make_onpv(scalar_t a, scalar_t b);

/// l(x) = a^-1 ([1 + x]+)^a - a^-1, a > 1.
LossFn make_mean_variance(scalar_t a);

/// l(x) = (1 + x)^4 [1 + x]+ - 1.
LossFn make_quartic();

/// Asymmetric squared loss e_nu(x) = x^2 |nu - 1{x <= 0}|, nu in (0, 1).
LossFn expectile_e(scalar_t nu);

/// Asymmetric linear loss l_nu(x) = nu x 1{x > 0} + (1 - nu) x 1{x <= 0}.
LossFn expectile_l(scalar_t nu);

/// Step weight l'_nu(x) = nu 1{x > 0} + (1 - nu) 1{x <= 0}.
LossFn expectile_lprime(scalar_t nu);

}  // namespace risq
