#include "risq/loss.hpp"

#include "risq/errors.hpp"

#include <cmath>
#include <sstream>

namespace risq {

namespace {

std::string fmt_param(scalar_t v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

constexpr scalar_t kMaxExponent = 700.0;

scalar_t guarded_exp(scalar_t arg) {
  if (arg > kMaxExponent) {
    throw RangeError("entropic loss: exponent argument " + fmt_param(arg) + " exceeds cap 700");
  }
  return std::exp(arg);
}

}  // namespace

LossFn LossFn::derivative_loss() const {
  LossFn d;
  d.eval = deriv;
  d.deriv = [](scalar_t) { return scalar_t(0); };  // not used by root finding
  d.name = name + "'";
  d.family = LossFamily::derived;
  d.flags.increasing = flags.convex;  // derivative of a convex loss is nondecreasing
  d.flags.convex = false;
  d.flags.strictly_increasing = false;
  d.flags.continuously_differentiable = false;
  return d;
}

LossFn make_entropic(scalar_t beta) {
  if (!(beta > 0)) throw ArgumentError("entropic loss: beta must be positive");
  LossFn l;
  l.eval = [beta](scalar_t x) { return guarded_exp(beta * x); };
  l.deriv = [beta](scalar_t x) { return beta * guarded_exp(beta * x); };
  l.name = "entropic:beta=" + fmt_param(beta);
  l.family = LossFamily::entropic;
  l.p1 = beta;
  l.flags = {.convex = true,
             .strictly_increasing = true,
             .increasing = true,
             .continuously_differentiable = true,
             .deriv_crosses_one = true,
             .lipschitz_bound = std::nullopt};
  return l;
}

LossFn make_identity() {
  LossFn l;
  l.eval = [](scalar_t x) { return x; };
  l.deriv = [](scalar_t) { return scalar_t(1); };
  l.name = "identity";
  l.family = LossFamily::identity;
  l.flags = {.convex = true,
             .strictly_increasing = true,
             .increasing = true,
             .continuously_differentiable = true,
             // deriv - 1 is identically zero: no sign change, so the
             // certainty-equivalent split has no unique root.
             .deriv_crosses_one = false,
             .lipschitz_bound = 1.0};
  return l;
}

LossFn make_quadratic(scalar_t b) {
  if (!(b >= 0)) throw ArgumentError("quadratic loss: b must be nonnegative");
  LossFn l;
  l.eval = [b](scalar_t x) { return x > 0 ? x * x : b * x; };
  l.deriv = [b](scalar_t x) { return x > 0 ? 2 * x : b; };
  l.name = "quadratic:b=" + fmt_param(b);
  l.family = LossFamily::quadratic;
  l.p1 = b;
  const bool strict = b > 0;
  l.flags = {// For b > 0 the derivative drops from b to 0+ across the
             // origin, so the loss is not convex there.
             .convex = b == 0,
             .strictly_increasing = strict,
             .increasing = true,
             .continuously_differentiable = b == 0,
             .deriv_crosses_one = true,
             .lipschitz_bound = std::nullopt};
  return l;
}

LossFn make_polynomial(scalar_t a) {
  if (!(a >= 1)) throw ArgumentError("polynomial loss: a must be >= 1");
  LossFn l;
  l.eval = [a](scalar_t x) { return x > 0 ? std::pow(x, a) / a : scalar_t(0); };
  l.deriv = [a](scalar_t x) { return x > 0 ? std::pow(x, a - 1) : scalar_t(0); };
  l.name = "polynomial:a=" + fmt_param(a);
  l.family = LossFamily::polynomial;
  l.p1 = a;
  l.flags = {.convex = true,
             .strictly_increasing = false,
             .increasing = true,
             .continuously_differentiable = a > 1,
             .deriv_crosses_one = a > 1,
             .lipschitz_bound = a == 1 ? std::optional<scalar_t>(1.0) : std::nullopt};
  return l;
}

LossFn make_cvar(scalar_t alpha) {
  if (!(alpha > 0 && alpha < 1)) throw ArgumentError("cvar loss: alpha must be in (0, 1)");
  const scalar_t w = 1.0 / (1.0 - alpha);
  LossFn l;
  l.eval = [w](scalar_t x) { return x > 0 ? w * x : scalar_t(0); };
  l.deriv = [w](scalar_t x) { return x > 0 ? w : scalar_t(0); };
  l.name = "cvar:alpha=" + fmt_param(alpha);
  l.family = LossFamily::cvar;
  l.p1 = alpha;
  l.flags = {.convex = true,
             .strictly_increasing = false,
             .increasing = true,
             .continuously_differentiable = false,
             .deriv_crosses_one = true,
             .lipschitz_bound = w};
  return l;
}

LossFn make_onpv(scalar_t a, scalar_t b) {
  if (!(a > 1 && b > 0 && b < 1)) throw ArgumentError("onpv loss: need a > 1 > b > 0");
  LossFn l;
  l.eval = [a, b](scalar_t x) { return x > 0 ? a * x : b * x; };
  l.deriv = [a, b](scalar_t x) { return x > 0 ? a : b; };
  l.name = "onpv:a=" + fmt_param(a) + ":b=" + fmt_param(b);
  l.family = LossFamily::onpv;
  l.p1 = a;
  l.p2 = b;
  l.flags = {.convex = true,
             .strictly_increasing = true,
             .increasing = true,
             .continuously_differentiable = false,
             .deriv_crosses_one = true,
             .lipschitz_bound = a};
  return l;
}

LossFn make_mean_variance(scalar_t a) {
  if (!(a > 1)) throw ArgumentError("mean-variance loss: a must be > 1");
  LossFn l;
  l.eval = [a](scalar_t x) {
    const scalar_t u = std::max(1.0 + x, 0.0);
    return (std::pow(u, a) - 1.0) / a;
  };
  l.deriv = [a](scalar_t x) {
    const scalar_t u = std::max(1.0 + x, 0.0);
    return std::pow(u, a - 1);
  };
  l.name = "meanvar:a=" + fmt_param(a);
  l.family = LossFamily::mean_variance;
  l.p1 = a;
  l.flags = {.convex = true,
             .strictly_increasing = false,
             .increasing = true,
             .continuously_differentiable = true,
             .deriv_crosses_one = true,
             .lipschitz_bound = std::nullopt};
  return l;
}

LossFn make_quartic() {
  LossFn l;
  l.eval = [](scalar_t x) {
    const scalar_t u = 1.0 + x;
    return u > 0 ? u * u * u * u * u - 1.0 : scalar_t(-1);
  };
  l.deriv = [](scalar_t x) {
    const scalar_t u = 1.0 + x;
    return u > 0 ? 5.0 * u * u * u * u : scalar_t(0);
  };
  l.name = "quartic";
  l.family = LossFamily::quartic;
  l.flags = {.convex = true,
             .strictly_increasing = false,
             .increasing = true,
             .continuously_differentiable = true,
             .deriv_crosses_one = true,
             .lipschitz_bound = std::nullopt};
  return l;
}

LossFn expectile_e(scalar_t nu) {
  if (!(nu > 0 && nu < 1)) throw ArgumentError("expectile loss: nu must be in (0, 1)");
  LossFn l;
  l.eval = [nu](scalar_t x) { return x > 0 ? nu * x * x : (1 - nu) * x * x; };
  l.deriv = [nu](scalar_t x) { return x > 0 ? 2 * nu * x : 2 * (1 - nu) * x; };
  l.name = "expectile_e:nu=" + fmt_param(nu);
  l.family = LossFamily::expectile_e;
  l.p1 = nu;
  l.flags = {.convex = true,
             .strictly_increasing = false,
             .increasing = false,
             .continuously_differentiable = true,
             .deriv_crosses_one = false,
             .lipschitz_bound = std::nullopt};
  return l;
}

LossFn expectile_l(scalar_t nu) {
  if (!(nu > 0 && nu < 1)) throw ArgumentError("expectile loss: nu must be in (0, 1)");
  LossFn l;
  l.eval = [nu](scalar_t x) { return x > 0 ? nu * x : (1 - nu) * x; };
  l.deriv = [nu](scalar_t x) { return x > 0 ? nu : 1 - nu; };
  l.name = "expectile_l:nu=" + fmt_param(nu);
  l.family = LossFamily::expectile_l;
  l.p1 = nu;
  l.flags = {.convex = nu >= 0.5,
             .strictly_increasing = true,
             .increasing = true,
             .continuously_differentiable = false,
             .deriv_crosses_one = false,
             .lipschitz_bound = std::max(nu, 1 - nu)};
  return l;
}

LossFn expectile_lprime(scalar_t nu) {
  if (!(nu > 0 && nu < 1)) throw ArgumentError("expectile loss: nu must be in (0, 1)");
  LossFn l;
  l.eval = [nu](scalar_t x) { return x > 0 ? nu : 1 - nu; };
  l.deriv = [](scalar_t) { return scalar_t(0); };
  l.name = "expectile_lprime:nu=" + fmt_param(nu);
  l.family = LossFamily::expectile_lprime;
  l.p1 = nu;
  l.flags = {.convex = false,
             .strictly_increasing = false,
             .increasing = nu >= 0.5,
             .continuously_differentiable = false,
             .deriv_crosses_one = false,
             .lipschitz_bound = std::nullopt};
  return l;
}

}  // namespace risq
