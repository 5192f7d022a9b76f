#include "risq/risk.hpp"

#include "risq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace risq {

namespace {

constexpr int kMaxBisectIterations = 200;

// Uniform view over samples (weights == nullptr) or distribution atoms.
struct WeightedView {
  const scalar_t* values = nullptr;
  const scalar_t* weights = nullptr;
  index_t n = 0;

  scalar_t min() const { return *std::min_element(values, values + n); }
  scalar_t max() const { return *std::max_element(values, values + n); }

  template <typename Fn>
  scalar_t mean_of(Fn&& fn) const {
    scalar_t acc = 0;
    if (weights == nullptr) {
      for (index_t i = 0; i < n; ++i) acc += fn(values[i]);
      return acc / static_cast<scalar_t>(n);
    }
    for (index_t i = 0; i < n; ++i) acc += weights[i] * fn(values[i]);
    return acc;
  }
};

WeightedView view_of(std::span<const scalar_t> samples) {
  return WeightedView{samples.data(), nullptr, static_cast<index_t>(samples.size())};
}

WeightedView view_of(const DiscreteDist& dist) {
  return WeightedView{dist.values().data(), dist.probs().data(), dist.size()};
}

void check_common(const WeightedView& view, scalar_t tol, const char* op) {
  if (view.n == 0) throw ArgumentError(std::string(op) + ": empty sample set");
  if (!(tol > 0)) throw ArgumentError(std::string(op) + ": tolerance must be positive");
}

scalar_t expectile_root(const WeightedView& view, scalar_t nu, scalar_t tol) {
  scalar_t lo = view.min();
  scalar_t hi = view.max();
  if (lo == hi) return lo;  // degenerate sample set
  const auto residual = [&](scalar_t k) {
    return view.mean_of([&](scalar_t x) {
      const scalar_t d = x - k;
      return d > 0 ? nu * d : (1 - nu) * d;
    });
  };
  // residual is continuous and strictly decreasing; residual(lo) >= 0 >= residual(hi)
  for (int it = 0; it < kMaxBisectIterations && hi - lo > tol; ++it) {
    const scalar_t mid = 0.5 * (lo + hi);
    if (residual(mid) > 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Smallest k (within tol) with residual(k) <= lambda, for a nonincreasing
// residual. Bracket doubles outward from [min - 1, max + 1], limited to
// [min - range, max + range].
scalar_t smallest_feasible(const WeightedView& view, const std::function<scalar_t(scalar_t)>& loss_eval,
                           scalar_t lambda, scalar_t tol, const char* op) {
  const scalar_t vmin = view.min();
  const scalar_t vmax = view.max();
  const scalar_t range = vmax - vmin + 1;
  const scalar_t lo_limit = vmin - range;
  const scalar_t hi_limit = vmax + range;
  const auto residual = [&](scalar_t k) { return view.mean_of([&](scalar_t x) { return loss_eval(x - k); }); };
  const auto feasible = [&](scalar_t k) { return residual(k) <= lambda; };

  scalar_t hi = vmax + 1;
  while (!feasible(hi)) {
    if (hi >= hi_limit) {
      std::ostringstream os;
      os << op << ": threshold lambda=" << lambda << " is below the attainable loss mean "
         << residual(hi_limit) << " on the search bracket [" << lo_limit << ", " << hi_limit << "]";
      throw InfeasibleThresholdError(os.str());
    }
    hi = std::min(vmax + 2 * (hi - vmax), hi_limit);
  }
  scalar_t lo = vmin - 1;
  while (feasible(lo)) {
    if (lo <= lo_limit) {
      std::ostringstream os;
      os << op << ": threshold lambda=" << lambda
         << " is met everywhere on the search bracket; the shortfall root lies below " << lo_limit;
      throw InfeasibleThresholdError(os.str());
    }
    lo = std::max(vmin - 2 * (vmin - lo), lo_limit);
  }
  // invariant: feasible(hi), !feasible(lo)
  for (int it = 0; it < kMaxBisectIterations && hi - lo > tol; ++it) {
    const scalar_t mid = 0.5 * (lo + hi);
    if (feasible(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

scalar_t ubsr_impl(const WeightedView& view, const LossFn& loss, scalar_t lambda, scalar_t tol,
                   const char* op) {
  if (!loss.ubsr_eligible()) {
    throw ConfigError(std::string(op) + ": loss '" + loss.name +
                      "' is not strictly increasing; not usable as a shortfall loss");
  }
  return smallest_feasible(view, loss.eval, lambda, tol, op);
}

OceResult oce_impl(const WeightedView& view, const LossFn& loss, scalar_t tol, const char* op) {
  if (!loss.oce_eligible()) {
    throw ConfigError(std::string(op) + ": loss '" + loss.name +
                      "' is not OCE-eligible (needs convex, increasing, derivative crossing 1)");
  }
  const scalar_t kstar = smallest_feasible(view, loss.deriv, 1.0, tol, op);
  const scalar_t tail = view.mean_of([&](scalar_t x) { return loss.eval(x - kstar); });
  return OceResult{kstar + tail, kstar};
}

}  // namespace

scalar_t empirical_expectile(std::span<const scalar_t> samples, scalar_t nu, scalar_t tol) {
  if (!(nu > 0 && nu < 1)) throw ArgumentError("empirical_expectile: nu must be in (0, 1)");
  const WeightedView view = view_of(samples);
  check_common(view, tol, "empirical_expectile");
  return expectile_root(view, nu, tol);
}

scalar_t empirical_ubsr(std::span<const scalar_t> samples, const LossFn& loss, scalar_t lambda,
                        scalar_t tol) {
  const WeightedView view = view_of(samples);
  check_common(view, tol, "empirical_ubsr");
  return ubsr_impl(view, loss, lambda, tol, "empirical_ubsr");
}

OceResult empirical_oce(std::span<const scalar_t> samples, const LossFn& loss, scalar_t tol) {
  const WeightedView view = view_of(samples);
  check_common(view, tol, "empirical_oce");
  return oce_impl(view, loss, tol, "empirical_oce");
}

scalar_t exact_expectile(const DiscreteDist& dist, scalar_t nu, scalar_t tol) {
  if (!(nu > 0 && nu < 1)) throw ArgumentError("exact_expectile: nu must be in (0, 1)");
  const WeightedView view = view_of(dist);
  check_common(view, tol, "exact_expectile");
  return expectile_root(view, nu, tol);
}

scalar_t exact_ubsr(const DiscreteDist& dist, const LossFn& loss, scalar_t lambda, scalar_t tol) {
  const WeightedView view = view_of(dist);
  check_common(view, tol, "exact_ubsr");
  return ubsr_impl(view, loss, lambda, tol, "exact_ubsr");
}

OceResult exact_oce(const DiscreteDist& dist, const LossFn& loss, scalar_t tol) {
  const WeightedView view = view_of(dist);
  check_common(view, tol, "exact_oce");
  return oce_impl(view, loss, tol, "exact_oce");
}

scalar_t empirical_expectile(const vector_t& samples, scalar_t nu, scalar_t tol) {
  return empirical_expectile(std::span<const scalar_t>(samples.data(), samples.size()), nu, tol);
}

scalar_t empirical_ubsr(const vector_t& samples, const LossFn& loss, scalar_t lambda, scalar_t tol) {
  return empirical_ubsr(std::span<const scalar_t>(samples.data(), samples.size()), loss, lambda, tol);
}

OceResult empirical_oce(const vector_t& samples, const LossFn& loss, scalar_t tol) {
  return empirical_oce(std::span<const scalar_t>(samples.data(), samples.size()), loss, tol);
}

}  // namespace risq
