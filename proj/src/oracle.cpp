#include "risq/oracle.hpp"

#include "risq/errors.hpp"

#include <cmath>
#include <string>

namespace risq {

vector_t finite_difference_gradient(const std::function<scalar_t(const vector_t&)>& f, const vector_t& theta,
                                    scalar_t step) {
  if (!(step > 0)) throw ArgumentError("finite_difference_gradient: step must be positive");
  vector_t grad(theta.size());
  vector_t probe = theta;
  for (index_t i = 0; i < theta.size(); ++i) {
    const scalar_t h = step * std::max(scalar_t(1), std::abs(theta[i]));
    probe[i] = theta[i] + h;
    const scalar_t up = f(probe);
    probe[i] = theta[i] - h;
    const scalar_t down = f(probe);
    probe[i] = theta[i];
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw OracleError("finite_difference_gradient: non-finite function value at coordinate " +
                        std::to_string(i));
    }
    grad[i] = (up - down) / (2 * h);
  }
  return grad;
}

std::pair<scalar_t, scalar_t> brute_force_oce(const DiscreteDist& dist, const LossFn& loss, scalar_t lo,
                                              scalar_t hi, index_t n) {
  if (n < 3) throw ArgumentError("brute_force_oce: need at least 3 grid points");
  if (!(lo < hi)) throw ArgumentError("brute_force_oce: need lo < hi");
  const scalar_t pitch = (hi - lo) / static_cast<scalar_t>(n - 1);
  scalar_t best_value = std::numeric_limits<scalar_t>::infinity();
  index_t best_index = 0;
  for (index_t i = 0; i < n; ++i) {
    const scalar_t k = lo + pitch * static_cast<scalar_t>(i);
    scalar_t objective = k;
    for (index_t j = 0; j < dist.size(); ++j) {
      objective += dist.prob(j) * loss.eval(dist.value(j) - k);
    }
    if (objective < best_value) {
      best_value = objective;
      best_index = i;
    }
  }
  if (best_index == 0 || best_index == n - 1) {
    throw OracleError("brute_force_oce: argmin on grid boundary; widen the grid");
  }
  return {best_value, lo + pitch * static_cast<scalar_t>(best_index)};
}

scalar_t fit_slope(std::span<const scalar_t> x, std::span<const scalar_t> y) {
  if (x.size() != y.size() || x.size() < 2) throw ArgumentError("fit_slope: need >= 2 paired points");
  const auto n = static_cast<scalar_t>(x.size());
  scalar_t sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

MseCurve mse_curve(const VectorEstimator& estimator, const vector_t& truth, std::span<const index_t> m_list,
                   index_t replications, const RandomStream& rng, std::string target) {
  if (m_list.empty()) throw ArgumentError("mse_curve: empty m list");
  if (replications < 100) throw ArgumentError("mse_curve: need at least 100 replications");
  for (std::size_t i = 1; i < m_list.size(); ++i) {
    if (m_list[i] <= m_list[i - 1]) throw ArgumentError("mse_curve: m list must be strictly increasing");
  }

  MseCurve curve;
  curve.target = std::move(target);
  for (std::size_t i = 0; i < m_list.size(); ++i) {
    scalar_t total_sq = 0;
    for (index_t r = 0; r < replications; ++r) {
      RandomStream sub = rng.substream(static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(replications) +
                                       static_cast<std::uint64_t>(r));
      const vector_t estimate = estimator(m_list[i], sub);
      total_sq += (estimate - truth).squaredNorm();
    }
    curve.points.push_back({m_list[i], total_sq / static_cast<scalar_t>(replications), replications});
  }

  std::vector<scalar_t> log_m, log_mse;
  for (const MsePoint& p : curve.points) {
    if (p.mse > 0) {
      log_m.push_back(std::log(static_cast<scalar_t>(p.m)));
      log_mse.push_back(std::log(p.mse));
    }
  }
  if (log_m.size() < 2) {
    curve.flat_zero = true;
    curve.slope = 0;
  } else {
    curve.slope = fit_slope(log_m, log_mse);
  }
  return curve;
}

MseCurve mse_curve(const ScalarEstimator& estimator, scalar_t truth, std::span<const index_t> m_list,
                   index_t replications, const RandomStream& rng, std::string target) {
  const VectorEstimator wrapped = [&estimator](index_t m, RandomStream& sub) {
    return vector_t::Constant(1, estimator(m, sub));
  };
  return mse_curve(wrapped, vector_t::Constant(1, truth), m_list, replications, rng, std::move(target));
}

std::vector<std::pair<scalar_t, scalar_t>> tail_frequency(const ScalarEstimator& estimator, scalar_t truth,
                                                          index_t m, std::span<const scalar_t> eps_list,
                                                          index_t replications, const RandomStream& rng) {
  if (eps_list.empty()) throw ArgumentError("tail_frequency: empty epsilon list");
  if (replications < 1) throw ArgumentError("tail_frequency: need at least one replication");
  std::vector<index_t> counts(eps_list.size(), 0);
  for (index_t r = 0; r < replications; ++r) {
    RandomStream sub = rng.substream(static_cast<std::uint64_t>(r));
    const scalar_t deviation = std::abs(estimator(m, sub) - truth);
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
      if (deviation >= eps_list[i]) ++counts[i];
    }
  }
  std::vector<std::pair<scalar_t, scalar_t>> out;
  out.reserve(eps_list.size());
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    out.emplace_back(eps_list[i], static_cast<scalar_t>(counts[i]) / static_cast<scalar_t>(replications));
  }
  return out;
}

}  // namespace risq
