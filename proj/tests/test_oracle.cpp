#include "risq/oracle.hpp"

#include "risq/errors.hpp"
#include "risq/grad.hpp"
#include "risq/risk.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace risq;
using risq::testing::heavy_tail_bandit;

TEST_CASE("finite differences recover a linear function's coefficients") {
  vector_t c(3);
  c << 2.0, -1.5, 0.25;
  const auto f = [&](const vector_t& t) { return c.dot(t); };
  vector_t theta(3);
  theta << 0.5, -2.0, 3.0;
  const vector_t fd = finite_difference_gradient(f, theta);
  CHECK((fd - c).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("finite differences vanish at a symmetric minimum") {
  const auto f = [](const vector_t& t) { return t.squaredNorm(); };
  const vector_t fd = finite_difference_gradient(f, vector_t::Zero(4));
  CHECK(fd.lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("finite differences reject non-finite values and bad steps") {
  const auto bad = [](const vector_t&) { return std::numeric_limits<scalar_t>::quiet_NaN(); };
  CHECK_THROWS_AS(finite_difference_gradient(bad, vector_t::Zero(1)), OracleError);
  const auto fine = [](const vector_t& t) { return t.sum(); };
  CHECK_THROWS_AS(finite_difference_gradient(fine, vector_t::Zero(1), -1.0), ArgumentError);
}

TEST_CASE("cross-oracle agreement on the expectile gradient of a bandit") {
  const MdpSpec spec = heavy_tail_bandit();
  const PolicySpec policy = tabular_policy(1, 2);
  vector_t theta(2);
  theta << 0.3, -0.2;
  const vector_t formula = exact_expectile_gradient(spec, policy, theta, 0.65, 1e-12);
  const vector_t fd = finite_difference_gradient(
      [&](const vector_t& t) {
        return exact_expectile(return_distribution(spec, policy, t), 0.65, 1e-12);
      },
      theta);
  CHECK((formula - fd).lpNorm<Eigen::Infinity>() <= 1e-4 * (1 + formula.lpNorm<Eigen::Infinity>()));
}

TEST_CASE("grid minimization reproduces the CVaR certainty equivalent") {
  const DiscreteDist uniform4{{1.0, 0.25}, {2.0, 0.25}, {3.0, 0.25}, {4.0, 0.25}};
  const LossFn loss = make_cvar(0.75);
  const auto [value, argmin] = brute_force_oce(uniform4, loss, -2.0, 9.0, 20001);
  CHECK(value == doctest::Approx(4.0).epsilon(1e-4));
  CHECK(argmin >= 3.0 - 1e-3);
  CHECK(argmin <= 4.0 + 1e-3);
  const OceResult bisected = exact_oce(uniform4, loss);
  const scalar_t pitch = 11.0 / 20000;
  CHECK(std::abs(value - bisected.oce) <= std::max(pitch, kDefaultRootTol) * (1 + std::abs(bisected.oce)));
}

TEST_CASE("grid minimization of a point mass returns the atom") {
  const DiscreteDist point = DiscreteDist::point_mass(1.5);
  const auto [value, argmin] = brute_force_oce(point, make_cvar(0.6), -1.0, 4.0, 50001);
  CHECK(value == doctest::Approx(1.5).epsilon(1e-4));
  CHECK(argmin == doctest::Approx(1.5).epsilon(1e-3));
}

TEST_CASE("boundary argmin raises an oracle error") {
  const DiscreteDist point = DiscreteDist::point_mass(1.5);
  CHECK_THROWS_AS(brute_force_oce(point, make_cvar(0.6), 2.0, 5.0, 101), OracleError);
}

TEST_CASE("mean-variance grid value agrees with the bisection path") {
  const DiscreteDist dist{{0.0, 0.3}, {1.0, 0.4}, {2.0, 0.3}};
  const LossFn loss = make_mean_variance(2.0);
  const auto [value, argmin] = brute_force_oce(dist, loss, -3.0, 5.0, 80001);
  const OceResult bisected = exact_oce(dist, loss);
  const scalar_t pitch = 8.0 / 80000;
  CHECK(std::abs(value - bisected.oce) <= std::max(pitch * pitch * 10 + 1e-8, kDefaultRootTol) *
                                              (1 + std::abs(bisected.oce)));
  CHECK(argmin == doctest::Approx(bisected.kstar).epsilon(1e-3));
}

TEST_CASE("a constant estimator yields the flat-zero sentinel") {
  vector_t truth(2);
  truth << 1.0, -1.0;
  const VectorEstimator estimator = [&](index_t, RandomStream&) { return truth; };
  const std::vector<index_t> m_list{100, 1000};
  const MseCurve curve = mse_curve(estimator, truth, m_list, 100, RandomStream(1), "constant");
  CHECK(curve.flat_zero);
  for (const MsePoint& p : curve.points) CHECK(p.mse == 0.0);
}

TEST_CASE("synthetic c/m errors give slope exactly -1") {
  const ScalarEstimator estimator = [](index_t m, RandomStream&) {
    return std::sqrt(2.5 / static_cast<scalar_t>(m));
  };
  const std::vector<index_t> m_list{100, 1000, 10000};
  const MseCurve curve = mse_curve(estimator, 0.0, m_list, 100, RandomStream(2), "synthetic");
  CHECK(curve.slope == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(curve.points[0].mse == doctest::Approx(2.5 / 100).epsilon(1e-12));
}

TEST_CASE("the sample mean decays at 1/m with the variance as level") {
  const DiscreteDist dist{{0.0, 0.5}, {2.0, 0.25}, {-1.0, 0.25}};
  const scalar_t truth = dist.mean();
  const ScalarEstimator estimator = [&](index_t m, RandomStream& rng) {
    scalar_t sum = 0;
    for (index_t i = 0; i < m; ++i) sum += dist.sample(rng);
    return sum / static_cast<scalar_t>(m);
  };
  const std::vector<index_t> m_list{100, 1000, 10000};
  const MseCurve curve = mse_curve(estimator, truth, m_list, 2000, RandomStream(3), "sample mean");
  CHECK(curve.slope == doctest::Approx(-1.0).epsilon(0.1));
  for (const MsePoint& p : curve.points) {
    const scalar_t expected = dist.variance() / static_cast<scalar_t>(p.m);
    REQUIRE(std::abs(p.mse - expected) < 0.3 * expected);
  }
}

TEST_CASE("mse_curve argument validation") {
  const ScalarEstimator est = [](index_t, RandomStream&) { return 0.0; };
  const std::vector<index_t> unsorted{1000, 100};
  CHECK_THROWS_AS(mse_curve(est, 0.0, unsorted, 100, RandomStream(1)), ArgumentError);
  const std::vector<index_t> fine{100, 1000};
  CHECK_THROWS_AS(mse_curve(est, 0.0, fine, 50, RandomStream(1)), ArgumentError);
}

TEST_CASE("tail frequencies: zero beyond the support and decaying ratios under it") {
  // samples live in [0, 1]: estimates never deviate from 0.5 by more than 0.5
  const ScalarEstimator bounded = [](index_t m, RandomStream& rng) {
    scalar_t sum = 0;
    for (index_t i = 0; i < m; ++i) sum += rng.uniform() < 0.5 ? 0.0 : 1.0;
    return sum / static_cast<scalar_t>(m);
  };
  const std::vector<scalar_t> wide{2.0};
  const auto beyond = tail_frequency(bounded, 0.5, 50, wide, 500, RandomStream(4));
  CHECK(beyond[0].second == 0.0);

  // iid Gaussian expectile: doubling epsilon shrinks frequencies at an
  // accelerating rate
  const scalar_t nu = 0.65;
  const ScalarEstimator expectile_est = [&](index_t m, RandomStream& rng) {
    vector_t samples(m);
    for (index_t i = 0; i < m; ++i) samples[i] = rng.normal();
    return empirical_expectile(samples, nu);
  };
  // population expectile of the standard normal at nu = 0.65 via a fine
  // bisection on the analytic residual (test-side closed form)
  const auto normal_residual = [&](scalar_t k) {
    const scalar_t phi = std::exp(-k * k / 2) / std::sqrt(2 * M_PI);
    const scalar_t Phi = 0.5 * std::erfc(-k / std::sqrt(2.0));
    const scalar_t upper = phi - k * (1 - Phi);  // E (X - k)+
    const scalar_t lower = k * Phi + phi;        // E (k - X)+
    return nu * upper - (1 - nu) * lower;
  };
  scalar_t lo = -3, hi = 3;
  for (int it = 0; it < 80; ++it) {
    const scalar_t mid = 0.5 * (lo + hi);
    (normal_residual(mid) > 0 ? lo : hi) = mid;
  }
  const scalar_t truth = 0.5 * (lo + hi);

  const std::vector<scalar_t> eps{0.05, 0.1, 0.2};
  const auto freqs = tail_frequency(expectile_est, truth, 500, eps, 3000, RandomStream(5));
  REQUIRE(freqs[0].second > freqs[1].second);
  REQUIRE(freqs[1].second > freqs[2].second);
  const scalar_t r1 = freqs[1].second / freqs[0].second;
  const scalar_t r2 = freqs[2].second / freqs[1].second;
  CHECK(r1 < 1.0);
  CHECK(r2 < r1);

  // at fixed epsilon the frequency is nonincreasing in m
  const std::vector<scalar_t> fixed_eps{0.1};
  scalar_t prev = 1.0;
  index_t idx = 0;
  for (index_t m : {100, 400, 1600}) {
    const auto f = tail_frequency(expectile_est, truth, m, fixed_eps, 2000, RandomStream(6 + idx++));
    REQUIRE(f[0].second <= prev + 1e-12);
    prev = f[0].second;
  }
}

TEST_CASE("fit_slope recovers an exact line") {
  const std::vector<scalar_t> x{1.0, 2.0, 3.0, 4.0};
  const std::vector<scalar_t> y{1.5, 0.5, -0.5, -1.5};
  CHECK(fit_slope(x, y) == doctest::Approx(-1.0).epsilon(1e-12));
}
