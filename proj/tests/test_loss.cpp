#include "risq/loss.hpp"

#include "risq/errors.hpp"
#include "risq/random.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace risq;

namespace {

struct Case {
  LossFn loss;
  std::vector<scalar_t> kinks;  // derivative checks avoid these
};

std::vector<Case> all_losses() {
  return {
      {make_entropic(0.5), {}},
      {make_entropic(2.0), {}},
      {make_identity(), {}},
      {make_quadratic(0.0), {0}},
      {make_quadratic(1e-2), {0}},
      {make_polynomial(1.0), {0}},
      {make_polynomial(2.5), {0}},
      {make_cvar(0.75), {0}},
      {make_onpv(2.0, 0.5), {0}},
      {make_mean_variance(2.0), {-1}},
      {make_quartic(), {-1}},
      {expectile_e(0.65), {0}},
      {expectile_l(0.65), {0}},
  };
}

bool near_kink(scalar_t x, const std::vector<scalar_t>& kinks, scalar_t margin) {
  for (scalar_t k : kinks) {
    if (std::abs(x - k) < margin) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("spot values") {
  CHECK(make_entropic(0.5).eval(0) == doctest::Approx(1.0));
  CHECK(make_cvar(0.75).eval(2) == doctest::Approx(8.0));
  CHECK(expectile_l(0.65).eval(2) == doctest::Approx(1.3));
  CHECK(expectile_l(0.65).eval(-2) == doctest::Approx(-0.7));
  CHECK(make_mean_variance(2.0).eval(0) == doctest::Approx(0.0));
  CHECK(make_identity().eval(-3.5) == doctest::Approx(-3.5));
  CHECK(make_quadratic(1e-2).eval(2) == doctest::Approx(4.0));
  CHECK(make_quadratic(1e-2).eval(-2) == doctest::Approx(-0.02));
  CHECK(make_polynomial(3.0).eval(2) == doctest::Approx(8.0 / 3.0));
  CHECK(make_onpv(2.0, 0.5).eval(3) == doctest::Approx(6.0));
  CHECK(make_onpv(2.0, 0.5).eval(-3) == doctest::Approx(-1.5));
  CHECK(make_quartic().eval(0) == doctest::Approx(0.0));
  CHECK(make_quartic().eval(-2) == doctest::Approx(-1.0));
  CHECK(expectile_e(0.65).eval(2) == doctest::Approx(0.65 * 4));
  CHECK(expectile_e(0.65).eval(-2) == doctest::Approx(0.35 * 4));
}

TEST_CASE("derivatives match central finite differences away from kinks") {
  RandomStream rng(101);
  const scalar_t step = 1e-6;
  for (const Case& c : all_losses()) {
    CAPTURE(c.loss.name);
    int checked = 0;
    while (checked < 1000) {
      const scalar_t x = 6 * rng.uniform() - 3;
      if (near_kink(x, c.kinks, 1e-4)) continue;
      ++checked;
      const scalar_t fd = (c.loss.eval(x + step) - c.loss.eval(x - step)) / (2 * step);
      REQUIRE(std::abs(c.loss.deriv(x) - fd) < 1e-5 * std::max(scalar_t(1), std::abs(fd)));
    }
  }
}

TEST_CASE("losses flagged increasing are nondecreasing on a grid") {
  for (const Case& c : all_losses()) {
    if (!c.loss.flags.increasing) continue;
    CAPTURE(c.loss.name);
    scalar_t prev = c.loss.eval(-5.0);
    for (int i = 1; i < 10000; ++i) {
      const scalar_t x = -5.0 + i * 1e-3;
      const scalar_t y = c.loss.eval(x);
      REQUIRE(y >= prev - 1e-12);
      prev = y;
    }
  }
}

TEST_CASE("losses flagged convex satisfy midpoint convexity on a grid") {
  for (const Case& c : all_losses()) {
    if (!c.loss.flags.convex) continue;
    CAPTURE(c.loss.name);
    for (int i = 0; i < 500; ++i) {
      const scalar_t x = -4.0 + i * 8.0 / 500;
      for (int j = i + 1; j < 500; j += 37) {
        const scalar_t y = -4.0 + j * 8.0 / 500;
        const scalar_t mid = c.loss.eval(0.5 * (x + y));
        REQUIRE(mid <= 0.5 * (c.loss.eval(x) + c.loss.eval(y)) + 1e-12);
      }
    }
  }
}

TEST_CASE("quadratic risk with b > 0 is not convex but stays shortfall-eligible") {
  const LossFn q = make_quadratic(1e-2);
  CHECK_FALSE(q.flags.convex);
  CHECK(q.flags.strictly_increasing);
  CHECK(q.ubsr_eligible());
  CHECK_FALSE(q.oce_eligible());
  // the midpoint of (-h, h) dips below the chord for h < b
  const scalar_t h = 5e-3;
  CHECK(q.eval(0) > 0.5 * (q.eval(-h) + q.eval(h)));
}

TEST_CASE("expectile loss identities") {
  const scalar_t nu = 0.65;
  CHECK(expectile_e(nu).eval(0) == 0.0);
  CHECK(expectile_e(nu).eval(1e-12) == doctest::Approx(0.0));
  CHECK(expectile_e(nu).eval(-1e-12) == doctest::Approx(0.0));
  CHECK(expectile_l(nu).eval(0) == 0.0);
  CHECK(expectile_lprime(nu).eval(0) == doctest::Approx(1 - nu));
  CHECK(expectile_lprime(nu).eval(1e-12) == doctest::Approx(nu));
  CHECK(expectile_lprime(nu).eval(-1e-12) == doctest::Approx(1 - nu));
}

TEST_CASE("OCE-eligible losses have a derivative crossing level 1") {
  for (const Case& c : all_losses()) {
    if (!c.loss.oce_eligible()) continue;
    CAPTURE(c.loss.name);
    bool below = false, above = false;
    for (int i = 0; i <= 4000; ++i) {
      const scalar_t x = -20.0 + i * 1e-2;
      const scalar_t d = c.loss.deriv(x) - 1.0;
      below = below || d < 0;
      above = above || d > 0;
    }
    CHECK(below);
    CHECK(above);
  }
}

TEST_CASE("eligibility flags for the canonical pairings") {
  CHECK(make_entropic(0.5).ubsr_eligible());
  CHECK(make_entropic(0.5).oce_eligible());
  CHECK(make_identity().ubsr_eligible());
  CHECK_FALSE(make_identity().oce_eligible());  // derivative pinned at 1
  CHECK(make_cvar(0.9).oce_eligible());
  CHECK_FALSE(make_cvar(0.9).ubsr_eligible());
  CHECK(make_mean_variance(2.0).oce_eligible());
  CHECK(make_quartic().oce_eligible());
  CHECK(make_onpv(2.0, 0.5).ubsr_eligible());
  CHECK(make_onpv(2.0, 0.5).oce_eligible());
  CHECK_FALSE(make_polynomial(1.0).oce_eligible());
  CHECK(make_polynomial(2.0).oce_eligible());
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(make_entropic(0.0), ArgumentError);
  CHECK_THROWS_AS(make_quadratic(-1.0), ArgumentError);
  CHECK_THROWS_AS(make_polynomial(0.5), ArgumentError);
  CHECK_THROWS_AS(make_cvar(1.0), ArgumentError);
  CHECK_THROWS_AS(make_cvar(0.0), ArgumentError);
  CHECK_THROWS_AS(make_onpv(0.5, 0.5), ArgumentError);
  CHECK_THROWS_AS(make_onpv(2.0, 1.5), ArgumentError);
  CHECK_THROWS_AS(make_mean_variance(1.0), ArgumentError);
  CHECK_THROWS_AS(expectile_e(0.0), ArgumentError);
  CHECK_THROWS_AS(expectile_l(1.0), ArgumentError);
}

TEST_CASE("entropic exponent cap raises a range error") {
  const LossFn l = make_entropic(1.0);
  CHECK_THROWS_AS(l.eval(701.0), RangeError);
  CHECK(l.eval(699.0) > 0);
}
