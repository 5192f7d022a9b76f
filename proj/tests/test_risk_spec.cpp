#include "risq/risk_spec.hpp"

#include "risq/errors.hpp"

#include <doctest.h>

using namespace risq;

TEST_CASE("expectile spec string") {
  const RiskSpec r = parse_risk_spec("expectile:nu=0.65");
  CHECK(r.kind == RiskKind::expectile);
  CHECK(r.nu == doctest::Approx(0.65));
  CHECK_FALSE(r.double_sampled());
  CHECK(r.text == "expectile:nu=0.65");
}

TEST_CASE("entropic shortfall spec string") {
  const RiskSpec r = parse_risk_spec("ubsr:loss=entropic:beta=0.5,lambda=1");
  CHECK(r.kind == RiskKind::ubsr);
  CHECK(r.loss.family == LossFamily::entropic);
  CHECK(r.loss.p1 == doctest::Approx(0.5));
  CHECK(r.lambda == doctest::Approx(1.0));
  CHECK_FALSE(r.double_sampled());  // single-batch closed-form estimator
}

TEST_CASE("quadratic shortfall spec string") {
  const RiskSpec r = parse_risk_spec("ubsr:loss=quadratic:b=0.01,lambda=0.5");
  CHECK(r.kind == RiskKind::ubsr);
  CHECK(r.loss.family == LossFamily::quadratic);
  CHECK(r.loss.p1 == doctest::Approx(0.01));
  CHECK(r.lambda == doctest::Approx(0.5));
  CHECK(r.double_sampled());
}

TEST_CASE("certainty-equivalent spec strings") {
  const RiskSpec cvar = parse_risk_spec("oce:loss=cvar:alpha=0.9");
  CHECK(cvar.kind == RiskKind::oce);
  CHECK(cvar.loss.family == LossFamily::cvar);
  CHECK(cvar.double_sampled());

  const RiskSpec mv = parse_risk_spec("oce:loss=meanvar:a=2");
  CHECK(mv.loss.family == LossFamily::mean_variance);
  CHECK(mv.loss.p1 == doctest::Approx(2.0));

  const RiskSpec onpv = parse_risk_spec("oce:loss=onpv:a=2:b=0.5");
  CHECK(onpv.loss.family == LossFamily::onpv);
  CHECK(onpv.loss.p2 == doctest::Approx(0.5));
}

TEST_CASE("range errors") {
  CHECK_THROWS_AS(parse_risk_spec("expectile:nu=1.5"), ArgumentError);
  CHECK_THROWS_AS(parse_risk_spec("ubsr:loss=entropic:beta=-1,lambda=1"), ArgumentError);
  CHECK_THROWS_AS(parse_risk_spec("oce:loss=cvar:alpha=2"), ArgumentError);
}

TEST_CASE("parse errors name the offending token") {
  CHECK_THROWS_WITH_AS(parse_risk_spec("quantile:q=0.5"), doctest::Contains("quantile"), ParseError);
  CHECK_THROWS_WITH_AS(parse_risk_spec("ubsr:loss=huber:d=1,lambda=1"), doctest::Contains("huber"),
                       ParseError);
  CHECK_THROWS_AS(parse_risk_spec("expectile:mu=0.5"), ParseError);
  CHECK_THROWS_AS(parse_risk_spec("expectile:nu=abc"), ParseError);
  CHECK_THROWS_AS(parse_risk_spec("expectile"), ParseError);
  CHECK_THROWS_AS(parse_risk_spec("ubsr:loss=identity"), ParseError);            // missing lambda
  CHECK_THROWS_AS(parse_risk_spec("oce:loss=cvar:alpha=0.5,lambda=1"), ParseError);  // stray lambda
  CHECK_THROWS_AS(parse_risk_spec("ubsr:loss=entropic:beta=1,lambda=1,lambda=2"), ParseError);
  CHECK_THROWS_AS(parse_risk_spec("ubsr:loss=entropic:beta=1:beta=2,lambda=1"), ParseError);
}

TEST_CASE("eligibility violations are configuration errors") {
  CHECK_THROWS_AS(parse_risk_spec("ubsr:loss=cvar:alpha=0.5,lambda=1"), ConfigError);
  CHECK_THROWS_AS(parse_risk_spec("ubsr:loss=meanvar:a=2,lambda=1"), ConfigError);
  CHECK_THROWS_AS(parse_risk_spec("oce:loss=identity"), ConfigError);
  CHECK_THROWS_AS(parse_risk_spec("oce:loss=quadratic:b=0.01"), ConfigError);
}

TEST_CASE("constructors echo a canonical text form") {
  CHECK(ubsr_risk(make_entropic(0.5), 1.0).text == "ubsr:loss=entropic:beta=0.5,lambda=1");
  CHECK(oce_risk(make_cvar(0.9)).text == "oce:loss=cvar:alpha=0.9");
  // canonical text parses back to the same spec
  const RiskSpec r = parse_risk_spec(ubsr_risk(make_quadratic(0.01), 0.5).text);
  CHECK(r.loss.p1 == doctest::Approx(0.01));
  CHECK(r.lambda == doctest::Approx(0.5));
}
