#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "conleg/payoffs.hpp"
#include "conleg/pricing.hpp"
#include "conleg/reference.hpp"
#include "param_sets.hpp"

using namespace conleg;
namespace R = conleg::reference;

namespace {

const std::vector<PayoffKind> kAll{
    PayoffKind::call,
    PayoffKind::put,
    PayoffKind::covered_call,
    PayoffKind::cash_or_nothing_call,
    PayoffKind::cash_or_nothing_put,
    PayoffKind::asset_or_nothing_call,
    PayoffKind::asset_or_nothing_put,
    PayoffKind::asymmetric_call,
    PayoffKind::asymmetric_put,
};

}  // namespace

TEST_CASE("call and put examples") {
  const Interval I(-2.0, 2.0);
  const PiecewiseFun c = payoff_logspace({PayoffKind::call}, I);
  const PiecewiseFun p = payoff_logspace({PayoffKind::put}, I);
  CHECK(std::abs(c(0.0)) <= 1e-14);
  CHECK(c(std::log(2.0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(p(I.lo) == doctest::Approx(1.0 - std::exp(I.lo)).epsilon(1e-14));
  REQUIRE(c.breakpoints().size() == 3);
  CHECK(c.breakpoints()[1] == 0.0);
}

TEST_CASE("cash-or-nothing call is an indicator") {
  const PiecewiseFun f = payoff_logspace({PayoffKind::cash_or_nothing_call}, Interval(-1.5, 0.7));
  CHECK(f(-1.0) == 0.0);
  CHECK(f(-1e-9) == 0.0);
  CHECK(f(0.3) == 1.0);
  CHECK(f(0.7) == 1.0);
}

TEST_CASE("inactive branches are exactly constant") {
  const Interval I(-3.0, 2.5);
  for (PayoffKind k : kAll) {
    PayoffSpec spec{k, 3};
    const PiecewiseFun f = payoff_logspace(spec, I);
    const PayoffBranches br = payoff_branches(spec);
    const bool call = is_call_like(k);
    const ExpAffine& flat = call ? br.left : br.right;
    if (flat.b != 0.0) continue;
    for (int j = 0; j < 50; ++j) {
      const double y = call ? I.lo + (0.0 - I.lo) * j / 50.0 - 1e-12 : 1e-12 + (I.hi - 1e-12) * j / 50.0;
      CAPTURE(payoff_name(k));
      CHECK(f(y) == flat.a);
    }
  }
}

TEST_CASE("payoff curves reproduce U(S,K)/K^p") {
  const Interval I(-2.0, 2.0);
  const double K = 37.0;
  for (PayoffKind k : kAll) {
    PayoffSpec spec{k, 2};
    const PiecewiseFun f = payoff_logspace(spec, I);
    const double kp = std::pow(K, strike_power(spec));
    double err = 0.0;
    for (int j = 0; j <= 400; ++j) {
      const double S = K * std::exp(I.lo + I.width() * j / 400.0);
      err = std::max(err, std::abs(kp * f(std::log(S / K)) - R::payoff(spec, S, K)) / std::max(kp, 1.0));
    }
    CAPTURE(payoff_name(k));
    CHECK(err <= 1e-13);
  }
}

TEST_CASE("single-sided intervals give one piece") {
  CHECK(payoff_logspace({PayoffKind::call}, Interval(0.1, 1.0)).size() == 1);
  CHECK(payoff_logspace({PayoffKind::put}, Interval(-1.0, -0.1)).size() == 1);
  CHECK(payoff_logspace({PayoffKind::put}, Interval(0.1, 1.0))(0.5) == 0.0);
}

TEST_CASE("names round trip and bad names throw") {
  for (PayoffKind k : kAll) CHECK(parse_payoff_kind(payoff_name(k)) == k);
  CHECK_THROWS_AS(parse_payoff_kind("straddle"), ParameterError);
  CHECK_THROWS_AS(validate(PayoffSpec{PayoffKind::asymmetric_call, 0}), ParameterError);
}

TEST_CASE("parity with zero carry at the money") {
  const LevyModel m(Gbm{0.3}, 0.0, 0.0);
  const MarketParams mk{100.0, 0.0, 0.0, 0.0, 1.0};
  const PriceCurve put = price_european(m, {PayoffKind::put}, mk);
  const PriceCurve call = put_call_parity(put, mk);
  CHECK(call.price_at_strike(100.0) == doctest::Approx(put.price_at_strike(100.0)).epsilon(1e-14));
}

TEST_CASE("parity residual over 100 strikes") {
  const auto c = sets::nig1();
  const MarketParams mk{c.S, c.model.r, c.model.q, 0.0, c.T};
  const PriceCurve put = price_european(c.model, {PayoffKind::put}, mk);
  const PriceCurve call = put_call_parity(put, mk);
  double worst = 0.0;
  for (int j = 0; j < 100; ++j) {
    const double K = 80.0 + 40.0 * j / 99.0;
    const double res = call.price_at_strike(K) - put.price_at_strike(K) - c.S * std::exp(-c.model.q * c.T) +
                       K * std::exp(-c.model.r * c.T);
    worst = std::max(worst, std::abs(res));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("gbm1 call via parity matches the closed form") {
  const auto c = sets::gbm1();
  const MarketParams mk{c.S, c.model.r, c.model.q, 0.0, c.T};
  const PriceCurve call = put_call_parity(price_european(c.model, {PayoffKind::put}, mk), mk);
  double worst = 0.0;
  for (int j = 0; j < 200; ++j) {
    const double K = 80.0 + 40.0 * j / 199.0;
    worst = std::max(worst, std::abs(call.price_at_strike(K) - R::bs_price(c.S, K, c.model.r, c.model.q, 0.15, c.T,
                                                                           R::OptionType::call)));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("parity needs a european put") {
  const auto c = sets::gbm1();
  const MarketParams mk{c.S, c.model.r, c.model.q, 0.0, c.T};
  CHECK_THROWS_AS(put_call_parity(price_european(c.model, {PayoffKind::call}, mk), mk), ParameterError);
}
