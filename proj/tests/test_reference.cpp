#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <vector>

#include "conleg/reference.hpp"
#include "param_sets.hpp"

using namespace conleg;
namespace R = conleg::reference;

namespace {

MarketParams market_of(const sets::Case& c) { return {c.S, c.model.r, c.model.q, 0.0, c.T}; }

}  // namespace

TEST_CASE("black-scholes parity and limits") {
  for (double K : {70.0, 100.0, 130.0}) {
    const double c = R::bs_price(100.0, K, 0.04, 0.01, 0.3, 2.0, R::OptionType::call);
    const double p = R::bs_price(100.0, K, 0.04, 0.01, 0.3, 2.0, R::OptionType::put);
    CHECK(c - p == doctest::Approx(100.0 * std::exp(-0.02) - K * std::exp(-0.08)).epsilon(1e-13));
  }
  CHECK(R::bs_price(100.0, 1e-8, 0.0, 0.0, 0.2, 1.0, R::OptionType::call) ==
        doctest::Approx(100.0 - 1e-8).epsilon(1e-14));
  CHECK(R::norm_cdf(0.0) == 0.5);
  CHECK(R::norm_cdf(-40.0) >= 0.0);
}

TEST_CASE("black-scholes greeks against finite differences") {
  const double S = 100.0, r = 0.03, q = 0.01, s = 0.2, T = 0.7, h = 1e-2;
  for (R::OptionType ty : {R::OptionType::call, R::OptionType::put}) {
    for (double K : {80.0, 100.0, 120.0}) {
      auto v = [&](double x) { return R::bs_price(x, K, r, q, s, T, ty); };
      auto w = [&](double x) { return R::bs_price(S, K, r, q, x, T, ty); };
      const auto g = R::bs_greeks(S, K, r, q, s, T, ty);
      const double d = (v(S - 2 * h) - 8 * v(S - h) + 8 * v(S + h) - v(S + 2 * h)) / (12 * h);
      const double gm = (-v(S - 2 * h) + 16 * v(S - h) - 30 * v(S) + 16 * v(S + h) - v(S + 2 * h)) / (12 * h * h);
      const double hv = 1e-4;
      const double vg = (w(s - 2 * hv) - 8 * w(s - hv) + 8 * w(s + hv) - w(s + 2 * hv)) / (12 * hv);
      CHECK(std::abs(g.delta - d) <= 1e-9);
      CHECK(std::abs(g.gamma - gm) <= 1e-7);
      CHECK(std::abs(g.vega - vg) <= 1e-8);
    }
  }
}

TEST_CASE("oracle densities integrate to one") {
  for (const auto& c : {sets::gbm1(), sets::gbm2(50.0), sets::vg1(), sets::nig1(), sets::cgmy1(), sets::cgmy2()}) {
    const R::OracleDensity g(c.model, c.T);
    const Interval I = truncation_interval(c.model, c.T, 12.0);
    // split at the drift point where the vg density peaks
    const double m = drift(c.model) * c.T;
    boost::math::quadrature::tanh_sinh<double> ts;
    double mass = 0.0;
    for (auto [a, b] : {std::pair{I.lo, m}, std::pair{m, I.hi}})
      mass += (b - a) * ts.integrate([&](double u) { return g(a + (b - a) * u); }, 0.0, 1.0, 1e-12);
    CAPTURE(c.name);
    CHECK(std::abs(mass - 1.0) <= 1e-6);
  }
}

TEST_CASE("one-date induction matches the european quadrature") {
  const auto c = sets::nig1();
  const MarketParams mk = market_of(c);
  std::vector<double> ks{85.0, 100.0, 115.0}, xt;
  for (double K : ks) xt.push_back(std::log(c.S / K));
  const auto v = R::quad_backward_induction(c.model, {PayoffKind::put}, mk, ExerciseSchedule::uniform(0.0, c.T, 1), xt);
  for (std::size_t j = 0; j < ks.size(); ++j)
    CHECK(std::abs(ks[j] * v[j] - R::quad_price_european(c.model, {PayoffKind::put}, mk, ks[j])) <= 1e-8);
}

TEST_CASE("nig1 ten-date induction converges in the cell count") {
  const auto c = sets::nig1();
  const MarketParams mk = market_of(c);
  const ExerciseSchedule sch = ExerciseSchedule::uniform(0.0, c.T, 10);
  std::vector<double> xt;
  for (double K : {80.0, 95.0, 100.0, 105.0, 120.0}) xt.push_back(std::log(c.S / K));
  R::QuadGrid fine;
  fine.cells = 1024;
  const auto a = R::quad_backward_induction(c.model, {PayoffKind::put}, mk, sch, xt);
  const auto b = R::quad_backward_induction(c.model, {PayoffKind::put}, mk, sch, xt, fine);
  for (std::size_t j = 0; j < xt.size(); ++j) CHECK(std::abs(a[j] - b[j]) <= 1e-9);
}

TEST_CASE("deep in-the-money cash-or-nothing call") {
  const auto c = sets::vg1();
  const MarketParams mk = market_of(c);
  CHECK(R::quad_price_european(c.model, {PayoffKind::cash_or_nothing_call}, mk, 1e-3) ==
        doctest::Approx(std::exp(-c.model.r * c.T)).epsilon(1e-10));
}

TEST_CASE("one-date fft agrees with the european quadrature") {
  const auto c = sets::cgmy1();
  const MarketParams mk = market_of(c);
  std::vector<double> xt{-0.3, 0.0, 0.3};
  const auto v = R::dense_bermudan_fft(c.model, {PayoffKind::put}, mk, 1, xt);
  for (std::size_t j = 0; j < xt.size(); ++j) {
    const double want = R::quad_price_european(c.model, {PayoffKind::put}, mk, c.S * std::exp(-xt[j]));
    CHECK(std::abs(v[j] * c.S * std::exp(-xt[j]) - want) <= 1e-6);
  }
}

TEST_CASE("payoff table") {
  CHECK(R::payoff({PayoffKind::call}, 110.0, 100.0) == 10.0);
  CHECK(R::payoff({PayoffKind::put}, 110.0, 100.0) == 0.0);
  CHECK(R::payoff({PayoffKind::cash_or_nothing_put}, 90.0, 100.0) == 1.0);
  CHECK(R::payoff({PayoffKind::asset_or_nothing_call}, 110.0, 100.0) == 110.0);
}

TEST_CASE("oracle closed forms agree with the library densities") {
  for (const auto& c : {sets::gbm1(), sets::vg1(), sets::nig1()}) {
    for (double t : {0.1, 1.0}) {
      const R::OracleDensity g(c.model, t);
      const Interval I = truncation_interval(c.model, t);
      double e = 0.0;
      for (int j = 1; j < 200; ++j) {
        const double x = I.lo + I.width() * (j + 0.37) / 200;
        const double want = pdf_closed_form(c.model, x, t);
        e = std::max(e, std::abs(g(x) - want) / std::max(want, 1e-3));
      }
      CAPTURE(c.name);
      CHECK(e <= 1e-12);
    }
  }
}
