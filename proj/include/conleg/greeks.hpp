#pragma once

#include <optional>

#include "conleg/curve.hpp"
#include "conleg/levy.hpp"
#include "conleg/pricing.hpp"

namespace conleg {

enum class GreekKind { delta, gamma, vega };

// greek(S, K) = discount * K^(p - m) * exp(-m xt) * (curve(xt) + analytic(xt)), xt = log(S/K),
// with m = 1 for delta, 2 for gamma, 0 for vega
struct GreekCurve {
  GreekKind kind = GreekKind::delta;
  PiecewiseFun curve;
  ExpAffine analytic;
  std::optional<ExpAffine> tail_lo, tail_hi;
  double discount = 1.0;
  MarketParams market;
  PayoffSpec payoff;
  std::optional<double> strike;

  int spot_power() const;
  double value(double xt) const;
  double at_strike(double K) const;
  double at_spot(double S, double K) const;
};

GreekCurve delta(const PriceCurve& pc);
GreekCurve gamma(const PriceCurve& pc);
// European only; GBM uses the closed-form density derivative, VG and NIG the series route
GreekCurve vega(const LevyModel& model, const PayoffSpec& spec, const MarketParams& market, double Ln = 10.0,
                const PricingOptions& opt = {});

}  // namespace conleg
