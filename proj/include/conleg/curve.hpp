#pragma once

#include <optional>

#include "conleg/chebcore.hpp"
#include "conleg/payoffs.hpp"

namespace conleg {

struct MarketParams {
  double S = 100.0;
  double r = 0.0;
  double q = 0.0;
  double t = 0.0;
  double T = 1.0;

  double tau() const { return T - t; }
};

void validate(const MarketParams& m);

// Prices as a function of moneyness xt = log(S/K):
//   V(S, K) = discount * K^p * (curve(xt) + shift(xt))
// Outside the curve's support the tails stand in for curve(xt) when known.
struct PriceCurve {
  PiecewiseFun curve;
  ExpAffine shift;
  std::optional<ExpAffine> tail_lo, tail_hi;
  double discount = 1.0;
  MarketParams market;
  PayoffSpec payoff;
  bool european = true;
  std::optional<double> strike;  // set when the curve only holds for one K (barriers)

  Interval support() const { return curve.domain(); }
  double h(double xt) const;
  double value(double xt) const { return discount * h(xt); }
  double price_at_strike(double K) const;
  double price_at_spot(double S, double K) const;
};

}  // namespace conleg
