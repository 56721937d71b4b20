#pragma once

#include <cmath>
#include <string>

#include "conleg/chebcore.hpp"

namespace conleg {

enum class PayoffKind {
  call,
  put,
  covered_call,
  cash_or_nothing_call,
  cash_or_nothing_put,
  asset_or_nothing_call,
  asset_or_nothing_put,
  asymmetric_call,
  asymmetric_put,
};

struct PayoffSpec {
  PayoffKind kind = PayoffKind::call;
  int n = 1;  // power, asymmetric kinds only
};

// a + b exp(n x)
struct ExpAffine {
  double a = 0.0, b = 0.0, n = 1.0;
  double operator()(double x) const { return b == 0.0 ? a : a + b * std::exp(n * x); }
};

struct PayoffBranches {
  ExpAffine left;   // y < 0
  ExpAffine right;  // y >= 0
};

PayoffKind parse_payoff_kind(const std::string& name);
std::string payoff_name(PayoffKind k);
void validate(const PayoffSpec& spec);
bool is_call_like(PayoffKind k);  // active for y >= 0

// U(S_T, K) = K^p f(log(S_T/K))
double strike_power(const PayoffSpec& spec);
PayoffBranches payoff_branches(const PayoffSpec& spec);
PiecewiseFun payoff_logspace(const PayoffSpec& spec, Interval interval);

struct PriceCurve;
struct MarketParams;
// call curve from a European put curve priced under the same market
PriceCurve put_call_parity(const PriceCurve& put_curve, const MarketParams& market);

}  // namespace conleg
