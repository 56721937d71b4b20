#include "conleg/payoffs.hpp"

#include <array>
#include <utility>

#include "conleg/curve.hpp"

namespace conleg {

namespace {

constexpr std::array<std::pair<PayoffKind, const char*>, 9> kNames{{
    {PayoffKind::call, "call"},
    {PayoffKind::put, "put"},
    {PayoffKind::covered_call, "covered_call"},
    {PayoffKind::cash_or_nothing_call, "cash_or_nothing_call"},
    {PayoffKind::cash_or_nothing_put, "cash_or_nothing_put"},
    {PayoffKind::asset_or_nothing_call, "asset_or_nothing_call"},
    {PayoffKind::asset_or_nothing_put, "asset_or_nothing_put"},
    {PayoffKind::asymmetric_call, "asymmetric_call"},
    {PayoffKind::asymmetric_put, "asymmetric_put"},
}};

bool asymmetric(PayoffKind k) { return k == PayoffKind::asymmetric_call || k == PayoffKind::asymmetric_put; }

ChebSeries branch_series(const ExpAffine& e, Interval dom) {
  if (e.b == 0.0) return ChebSeries(Eigen::VectorXd::Constant(1, e.a), dom);
  return adaptive_fit([e](double y) { return e(y); }, dom);
}

}  // namespace

PayoffKind parse_payoff_kind(const std::string& name) {
  for (const auto& [k, s] : kNames)
    if (name == s) return k;
  throw ParameterError("unknown payoff kind '" + name + "'");
}

std::string payoff_name(PayoffKind k) {
  for (const auto& [kk, s] : kNames)
    if (kk == k) return s;
  throw ParameterError("unknown payoff kind");
}

void validate(const PayoffSpec& spec) {
  payoff_name(spec.kind);
  if (asymmetric(spec.kind) && spec.n < 1) throw ParameterError("asymmetric payoff: n must be a positive integer");
}

bool is_call_like(PayoffKind k) {
  switch (k) {
    case PayoffKind::call:
    case PayoffKind::cash_or_nothing_call:
    case PayoffKind::asset_or_nothing_call:
    case PayoffKind::asymmetric_call:
      return true;
    default:
      return false;
  }
}

double strike_power(const PayoffSpec& spec) {
  validate(spec);
  switch (spec.kind) {
    case PayoffKind::cash_or_nothing_call:
    case PayoffKind::cash_or_nothing_put:
      return 0.0;
    case PayoffKind::asymmetric_call:
    case PayoffKind::asymmetric_put:
      return spec.n;
    default:
      return 1.0;
  }
}

PayoffBranches payoff_branches(const PayoffSpec& spec) {
  validate(spec);
  const double n = spec.n;
  switch (spec.kind) {
    case PayoffKind::call: return {{}, {-1.0, 1.0, 1.0}};
    case PayoffKind::put: return {{1.0, -1.0, 1.0}, {}};
    case PayoffKind::covered_call: return {{0.0, 1.0, 1.0}, {1.0, 0.0, 1.0}};
    case PayoffKind::cash_or_nothing_call: return {{}, {1.0, 0.0, 1.0}};
    case PayoffKind::cash_or_nothing_put: return {{1.0, 0.0, 1.0}, {}};
    case PayoffKind::asset_or_nothing_call: return {{}, {0.0, 1.0, 1.0}};
    case PayoffKind::asset_or_nothing_put: return {{0.0, 1.0, 1.0}, {}};
    case PayoffKind::asymmetric_call: return {{}, {-1.0, 1.0, n}};
    case PayoffKind::asymmetric_put: return {{1.0, -1.0, n}, {}};
  }
  throw ParameterError("unknown payoff kind");
}

PiecewiseFun payoff_logspace(const PayoffSpec& spec, Interval interval) {
  const PayoffBranches br = payoff_branches(spec);
  if (interval.hi <= 0.0) return PiecewiseFun(branch_series(br.left, interval));
  if (interval.lo >= 0.0) return PiecewiseFun(branch_series(br.right, interval));
  return PiecewiseFun({interval.lo, 0.0, interval.hi},
                      {branch_series(br.left, Interval(interval.lo, 0.0)),
                       branch_series(br.right, Interval(0.0, interval.hi))});
}

PriceCurve put_call_parity(const PriceCurve& put_curve, const MarketParams& market) {
  if (put_curve.payoff.kind != PayoffKind::put || !put_curve.european)
    throw ParameterError("put_call_parity: needs a European put curve");
  validate(market);
  // call/K = put/K + e^{xt} e^{-q tau} - e^{-r tau}, i.e. h gains e^{xt + (r-q) tau} - 1
  const double tau = market.tau();
  PriceCurve c = put_curve;
  c.market = market;
  c.payoff = PayoffSpec{PayoffKind::call, 1};
  c.discount = std::exp(-market.r * tau);
  if (c.shift.b != 0.0 && c.shift.n != 1.0) throw ParameterError("put_call_parity: incompatible curve shift");
  c.shift = ExpAffine{c.shift.a - 1.0, c.shift.b + std::exp((market.r - market.q) * tau), 1.0};
  return c;
}

}  // namespace conleg
