#include "conleg/greeks.hpp"

#include <cmath>
#include <sstream>

#include "conleg/legconv.hpp"

namespace conleg {

namespace {

// d/dx and d2/dx2 - d/dx of a + b e^{nx}
ExpAffine d1(const ExpAffine& e) { return {0.0, e.b * e.n, e.n}; }
ExpAffine d21(const ExpAffine& e) { return {0.0, e.b * (e.n * e.n - e.n), e.n}; }

std::optional<ExpAffine> map_tail(const std::optional<ExpAffine>& t, ExpAffine (*fn)(const ExpAffine&)) {
  if (!t) return std::nullopt;
  return fn(*t);
}

GreekCurve base(const PriceCurve& pc, GreekKind kind) {
  if (!pc.european) throw ParameterError("greeks are available for European curves only");
  GreekCurve g;
  g.kind = kind;
  g.discount = pc.discount;
  g.market = pc.market;
  g.payoff = pc.payoff;
  g.strike = pc.strike;
  return g;
}

}  // namespace

int GreekCurve::spot_power() const {
  switch (kind) {
    case GreekKind::delta: return 1;
    case GreekKind::gamma: return 2;
    case GreekKind::vega: return 0;
  }
  return 0;
}

double GreekCurve::value(double xt) const {
  const Interval I = curve.domain();
  double v;
  if (xt >= I.lo && xt <= I.hi) {
    v = curve(xt);
  } else if (xt < I.lo && tail_lo) {
    v = (*tail_lo)(xt);
  } else if (xt > I.hi && tail_hi) {
    v = (*tail_hi)(xt);
  } else {
    std::ostringstream os;
    os << "log(S/K) = " << xt << " lies outside the priced interval [" << I.lo << ", " << I.hi << "]";
    throw ParameterError(os.str());
  }
  return discount * std::exp(-spot_power() * xt) * (v + analytic(xt));
}

double GreekCurve::at_spot(double S, double K) const {
  if (!(S > 0.0) || !(K > 0.0)) throw ParameterError("greek: S and K must be positive");
  if (strike && std::abs(K - *strike) > 1e-12 * *strike)
    throw ParameterError("greek: this curve was built for a single strike");
  return value(std::log(S / K)) * std::pow(K, strike_power(payoff) - spot_power());
}

double GreekCurve::at_strike(double K) const { return at_spot(market.S, K); }

GreekCurve delta(const PriceCurve& pc) {
  GreekCurve g = base(pc, GreekKind::delta);
  g.curve = differentiate(pc.curve, 1);
  g.analytic = d1(pc.shift);
  g.tail_lo = map_tail(pc.tail_lo, d1);
  g.tail_hi = map_tail(pc.tail_hi, d1);
  return g;
}

GreekCurve gamma(const PriceCurve& pc) {
  GreekCurve g = base(pc, GreekKind::gamma);
  g.curve = lincomb(1.0, differentiate(pc.curve, 2), -1.0, differentiate(pc.curve, 1));
  g.analytic = d21(pc.shift);
  g.tail_lo = map_tail(pc.tail_lo, d21);
  g.tail_hi = map_tail(pc.tail_hi, d21);
  return g;
}

GreekCurve vega(const LevyModel& model, const PayoffSpec& spec, const MarketParams& market, double Ln,
                const PricingOptions& opt) {
  validate(market);
  validate(spec);
  if (!has_sigma_derivative(model)) throw ParameterError("vega unsupported for " + model_name(model));
  const double tau = market.tau();
  const Interval I = truncation_interval(model, tau, Ln);
  const Interval R(-I.hi, -I.lo);
  const PiecewiseFun f = payoff_logspace(spec, I);

  GreekCurve g;
  g.kind = GreekKind::vega;
  // differentiate at fixed drift; moving the drift only translates the price curve,
  // which contributes tau * d(omega)/d(sigma) * h'
  const PiecewiseFun kernel = build_reflected_density_dsigma(model, I, tau, opt.density);
  const PiecewiseFun centred = conv_general(f, kernel, ConvMode::same, opt.tol);
  const PriceCurve pc = price_european(model, spec, market, Ln, opt);
  PiecewiseFun dh = differentiate(pc.curve, 1);
  if (dh.domain().lo != I.lo || dh.domain().hi != I.hi) dh = restrict_to(dh, I, opt.tol);
  g.curve = lincomb(1.0, centred, tau * compensator_dsigma(model), dh, opt.tol);
  g.discount = std::exp(-market.r * tau);
  g.market = market;
  g.payoff = spec;
  // tails: d/dsigma of a + b e^{n xt} E[e^{nZ}]
  const PayoffBranches br = payoff_branches(spec);
  auto tail = [&](const ExpAffine& e) -> std::optional<ExpAffine> {
    if (e.b == 0.0) return ExpAffine{};
    const double dm = char_fn_dsigma(model, std::complex<double>(0.0, -e.n), tau).real();
    if (!std::isfinite(dm)) return std::nullopt;
    return ExpAffine{0.0, e.b * dm, e.n};
  };
  g.tail_lo = tail(br.left);
  g.tail_hi = tail(br.right);
  return g;
}

}  // namespace conleg
