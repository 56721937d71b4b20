#include "conleg/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <sstream>

#include "conleg/legconv.hpp"

namespace conleg {

void validate(const MarketParams& m) {
  if (!(m.S > 0.0)) throw ParameterError("market: S must be positive");
  if (!(m.t >= 0.0)) throw ParameterError("market: t must be nonnegative");
  if (!(m.T > m.t)) throw ParameterError("market: need T > t");
  if (!std::isfinite(m.r) || !std::isfinite(m.q)) throw ParameterError("market: rates must be finite");
}

double PriceCurve::h(double xt) const {
  const Interval I = support();
  double base;
  if (xt >= I.lo && xt <= I.hi) {
    base = curve(xt);
  } else if (xt < I.lo && tail_lo) {
    base = (*tail_lo)(xt);
  } else if (xt > I.hi && tail_hi) {
    base = (*tail_hi)(xt);
  } else {
    std::ostringstream os;
    os << "log(S/K) = " << xt << " lies outside the priced interval [" << I.lo << ", " << I.hi << "]";
    throw ParameterError(os.str());
  }
  return base + shift(xt);
}

double PriceCurve::price_at_spot(double S, double K) const {
  if (!(S > 0.0) || !(K > 0.0)) throw ParameterError("price: S and K must be positive");
  if (strike && std::abs(K - *strike) > 1e-12 * *strike)
    throw ParameterError("price: this curve was built for a single strike");
  return value(std::log(S / K)) * std::pow(K, strike_power(payoff));
}

double PriceCurve::price_at_strike(double K) const { return price_at_spot(market.S, K); }

ExerciseSchedule ExerciseSchedule::uniform(double t, double T, int L) {
  if (L < 1) throw ParameterError("schedule: need at least one date");
  ExerciseSchedule s;
  for (int l = 0; l <= L; ++l) s.dates.push_back(l == L ? T : t + (T - t) * l / L);
  return s;
}

void validate(const ExerciseSchedule& s, const MarketParams& m) {
  if (s.dates.size() < 2) throw ParameterError("schedule: need t_0 and at least one exercise date");
  if (s.dates.front() != m.t || s.dates.back() != m.T)
    throw ParameterError("schedule: dates must run from t to T");
  for (std::size_t i = 1; i < s.dates.size(); ++i)
    if (!(s.dates[i] > s.dates[i - 1])) throw ParameterError("schedule: dates must be strictly increasing");
}

namespace {

std::optional<ExpAffine> tail(const LevyModel& model, const ExpAffine& branch, double tau) {
  if (branch.b == 0.0) return branch;
  const std::complex<double> m = char_fn(model, std::complex<double>(0.0, -branch.n), tau);
  if (!std::isfinite(m.real())) return std::nullopt;
  return ExpAffine{branch.a, branch.b * m.real(), branch.n};
}

double payoff_value(const PayoffBranches& br, double y) { return y < 0.0 ? br.left(y) : br.right(y); }

double sample_scale(const PiecewiseFun& f) {
  double v = 0.0;
  const Eigen::VectorXd s = cheb_points(17);
  for (const auto& p : f.pieces())
    for (Eigen::Index j = 0; j < s.size(); ++j) v = std::max(v, std::abs(p(p.domain().from_unit(s(j)))));
  return v;
}

// densities for the induction, one per distinct step length
class DensityCache {
 public:
  DensityCache(const LevyModel& m, double Ln, const DensityOptions& opt) : m_(m), Ln_(Ln), opt_(opt) {}

  const PiecewiseFun& get(double dt) {
    for (auto& [k, v] : cache_)
      if (std::abs(k - dt) <= 1e-12 * dt) return v;
    const Interval J = truncation_interval(m_, dt, Ln_);
    return cache_.emplace(dt, build_reflected_density(m_, J, dt, opt_)).first->second;
  }

 private:
  const LevyModel& m_;
  double Ln_;
  DensityOptions opt_;
  std::map<double, PiecewiseFun> cache_;
};

// max(C, f) with the exercise boundary as a breakpoint
PiecewiseFun exercise_max(const PiecewiseFun& C, const PayoffSpec& spec, const PricingOptions& opt) {
  const PayoffBranches br = payoff_branches(spec);
  const Interval I = C.domain();
  const bool call = is_call_like(spec.kind);
  auto active = [&](double a, double b) { return call ? a >= 0.0 : b <= 0.0; };
  auto f = [&](double y) { return payoff_value(br, y); };

  std::vector<double> bp = C.breakpoints();
  if (I.lo < 0.0 && I.hi > 0.0) bp.push_back(0.0);
  std::sort(bp.begin(), bp.end());
  bp = merge_breakpoints(bp, 1e-13);

  FitOptions fo;
  fo.tol = opt.refit_tol;
  fo.vscale = std::max(sample_scale(C), 1.0);

  std::vector<double> cuts = bp;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    const double a = bp[i], b = bp[i + 1];
    if (!active(a, b)) continue;
    const ChebSeries& cp = C.pieces()[C.piece_index(0.5 * (a + b))];
    const ChebSeries D = adaptive_fit([&](double y) { return cp(y) - f(y); }, Interval(a, b), fo);
    for (double r : roots(D))
      if (r > a && r < b) cuts.push_back(r);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts = merge_breakpoints(cuts, 1e-13);

  std::vector<ChebSeries> pieces;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1], mid = 0.5 * (a + b);
    const ChebSeries& cp = C.pieces()[C.piece_index(mid)];
    const bool exercise = active(a, b) && f(mid) > cp(mid);
    if (exercise)
      pieces.push_back(adaptive_fit(f, Interval(a, b), fo));
    else
      pieces.push_back(adaptive_fit([&](double y) { return cp(y); }, Interval(a, b), fo));
  }
  return PiecewiseFun(cuts, pieces);
}

PriceCurve price_european_once(const LevyModel& model, const PayoffSpec& spec, const MarketParams& market, double Ln,
                               const PricingOptions& opt) {
  const double tau = market.tau();
  const Interval I = truncation_interval(model, tau, Ln);
  const PiecewiseFun f = payoff_logspace(spec, I);
  const PiecewiseFun gR = build_reflected_density(model, I, tau, opt.density);
  PriceCurve pc;
  pc.curve = conv_general(f, gR, ConvMode::same, opt.tol);
  const PayoffBranches br = payoff_branches(spec);
  pc.tail_lo = tail(model, br.left, tau);
  pc.tail_hi = tail(model, br.right, tau);
  pc.discount = std::exp(-market.r * tau);
  pc.market = market;
  pc.payoff = spec;
  pc.european = true;
  return pc;
}

}  // namespace

PriceCurve price_european(const LevyModel& model, const PayoffSpec& spec, const MarketParams& market, double Ln,
                          const PricingOptions& opt) {
  validate(market);
  validate(spec);
  try {
    return price_european_once(model, spec, market, Ln, opt);
  } catch (const NumericalError&) {
    if (Ln >= 12.0) throw;
  }
  return price_european_once(model, spec, market, 12.0, opt);
}

PriceCurve price_bermudan(const LevyModel& model, const PayoffSpec& spec, const MarketParams& market,
                          const ExerciseSchedule& schedule, double Ln, const PricingOptions& opt) {
  validate(market);
  validate(spec);
  validate(schedule, market);
  if (spec.kind != PayoffKind::call && spec.kind != PayoffKind::put)
    throw ParameterError("price_bermudan: only calls and puts");

  const Interval I = truncation_interval(model, market.tau(), Ln);
  DensityCache dens(model, Ln, opt.density);
  PiecewiseFun V = payoff_logspace(spec, I);
  const auto& t = schedule.dates;
  for (int l = schedule.L() - 1; l >= 0; --l) {
    const double dt = t[l + 1] - t[l];
    const PiecewiseFun C = scale(conv_general(V, dens.get(dt), I, opt.tol), std::exp(-market.r * dt));
    V = l == 0 ? C : exercise_max(C, spec, opt);
  }

  PriceCurve pc;
  pc.curve = std::move(V);
  pc.discount = 1.0;
  pc.market = market;
  pc.payoff = spec;
  pc.european = false;
  return pc;
}

double richardson4(double v_m, double v_2m, double v_4m, double v_8m) {
  return (64.0 * v_8m - 56.0 * v_4m + 14.0 * v_2m - v_m) / 21.0;
}

PriceCurve price_american(const LevyModel& model, const PayoffSpec& spec, const MarketParams& market, int L_base,
                          double Ln, const PricingOptions& opt) {
  if (L_base < 0 || L_base > 20) throw ParameterError("price_american: L_base out of range");
  std::vector<PriceCurve> v;
  for (int j = 0; j < 4; ++j)
    v.push_back(price_bermudan(model, spec, market, ExerciseSchedule::uniform(market.t, market.T, 1 << (L_base + j)),
                               Ln, opt));
  const PiecewiseFun hi = lincomb(64.0 / 21.0, v[3].curve, -56.0 / 21.0, v[2].curve, opt.tol);
  const PiecewiseFun lo = lincomb(14.0 / 21.0, v[1].curve, -1.0 / 21.0, v[0].curve, opt.tol);
  PriceCurve pc = v[3];
  pc.curve = lincomb(1.0, hi, 1.0, lo, opt.tol);
  return pc;
}

PriceCurve price_barrier(const LevyModel& model, const PayoffSpec& spec, const MarketParams& market, double K,
                         const BarrierSpec& barrier, double Ln, const PricingOptions& opt) {
  validate(market);
  validate(spec);
  validate(barrier.schedule, market);
  if (!(barrier.B > 0.0)) throw ParameterError("barrier: B must be positive");
  if (!(barrier.rebate >= 0.0)) throw ParameterError("barrier: rebate must be nonnegative");
  if (!(K > 0.0)) throw ParameterError("barrier: K must be positive");

  const Interval I = truncation_interval(model, market.tau(), Ln);
  const double b = std::log(barrier.B / K);
  const bool up = barrier.direction == BarrierDirection::up_and_out;
  const double kp = std::pow(K, strike_power(spec));

  // alive part of V, rebate (already discounted to the date) on the knocked-out side
  auto mask = [&](const PiecewiseFun& V, double rebate) {
    auto constant = [&](Interval d) { return PiecewiseFun(ChebSeries(Eigen::VectorXd::Constant(1, rebate), d)); };
    if (b <= I.lo) return up ? constant(I) : V;
    if (b >= I.hi) return up ? V : constant(I);
    const Interval L(I.lo, b), R(b, I.hi);
    return up ? concat({restrict_to(V, L), constant(R)}) : concat({constant(L), restrict_to(V, R)});
  };

  DensityCache dens(model, Ln, opt.density);
  const auto& t = barrier.schedule.dates;
  PiecewiseFun V = mask(payoff_logspace(spec, I), barrier.rebate / kp);
  for (int l = barrier.schedule.L() - 1; l >= 0; --l) {
    const double dt = t[l + 1] - t[l];
    const PiecewiseFun C = scale(conv_general(V, dens.get(dt), I, opt.tol), std::exp(-market.r * dt));
    V = l == 0 ? C : mask(C, std::exp(-market.r * (market.T - t[l])) * barrier.rebate / kp);
  }

  PriceCurve pc;
  pc.curve = std::move(V);
  pc.discount = 1.0;
  pc.market = market;
  pc.payoff = spec;
  pc.european = false;
  pc.strike = K;
  return pc;
}

}  // namespace conleg
