#include "conleg/reference.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace conleg::reference {

using cd = std::complex<double>;

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

namespace {

double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

void check_bs(double S, double K, double sigma, double tau) {
  if (!(S > 0.0) || !(K > 0.0) || !(sigma > 0.0) || !(tau > 0.0))
    throw ParameterError("bs: S, K, sigma and tau must be positive");
}

// textbook densities of the log-return over t, written out here rather than taken from the
// library so the oracle checks those formulas too; none for CGMY or NIG with a Brownian part
namespace bp = boost::math::policies;
// K_nu(0) = inf at the VG cusp instead of an exception
using Quiet = bp::policy<bp::overflow_error<bp::ignore_error>, bp::underflow_error<bp::ignore_error>>;

std::optional<double> textbook_pdf(const LevyModel& m, double z, double t) {
  const double pi = std::numbers::pi;
  if (const auto* g = std::get_if<Gbm>(&m.params)) {
    const double s2 = g->sigma * g->sigma, mu = (m.r - m.q - 0.5 * s2) * t;
    return std::exp(-(z - mu) * (z - mu) / (2.0 * s2 * t)) / std::sqrt(2.0 * pi * s2 * t);
  }
  if (const auto* v = std::get_if<Vg>(&m.params)) {
    const double s2 = v->sigma * v->sigma, th = v->theta, nu = v->nu;
    const double w = std::log(1.0 - th * nu - 0.5 * s2 * nu) / nu;
    const double x = z - (m.r - m.q + w) * t, a = 2.0 * s2 / nu + th * th, h = t / nu;
    const double pre = 2.0 * std::exp(th * x / s2) /
                       (std::pow(nu, h) * std::sqrt(2.0 * pi) * v->sigma * boost::math::tgamma(h));
    return pre * std::pow(x * x / a, 0.5 * h - 0.25) *
           boost::math::cyl_bessel_k(h - 0.5, std::sqrt(x * x * a) / s2, Quiet());
  }
  if (const auto* n = std::get_if<Nig>(&m.params)) {
    if (n->sigma != 0.0) return std::nullopt;
    const double al = n->alpha, be = n->beta, dt = n->delta * t;
    const double w = n->delta * (std::sqrt(al * al - (be + 1.0) * (be + 1.0)) - std::sqrt(al * al - be * be));
    const double x = z - (m.r - m.q + w) * t, rho = std::hypot(dt, x);
    return al * dt * boost::math::cyl_bessel_k(1, al * rho, Quiet()) / (pi * rho) *
           std::exp(dt * std::sqrt(al * al - be * be) + be * x);
  }
  return std::nullopt;
}

}  // namespace

double bs_price(double S, double K, double r, double q, double sigma, double tau, OptionType type) {
  check_bs(S, K, sigma, tau);
  const double sq = sigma * std::sqrt(tau);
  const double d1 = (std::log(S / K) + (r - q + 0.5 * sigma * sigma) * tau) / sq, d2 = d1 - sq;
  const double fs = S * std::exp(-q * tau), fk = K * std::exp(-r * tau);
  return type == OptionType::call ? fs * norm_cdf(d1) - fk * norm_cdf(d2) : fk * norm_cdf(-d2) - fs * norm_cdf(-d1);
}

BsGreeks bs_greeks(double S, double K, double r, double q, double sigma, double tau, OptionType type) {
  check_bs(S, K, sigma, tau);
  const double sq = sigma * std::sqrt(tau);
  const double d1 = (std::log(S / K) + (r - q + 0.5 * sigma * sigma) * tau) / sq;
  const double dq = std::exp(-q * tau);
  BsGreeks g;
  g.delta = type == OptionType::call ? dq * norm_cdf(d1) : -dq * norm_cdf(-d1);
  g.gamma = dq * norm_pdf(d1) / (S * sq);
  g.vega = S * dq * norm_pdf(d1) * std::sqrt(tau);
  return g;
}

double payoff(const PayoffSpec& spec, double S, double K) {
  switch (spec.kind) {
    case PayoffKind::call: return std::max(S - K, 0.0);
    case PayoffKind::put: return std::max(K - S, 0.0);
    case PayoffKind::covered_call: return std::min(S, K);
    case PayoffKind::cash_or_nothing_call: return S >= K ? 1.0 : 0.0;
    case PayoffKind::cash_or_nothing_put: return S < K ? 1.0 : 0.0;
    case PayoffKind::asset_or_nothing_call: return S >= K ? S : 0.0;
    case PayoffKind::asset_or_nothing_put: return S < K ? S : 0.0;
    case PayoffKind::asymmetric_call: return std::max(std::pow(S, spec.n) - std::pow(K, spec.n), 0.0);
    case PayoffKind::asymmetric_put: return std::max(std::pow(K, spec.n) - std::pow(S, spec.n), 0.0);
  }
  throw ParameterError("payoff: unknown kind");
}

OracleDensity::OracleDensity(const LevyModel& m, double t)
    : m_(m), t_(t), closed_(textbook_pdf(m, 0.1, 1.0).has_value()) {
  if (!(t > 0.0)) throw ParameterError("oracle density: horizon must be positive");
  if (closed_) return;
  const Interval I = truncation_interval(m, t, 12.0);
  P_ = 4.0 * std::max(std::abs(I.lo), std::abs(I.hi));
  const double du = std::numbers::pi / P_;
  // run until |phi| has decayed well below rounding, over a few consecutive terms
  int quiet = 0;
  for (int k = 0; k < (1 << 22) && quiet < 16; ++k) {
    const cd v = char_fn(m, du * k, t) / (2.0 * P_);
    c_.push_back(v);
    quiet = std::abs(v) < 1e-19 ? quiet + 1 : 0;
  }
}

double OracleDensity::operator()(double z) const {
  if (closed_) {
    const double v = *textbook_pdf(m_, z, t_);
    return std::isfinite(v) ? v : 0.0;
  }
  // (1/2P) sum_k phi(pi k/P) e^{-i pi k z/P}, folded onto k >= 0
  const cd e = std::polar(1.0, -std::numbers::pi * z / P_);
  cd s = 0.0;
  for (std::size_t k = c_.size() - 1; k >= 1; --k) s = s * e + c_[k];
  return c_[0].real() + 2.0 * (s * e).real();
}

double quad_price_european(const LevyModel& model, const PayoffSpec& spec, const MarketParams& market, double K,
                           const QuadOptions& opt) {
  validate(market);
  if (!(K > 0.0)) throw ParameterError("quad_price_european: K must be positive");
  const double tau = market.tau();
  const OracleDensity g(model, tau);
  const Interval T = truncation_interval(model, tau, 12.0);
  const Interval I(T.mid() - opt.widen * T.half_width(), T.mid() + opt.widen * T.half_width());
  std::vector<double> cuts{I.lo, I.hi};
  const double kink = std::log(K / market.S);
  if (kink > I.lo && kink < I.hi) cuts.push_back(kink);
  if (std::holds_alternative<Vg>(model.params)) {
    const double cusp = drift(model) * tau;
    if (cusp > I.lo && cusp < I.hi) cuts.push_back(cusp);
  }
  std::sort(cuts.begin(), cuts.end());
  boost::math::quadrature::tanh_sinh<double> ts;
  double total = 0.0, l1 = 0.0, err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    // panels go through [0, 1]: boost's endpoint handling misplaces nodes when |a| >= 0.5
    const double lo = cuts[i], w = cuts[i + 1] - cuts[i];
    auto f = [&](double s) {
      const double z = lo + w * s;
      return w * payoff(spec, market.S * std::exp(z), K) * g(z);
    };
    double e = 0.0, a = 0.0;
    total += ts.integrate(f, 0.0, 1.0, opt.tol, &e, &a);
    err += e;
    l1 += a;
  }
  if (err > 1e-9 * std::max(l1, 1.0)) {
    std::ostringstream os;
    os << "quad_price_european: no convergence, error estimate " << err;
    throw NumericalError(os.str());
  }
  return std::exp(-market.r * tau) * total;
}

namespace {

constexpr int kNodes = 8;

struct Rule {
  std::array<double, kNodes> x, w;  // on [-1, 1], ascending
};

const Rule& gl8() {
  static const Rule r = [] {
    using G = boost::math::quadrature::gauss<double, kNodes>;
    Rule out;
    const auto& a = G::abscissa();
    const auto& w = G::weights();
    const int h = kNodes / 2;
    for (int i = 0; i < h; ++i) {
      out.x[h - 1 - i] = -a[i];
      out.w[h - 1 - i] = w[i];
      out.x[h + i] = a[i];
      out.w[h + i] = w[i];
    }
    return out;
  }();
  return r;
}

// degree-7 interpolant through the node values of one cell, s in [-1, 1]
double lagrange(const double* v, double s) {
  const Rule& r = gl8();
  double acc = 0.0;
  for (int j = 0; j < kNodes; ++j) {
    double l = 1.0;
    for (int i = 0; i < kNodes; ++i)
      if (i != j) l *= (s - r.x[i]) / (r.x[j] - r.x[i]);
    acc += l * v[j];
  }
  return acc;
}

struct KnockOut {
  double b;        // log(B/K)
  double rebate;   // R_b / K^p, paid at T
  bool up;
};

// the cell where V switches between exercise and continuation
struct Kink {
  int cell;
  double x;
  bool exercise_left;
  std::array<double, kNodes> C;
};

class Grid {
 public:
  Grid(double half_width, int cells, std::optional<double> align) {
    double h = 2.0 * half_width / cells;
    if (align && *align != 0.0) h = std::abs(*align) / std::max(1.0, std::round(std::abs(*align) / h));
    const int nh = static_cast<int>(std::ceil(half_width / h));
    nc = 2 * nh;
    this->h = h;
    A = -nh * h;
  }
  double lo(int c) const { return A + c * h; }
  double node(int c, int q) const { return lo(c) + 0.5 * h * (1.0 + gl8().x[q]); }
  int size() const { return nc * kNodes; }

  int nc;
  double h, A;
};

class Induction {
 public:
  Induction(const LevyModel& model, const PayoffSpec& spec, const MarketParams& market, const ExerciseSchedule& s,
            std::optional<KnockOut> ko, const QuadGrid& qg)
      : model_(model), spec_(spec), market_(market), s_(s), ko_(ko),
        grid_(qg.half_width > 0.0 ? qg.half_width
                                  : 2.0 * [&] {
                                      const Interval I = truncation_interval(model, market.tau(), 12.0);
                                      return std::max(std::abs(I.lo), std::abs(I.hi));
                                    }(),
              qg.cells, ko ? std::optional<double>(ko->b) : std::nullopt) {}

  std::vector<double> run(const std::vector<double>& xt) {
    const int L = s_.L();
    std::vector<double> V(grid_.size());
    for (int c = 0; c < grid_.nc; ++c)
      for (int q = 0; q < kNodes; ++q) V[c * kNodes + q] = terminal(grid_.node(c, q));
    std::optional<Kink> kink;
    for (int l = L - 1; l >= 1; --l) {
      const double dt = s_.dates[l + 1] - s_.dates[l];
      std::vector<double> C = step(V, kink, dt);
      kink.reset();
      if (ko_) {
        const double reb = ko_->rebate * std::exp(-market_.r * (market_.T - s_.dates[l]));
        for (int c = 0; c < grid_.nc; ++c)
          for (int q = 0; q < kNodes; ++q) {
            const double y = grid_.node(c, q);
            V[c * kNodes + q] = dead(y) ? reb : C[c * kNodes + q];
          }
      } else {
        kink = exercise(C, V);
      }
    }
    // t_0: continuation only
    const double dt = s_.dates[1] - s_.dates[0];
    const OracleDensity& g = density(dt);
    const Rule& r = gl8();
    std::vector<double> out;
    for (double x : xt) {
      double acc = 0.0;
      for (int c = 0; c < grid_.nc; ++c) {
        if (kink && kink->cell == c) {
          acc += split_cell(*kink, [&](double y) { return g(y - x); });
          continue;
        }
        for (int q = 0; q < kNodes; ++q) acc += r.w[q] * V[c * kNodes + q] * g(grid_.node(c, q) - x);
      }
      out.push_back(std::exp(-market_.r * dt) * 0.5 * grid_.h * acc);
    }
    return out;
  }

 private:
  double f(double y) const { return payoff(spec_, std::exp(y), 1.0); }

  bool dead(double y) const { return ko_ && (ko_->up ? y >= ko_->b : y < ko_->b); }

  double terminal(double y) const { return dead(y) ? ko_->rebate : f(y); }

  const OracleDensity& density(double dt) {
    for (auto& [k, v] : dens_)
      if (std::abs(k - dt) <= 1e-12 * dt) return v;
    return dens_.emplace(dt, OracleDensity(model_, dt)).first->second;
  }

  // G[(d + nc - 1) * 64 + q * 8 + p] = w_p g(y_{c+d,p} - x_{c,q})
  const std::vector<double>& kernel(double dt) {
    for (auto& [k, v] : kern_)
      if (std::abs(k - dt) <= 1e-12 * dt) return v;
    const OracleDensity& g = density(dt);
    const Rule& r = gl8();
    const int nc = grid_.nc;
    std::vector<double> G(static_cast<std::size_t>(2 * nc - 1) * kNodes * kNodes);
    for (int d = -(nc - 1); d <= nc - 1; ++d)
      for (int q = 0; q < kNodes; ++q)
        for (int p = 0; p < kNodes; ++p) {
          const double z = d * grid_.h + 0.5 * grid_.h * (r.x[p] - r.x[q]);
          G[(static_cast<std::size_t>(d + nc - 1) * kNodes + q) * kNodes + p] = r.w[p] * g(z);
        }
    return kern_.emplace(dt, std::move(G)).first->second;
  }

  // integral over the kink cell with the exercise side taken from f and the other from C
  template <class Fn>
  double split_cell(const Kink& k, Fn weight) const {
    const Rule& r = gl8();
    const double lo = grid_.lo(k.cell), hi = lo + grid_.h;
    double acc = 0.0;
    for (int side = 0; side < 2; ++side) {
      const double a = side == 0 ? lo : k.x, b = side == 0 ? k.x : hi;
      if (!(b > a)) continue;
      const bool ex = (side == 0) == k.exercise_left;
      for (int q = 0; q < kNodes; ++q) {
        const double y = 0.5 * (a + b) + 0.5 * (b - a) * r.x[q];
        const double v = ex ? f(y) : lagrange(k.C.data(), 2.0 * (y - lo) / grid_.h - 1.0);
        acc += r.w[q] * 0.5 * (b - a) * v * weight(y);
      }
    }
    // callers scale by h/2
    return acc / (0.5 * grid_.h);
  }

  std::vector<double> step(const std::vector<double>& V, const std::optional<Kink>& kink, double dt) {
    const std::vector<double>& G = kernel(dt);
    const int nc = grid_.nc;
    std::vector<double> C(grid_.size(), 0.0);
    for (int c = 0; c < nc; ++c)
      for (int cp = 0; cp < nc; ++cp) {
        if (kink && kink->cell == cp) continue;
        const double* g = &G[static_cast<std::size_t>(cp - c + nc - 1) * kNodes * kNodes];
        const double* v = &V[cp * kNodes];
        for (int q = 0; q < kNodes; ++q) {
          double acc = 0.0;
          for (int p = 0; p < kNodes; ++p) acc += g[q * kNodes + p] * v[p];
          C[c * kNodes + q] += acc;
        }
      }
    if (kink) {
      const OracleDensity& g = density(dt);
      for (int c = 0; c < nc; ++c)
        for (int q = 0; q < kNodes; ++q) {
          const double x = grid_.node(c, q);
          C[c * kNodes + q] += split_cell(*kink, [&](double y) { return g(y - x); });
        }
    }
    const double disc = std::exp(-market_.r * dt) * 0.5 * grid_.h;
    for (double& v : C) v *= disc;
    return C;
  }

  // V = max(C, f) on the nodes, and the cell holding the exercise boundary
  std::optional<Kink> exercise(const std::vector<double>& C, std::vector<double>& V) const {
    const bool call = is_call_like(spec_.kind);
    const int nc = grid_.nc;
    for (int i = 0; i < grid_.size(); ++i) V[i] = std::max(C[i], f(grid_.node(i / kNodes, i % kNodes)));
    // D = C - f is negative on the exercise side; scan the active side from y = 0 outward
    auto D = [&](int c, double s) {
      return lagrange(&C[c * kNodes], s) - f(grid_.lo(c) + 0.5 * grid_.h * (1.0 + s));
    };
    const int c0 = nc / 2;  // first cell right of 0
    for (int j = 0; j < nc / 2; ++j) {
      const int c = call ? c0 + j : c0 - 1 - j;
      const double dl = D(c, -1.0), dr = D(c, 1.0);
      if ((dl < 0.0) == (dr < 0.0)) continue;
      double a = -1.0, b = 1.0, da = dl;
      for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
        const double m = 0.5 * (a + b), dm = D(c, m);
        if ((dm < 0.0) == (da < 0.0)) {
          a = m;
          da = dm;
        } else {
          b = m;
        }
      }
      Kink k;
      k.cell = c;
      k.x = grid_.lo(c) + 0.5 * grid_.h * (1.0 + 0.5 * (a + b));
      k.exercise_left = !call;
      std::copy(C.begin() + c * kNodes, C.begin() + (c + 1) * kNodes, k.C.begin());
      return k;
    }
    return std::nullopt;
  }

  const LevyModel& model_;
  PayoffSpec spec_;
  MarketParams market_;
  const ExerciseSchedule& s_;
  std::optional<KnockOut> ko_;
  Grid grid_;
  std::map<double, OracleDensity> dens_;
  std::map<double, std::vector<double>> kern_;
};

}  // namespace

std::vector<double> quad_backward_induction(const LevyModel& model, const PayoffSpec& spec, const MarketParams& market,
                                            const ExerciseSchedule& schedule, const std::vector<double>& xt,
                                            const QuadGrid& grid) {
  validate(market);
  validate(schedule, market);
  if (spec.kind != PayoffKind::call && spec.kind != PayoffKind::put)
    throw ParameterError("quad_backward_induction: only calls and puts");
  return Induction(model, spec, market, schedule, std::nullopt, grid).run(xt);
}

std::vector<double> quad_backward_induction(const LevyModel& model, const PayoffSpec& spec, const MarketParams& market,
                                            double K, const BarrierSpec& barrier, const std::vector<double>& xt,
                                            const QuadGrid& grid) {
  validate(market);
  validate(barrier.schedule, market);
  if (!(K > 0.0) || !(barrier.B > 0.0)) throw ParameterError("quad_backward_induction: K and B must be positive");
  const KnockOut ko{std::log(barrier.B / K), barrier.rebate / std::pow(K, strike_power(spec)),
                    barrier.direction == BarrierDirection::up_and_out};
  return Induction(model, spec, market, barrier.schedule, ko, grid).run(xt);
}

std::vector<double> dense_bermudan_fft(const LevyModel& model, const PayoffSpec& spec, const MarketParams& market,
                                       int m, const std::vector<double>& xt, const FftGrid& grid) {
  validate(market);
  if (spec.kind != PayoffKind::call && spec.kind != PayoffKind::put)
    throw ParameterError("dense_bermudan_fft: only calls and puts");
  if (m < 1 || grid.log2n < 4 || grid.log2n > 24) throw ParameterError("dense_bermudan_fft: bad sizes");
  const int n = 1 << grid.log2n;
  const double X = grid.half_width, dx = 2.0 * X / n;
  const double dt = market.tau() / m;
  std::vector<double> y(n), f(n), V(n);
  for (int j = 0; j < n; ++j) {
    y[j] = -X + j * dx;
    f[j] = payoff(spec, std::exp(y[j]), 1.0);
  }
  // E[e^{iuZ}] on the grid frequencies, symmetric index range
  std::vector<cd> phi(n);
  for (int k = 0; k < n; ++k) {
    const int kk = k < n / 2 ? k : k - n;
    phi[k] = char_fn(model, 2.0 * std::numbers::pi * kk / (n * dx), dt);
  }
  const double disc = std::exp(-market.r * dt);
  Eigen::FFT<double> fft;
  std::vector<cd> spec_v, prod(n);
  std::vector<cd> back;
  V = f;
  for (int l = m - 1; l >= 1; --l) {
    fft.fwd(spec_v, V);
    for (int k = 0; k < n; ++k) prod[k] = spec_v[k] * phi[k];
    fft.inv(back, prod);
    for (int j = 0; j < n; ++j) V[j] = std::max(disc * back[j].real(), f[j]);
  }
  // continuation at t_0 as a trigonometric sum at each requested point
  fft.fwd(spec_v, V);
  std::vector<double> out;
  for (double x : xt) {
    cd acc = 0.0;
    for (int k = 0; k < n; ++k) {
      const int kk = k < n / 2 ? k : k - n;
      const double u = 2.0 * std::numbers::pi * kk / (n * dx);
      acc += spec_v[k] * phi[k] * std::polar(1.0, u * (x + X));
    }
    out.push_back(disc * acc.real() / n);
  }
  return out;
}

}  // namespace conleg::reference
