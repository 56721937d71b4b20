#include "conleg/density.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <string>

namespace conleg {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// roots of q_0 + q_1 z + ... via the companion matrix
std::vector<cd> poly_roots(const Eigen::VectorXcd& q) {
  const Eigen::Index n = q.size() - 1;
  if (n < 1) return {};
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 1; i < n; ++i) C(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) C(i, n - 1) = -q(i) / q(n);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
  std::vector<cd> out(es.eigenvalues().data(), es.eigenvalues().data() + n);
  return out;
}

// Newton on P from z; true when it settles on a root of P within `radius` of the start
bool near_root(const Eigen::VectorXcd& p, cd z, double radius) {
  const cd z0 = z;
  for (int it = 0; it < 30; ++it) {
    cd v = 0.0, dv = 0.0;
    for (Eigen::Index k = p.size() - 1; k >= 0; --k) {
      dv = dv * z + v;
      v = v * z + p(k);
    }
    if (v == 0.0) return true;
    if (dv == 0.0) return false;
    const cd step = v / dv;
    z -= step;
    if (std::abs(z - z0) > 10.0 * radius) return false;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
  }
  return std::abs(z - z0) <= radius;
}

}  // namespace

CfsDensity cfs_coeffs(const LevyModel& m, Interval interval, double t, int N) {
  if (N < 16) throw ParameterError("cfs_coeffs: need N >= 16");
  CfsDensity d;
  d.interval = interval;
  d.t = t;
  d.b.resize(N + 1);
  const double w = 2.0 * kPi / interval.width();
  for (int k = 0; k <= N; ++k) d.b(k) = char_fn(m, -w * k, t);
  return d;
}

double eval(const CfsDensity& d, double x) {
  const double w = d.interval.width();
  const cd step = std::exp(cd(0.0, 2.0 * kPi * x / w));
  cd e = step, acc = d.b(0);
  for (Eigen::Index k = 1; k < d.b.size(); ++k) {
    acc += 2.0 * d.b(k) * e;
    e *= step;
  }
  return acc.real() / w;
}

Eigen::VectorXd bessel_j_all(int nmax, double x) {
  if (nmax < 0) throw ParameterError("bessel_j_all: negative order");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(nmax + 1);
  const double ax = std::abs(x);
  if (ax == 0.0) {
    out(0) = 1.0;
    return out;
  }
  const int top = std::max(nmax, static_cast<int>(ax));
  int m = top + 30 + static_cast<int>(std::sqrt(60.0 * (top + 1)));
  m += m % 2;

  double jp = 0.0, jc = 1e-30, sum = 2.0 * jc;  // J_{m+1}, J_m with m even
  if (m <= nmax) out(m) = jc;
  for (int k = m; k >= 1; --k) {
    const double jm = 2.0 * k / ax * jc - jp;
    jp = jc;
    jc = jm;
    const int idx = k - 1;
    if (idx <= nmax) out(idx) = jc;
    if (idx % 2 == 0) sum += idx == 0 ? jc : 2.0 * jc;
    if (std::abs(jc) > 1e200) {
      jc *= 1e-200;
      jp *= 1e-200;
      sum *= 1e-200;
      if (idx <= nmax) out.segment(idx, nmax - idx + 1) *= 1e-200;
    }
  }
  out /= sum;
  if (x < 0.0)
    for (int n = 1; n <= nmax; n += 2) out(n) = -out(n);
  return out;
}

double bessel_j(int n, double x) { return bessel_j_all(n, x)(n); }

ChebSeries cfs_to_cheb(const CfsDensity& d, bool reflect) {
  const double c = d.interval.lo, dd = d.interval.hi, w = d.interval.width();
  Eigen::Index K = d.b.size() - 1;
  while (K > 0 && std::abs(d.b(K)) < 1e-18 * std::abs(d.b(0))) --K;

  // e^{i 2 pi k x/w} = e^{i pi k (c+d)/w} e^{i pi k s} and e^{i y s} = sum eps_n i^n J_n(y) T_n(s)
  // J_n(x) is negligible once n - x exceeds a multiple of x^(1/3)
  const int nmax = static_cast<int>(std::ceil(kPi * K + 20.0 + 16.0 * std::cbrt(0.5 * kPi * K)));
  Eigen::VectorXd a = Eigen::VectorXd::Zero(nmax + 1);
  a(0) = d.b(0).real();
  for (Eigen::Index k = 1; k <= K; ++k) {
    const cd z = d.b(k) * std::exp(cd(0.0, kPi * k * (c + dd) / w));
    const Eigen::VectorXd J = bessel_j_all(nmax, kPi * k);
    for (int n = 0; n <= nmax; ++n) {
      const double sgn = ((n + 1) / 2) % 2 == 0 ? 1.0 : -1.0;
      a(n) += 2.0 * sgn * (n % 2 == 0 ? z.real() : z.imag()) * J(n);
    }
  }
  a.tail(nmax) *= 2.0;
  a /= w;
  if (!reflect) return simplify(ChebSeries(a, d.interval), 1e-17);
  for (int n = 1; n <= nmax; n += 2) a(n) = -a(n);
  return simplify(ChebSeries(a, Interval(-dd, -c)), 1e-17);
}

PadeApprox fourier_pade(const Eigen::VectorXcd& b, int Np, int Mp) {
  if (Mp < 1 || Np < 0) throw ParameterError("fourier_pade: need N_p >= 0 and M_p >= 1");
  if (Np + Mp + 1 > b.size()) throw ParameterError("fourier_pade: series too short for the requested degrees");
  auto B = [&](int i) { return i < 0 ? cd(0.0) : b(i); };

  Eigen::MatrixXcd A(Mp, Mp);
  Eigen::VectorXcd rhs(Mp);
  for (int j = 1; j <= Mp; ++j) {
    for (int m = 1; m <= Mp; ++m) A(j - 1, m - 1) = B(Np + j - m);
    rhs(j - 1) = -B(Np + j);
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cond = sv(Mp - 1) > 0.0 ? sv(0) / sv(Mp - 1) : INFINITY;
  if (!(cond < 1e13))
    throw NumericalError("fourier_pade: Toeplitz system is ill-conditioned (condition estimate " +
                         std::to_string(cond) + ")");
  const Eigen::VectorXcd qs = svd.solve(rhs);

  Eigen::Index deg = Mp;
  while (deg > 0 && std::abs(qs(deg - 1)) <= 1e-14) --deg;
  PadeApprox out;
  out.Q.resize(deg + 1);
  out.Q(0) = 1.0;
  out.Q.tail(deg) = qs.head(deg);
  out.P.resize(Np + 1);
  for (int n = 0; n <= Np; ++n) {
    cd acc = 0.0;
    for (Eigen::Index m = 0; m <= std::min<Eigen::Index>(n, deg); ++m) acc += B(n - m) * out.Q(m);
    out.P(n) = acc;
  }
  return out;
}

std::vector<double> locate_singularities(const LevyModel& m, Interval interval, double t, int N,
                                         const DensityOptions& opt) {
  if (N < 256) throw ParameterError("locate_singularities: need N >= 256");
  const CfsDensity cfs = cfs_coeffs(m, interval, t, N);
  const double w = interval.width();
  Eigen::VectorXcd bd(N + 1);
  for (int k = 0; k <= N; ++k) bd(k) = cd(0.0, 2.0 * kPi * k / w) * cfs.b(k);

  const double top = bd.cwiseAbs().maxCoeff();
  if (!(top > 0.0)) return {};
  int K = N;
  while (K > 0 && std::abs(bd(K)) <= 1e-13 * top) --K;
  const int Mp = opt.pade_m;
  // a series that dies out this fast belongs to an analytic density
  if (K < 8 * Mp) return {};

  // a tail dominated by fewer singularities than Mp leaves the Toeplitz block rank deficient,
  // so step the denominator degree down until it is solvable
  PadeApprox pa;
  bool solved = false;
  for (int M = Mp; M >= 1 && !solved; --M) {
    try {
      pa = fourier_pade(bd.head(K + 1), K - M, M);
      solved = true;
    } catch (const NumericalError&) {
    }
  }
  if (!solved) return {};

  struct Hit {
    double x, dist;
  };
  std::vector<Hit> hits;
  for (const cd z : poly_roots(pa.Q)) {
    const double dist = std::abs(1.0 - std::abs(z));
    if (dist > opt.ring_tol) continue;
    if (near_root(pa.P, z, 1e-6)) continue;  // Froissart doublet
    double x = std::arg(z) * w / (2.0 * kPi);
    x = interval.lo + std::fmod(std::fmod(x - interval.lo, w) + w, w);
    if (x <= interval.lo + 1e-8 * w || x >= interval.hi - 1e-8 * w) continue;
    hits.push_back({x, dist});
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.x < b.x; });
  std::vector<Hit> kept;
  for (const Hit& h : hits) {
    if (!kept.empty() && h.x - kept.back().x < 1e-3 * w) {
      if (h.dist < kept.back().dist) kept.back() = h;
      continue;
    }
    kept.push_back(h);
  }
  std::vector<double> out;
  for (const Hit& h : kept) out.push_back(h.x);
  return out;
}

namespace {

// x where the closed form itself is singular (VG at Z = 0), if the model has one
std::optional<double> closed_form_cusp(const LevyModel& m, double t) {
  if (std::holds_alternative<Vg>(m.params)) return drift(m) * t;
  return std::nullopt;
}

// pieces of [a,b] shrinking geometrically toward the singular end
void fit_graded(const ScalarFn& f, double a, double b, bool toward_a, const FitOptions& fo, double floor_w,
                std::vector<double>& bp, std::vector<ChebSeries>& pieces) {
  std::vector<double> cuts;
  for (double h = b - a; h > floor_w; h *= 0.25) cuts.push_back(h);
  cuts.push_back(0.0);
  std::vector<double> xs;
  for (double h : cuts) xs.push_back(toward_a ? a + h : b - h);
  std::sort(xs.begin(), xs.end());
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double lo = xs[i], hi = xs[i + 1];
    const bool inner = toward_a ? i == 0 : i + 2 == xs.size();
    // innermost sliver: a constant, taken where a log singularity attains its mean
    const double at = toward_a ? lo + (hi - lo) / std::numbers::e : hi - (hi - lo) / std::numbers::e;
    ChebSeries s = inner ? ChebSeries(Eigen::VectorXd::Constant(1, f(at)), Interval(lo, hi))
                         : adaptive_fit(f, Interval(lo, hi), fo);
    bp.push_back(lo);
    pieces.push_back(std::move(s));
  }
}

// finite-variation CGMY: no closed form and a spike at the drift point of width ~ t^{1/Y}
std::optional<double> drift_spike(const LevyModel& m, double t) {
  if (const auto* c = std::get_if<Cgmy>(&m.params); c && c->Y < 1.0) return drift(m) * t;
  return std::nullopt;
}

// low-degree pieces on [a,b], bisected (toward `at` when it is an endpoint) until each fits
void fit_split(const ScalarFn& f, double a, double b, std::optional<double> at, const FitOptions& fo,
               double floor_w, std::vector<double>& bp, std::vector<ChebSeries>& pieces) {
  ChebSeries s;
  try {
    s = adaptive_fit(f, Interval(a, b), fo);
  } catch (const FitError& e) {
    if (b - a > floor_w) {
      double mid = 0.5 * (a + b);
      if (at && *at == a) mid = a + 0.25 * (b - a);
      if (at && *at == b) mid = b - 0.25 * (b - a);
      fit_split(f, a, mid, at, fo, floor_w, bp, pieces);
      fit_split(f, mid, b, at, fo, floor_w, bp, pieces);
      return;
    }
    s = e.best();
  }
  bp.push_back(a);
  pieces.push_back(std::move(s));
}

}  // namespace

namespace {

// reflected kernel on [-d,-c], split at the density's singularities; pointwise closed form
// first when there is one, otherwise the Fourier series with coefficients transform(-2 pi k/(d-c))
PiecewiseFun build_reflected(const LevyModel& m, Interval interval, double t, const DensityOptions& opt,
                             const ScalarFn& closed, const std::function<cd(double)>& transform) {
  const Interval R(-interval.hi, -interval.lo);
  std::vector<double> sing = locate_singularities(m, interval, t, std::max(opt.N, 256), opt);

  if (closed) {
    const auto cusp = closed_form_cusp(m, t);
    if (cusp)
      for (double& x : sing)
        if (std::abs(x - *cusp) < 2e-3 * interval.width()) x = *cusp;
  }
  const auto spike = closed ? std::nullopt : drift_spike(m, t);
  if (spike) {
    std::erase_if(sing, [&](double x) { return std::abs(x - *spike) < 2e-3 * interval.width(); });
    sing.push_back(*spike);
  }
  std::vector<double> bp{R.lo, R.hi};
  std::vector<double> rsing;
  for (double x : sing) {
    if (-x > R.lo && -x < R.hi) {
      bp.push_back(-x);
      rsing.push_back(-x);
    }
  }
  std::sort(bp.begin(), bp.end());
  bp = merge_breakpoints(bp, 1e-10);
  auto singular = [&](double x) {
    return std::any_of(rsing.begin(), rsing.end(), [&](double s) { return s == x; });
  };

  if (closed) {
    try {
      auto f = [&](double x) {
        const double v = closed(-x);
        if (!std::isfinite(v)) throw NumericalError("density: closed form is unbounded");
        return v;
      };
      double vscale = 0.0;
      const Eigen::VectorXd s = cheb_points(1025);
      for (Eigen::Index j = 0; j < s.size(); ++j) {
        const double v = closed(-R.from_unit(s(j)));
        if (std::isfinite(v)) vscale = std::max(vscale, std::abs(v));
      }
      FitOptions fo;
      fo.tol = opt.tol;
      fo.vscale = vscale;
      std::vector<double> out_bp;
      std::vector<ChebSeries> pieces;
      for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        const double a = bp[i], b = bp[i + 1];
        try {
          ChebSeries s = adaptive_fit(f, Interval(a, b), fo);
          out_bp.push_back(a);
          pieces.push_back(std::move(s));
        } catch (const NumericalError&) {
          const bool sa = singular(a), sb = singular(b);
          if (!sa && !sb) throw;
          // below this the samples are dominated by rounding in x - cusp
          const double floor_w = 1e-10 * interval.width();
          if (sa && sb) {
            const double mid = 0.5 * (a + b);
            fit_graded(f, a, mid, true, fo, floor_w, out_bp, pieces);
            fit_graded(f, mid, b, false, fo, floor_w, out_bp, pieces);
          } else {
            fit_graded(f, a, b, sa, fo, floor_w, out_bp, pieces);
          }
        }
      }
      out_bp.push_back(bp.back());
      return PiecewiseFun(out_bp, pieces);
    } catch (const NumericalError&) {
      // unresolved away from any known singularity, the series path below is bounded
    }
  }

  CfsDensity d;
  d.interval = interval;
  d.t = t;
  const double w = 2.0 * kPi / interval.width();

  if (spike) {
    // the series converges slowly in k here; sum it pointwise with enough terms and fit
    // short pieces graded toward the spike
    int N = opt.N;
    while (N < (1 << 15) && std::abs(transform(-w * N)) > 1e-2 * opt.tol) N *= 2;
    d.b.resize(N + 1);
    for (int k = 0; k <= N; ++k) d.b(k) = transform(-w * k);
    auto f = [&](double x) { return eval(d, -x); };
    double vscale = std::abs(f(-*spike));
    const Eigen::VectorXd s = cheb_points(257);
    for (Eigen::Index j = 0; j < s.size(); ++j) vscale = std::max(vscale, std::abs(f(R.from_unit(s(j)))));
    FitOptions fo;
    fo.tol = opt.tol;
    fo.vscale = vscale;
    fo.max_log2 = 7;
    std::vector<double> out_bp;
    std::vector<ChebSeries> pieces;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
      std::optional<double> at;
      if (bp[i] == -*spike) at = bp[i];
      if (bp[i + 1] == -*spike) at = bp[i + 1];
      fit_split(f, bp[i], bp[i + 1], at, fo, 1e-12 * interval.width(), out_bp, pieces);
    }
    out_bp.push_back(bp.back());
    return PiecewiseFun(out_bp, pieces);
  }

  d.b.resize(opt.N + 1);
  for (int k = 0; k <= opt.N; ++k) d.b(k) = transform(-w * k);
  const ChebSeries g = cfs_to_cheb(d, true);
  if (bp.size() == 2) return PiecewiseFun(g);
  std::vector<ChebSeries> pieces;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) pieces.push_back(restrict_to(g, Interval(bp[i], bp[i + 1]), opt.tol));
  return PiecewiseFun(bp, pieces);
}

}  // namespace

PiecewiseFun build_reflected_density(const LevyModel& m, Interval interval, double t, const DensityOptions& opt) {
  ScalarFn closed;
  if (has_closed_form(m)) closed = [&](double x) { return pdf_closed_form(m, x, t); };
  return build_reflected(m, interval, t, opt, closed, [&](double u) { return char_fn(m, u, t); });
}

PiecewiseFun build_reflected_density_dsigma(const LevyModel& m, Interval interval, double t,
                                            const DensityOptions& opt) {
  if (!has_sigma_derivative(m)) throw ParameterError("vega unsupported for " + model_name(m));
  ScalarFn closed;
  if (has_closed_form(m)) closed = [&](double x) { return pdf_dsigma_closed_form(m, x, t); };
  return build_reflected(m, interval, t, opt, closed, [&](double u) { return char_fn_dsigma_centred(m, u, t); });
}

}  // namespace conleg
