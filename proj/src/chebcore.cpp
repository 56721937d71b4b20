#include "conleg/chebcore.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

namespace conleg {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool near(double a, double b, double scale) { return std::abs(a - b) <= 1e-12 * scale; }

Eigen::VectorXd padded_sum(const Eigen::VectorXd& a, double wa, const Eigen::VectorXd& b, double wb) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(std::max(a.size(), b.size()));
  out.head(a.size()) += wa * a;
  out.head(b.size()) += wb * b;
  return out;
}

}  // namespace

Interval::Interval(double a, double b) : lo(a), hi(b) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(b > a)) {
    std::ostringstream os;
    os << "Interval: need finite lo < hi, got [" << a << ", " << b << "]";
    throw ParameterError(os.str());
  }
}

ChebSeries::ChebSeries() : c_(Eigen::VectorXd::Zero(1)), dom_() {}

ChebSeries::ChebSeries(Eigen::VectorXd coeffs, Interval dom) : c_(std::move(coeffs)), dom_(dom) {
  if (c_.size() == 0) c_ = Eigen::VectorXd::Zero(1);
  if (!(dom_.hi > dom_.lo)) throw ParameterError("ChebSeries: degenerate interval");
}

double ChebSeries::coeff_scale() const { return c_.cwiseAbs().maxCoeff(); }

PiecewiseFun::PiecewiseFun(std::vector<double> breakpoints, std::vector<ChebSeries> pieces)
    : bp_(std::move(breakpoints)), pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw ParameterError("PiecewiseFun: no pieces");
  if (bp_.size() != pieces_.size() + 1) throw ParameterError("PiecewiseFun: breakpoint count mismatch");
  const double w = bp_.back() - bp_.front();
  for (std::size_t k = 0; k + 1 < bp_.size(); ++k) {
    if (!(bp_[k + 1] > bp_[k])) throw ParameterError("PiecewiseFun: breakpoints must increase strictly");
    const Interval& d = pieces_[k].domain();
    if (d.lo != bp_[k] || d.hi != bp_[k + 1]) {
      if (!near(d.lo, bp_[k], w) || !near(d.hi, bp_[k + 1], w))
        throw ParameterError("PiecewiseFun: piece interval does not match breakpoints");
      pieces_[k] = ChebSeries(pieces_[k].coeffs(), Interval(bp_[k], bp_[k + 1]));
    }
  }
}

PiecewiseFun::PiecewiseFun(ChebSeries single)
    : bp_{single.domain().lo, single.domain().hi}, pieces_{std::move(single)} {}

Interval PiecewiseFun::domain() const {
  if (bp_.empty()) throw ParameterError("PiecewiseFun: empty function has no domain");
  return Interval(bp_.front(), bp_.back());
}

long PiecewiseFun::piece_index(double x) const {
  if (pieces_.empty() || !(x >= bp_.front()) || !(x <= bp_.back())) return -1;
  auto it = std::upper_bound(bp_.begin(), bp_.end(), x);
  long k = static_cast<long>(it - bp_.begin()) - 1;
  if (k >= static_cast<long>(pieces_.size())) k = static_cast<long>(pieces_.size()) - 1;
  return k;
}

double PiecewiseFun::operator()(double x) const {
  const long k = piece_index(x);
  return k < 0 ? 0.0 : pieces_[static_cast<std::size_t>(k)](x);
}

double PiecewiseFun::abs_bound() const {
  double m = 0.0;
  for (const auto& p : pieces_) m = std::max(m, p.coeffs().cwiseAbs().sum());
  return m;
}

// --- transforms -------------------------------------------------------------

Eigen::VectorXd cheb_points(Eigen::Index n) {
  if (n == 1) return Eigen::VectorXd::Zero(1);
  Eigen::VectorXd x(n);
  const double N = static_cast<double>(n - 1);
  for (Eigen::Index j = 0; j < n; ++j) {
    // sin form keeps the points exactly symmetric
    x(j) = std::sin(kPi * (N - 2.0 * static_cast<double>(j)) / (2.0 * N));
  }
  return x;
}

Eigen::VectorXd vals2coeffs(const Eigen::VectorXd& vals) {
  const Eigen::Index n = vals.size();
  if (n <= 1) return vals;
  const Eigen::Index N = n - 1;
  std::vector<double> w(static_cast<std::size_t>(2 * N));
  for (Eigen::Index j = 0; j <= N; ++j) w[static_cast<std::size_t>(j)] = vals(j);
  for (Eigen::Index j = 1; j < N; ++j) w[static_cast<std::size_t>(2 * N - j)] = vals(j);
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> W;
  fft.fwd(W, w);
  Eigen::VectorXd c(n);
  for (Eigen::Index k = 0; k <= N; ++k) c(k) = W[static_cast<std::size_t>(k)].real() / static_cast<double>(N);
  c(0) *= 0.5;
  c(N) *= 0.5;
  return c;
}

Eigen::Index standard_chop(const Eigen::VectorXd& coeffs, double tol, double vscale) {
  const Eigen::Index n = coeffs.size();
  if (n < 17) return n;
  Eigen::VectorXd m(n);
  m(n - 1) = std::abs(coeffs(n - 1));
  for (Eigen::Index j = n - 2; j >= 0; --j) m(j) = std::max(std::abs(coeffs(j)), m(j + 1));
  const double top = std::max(m(0), vscale);
  if (top == 0.0) return 1;
  Eigen::VectorXd env = m / top;
  if (env(0) <= tol) return 1;

  Eigen::Index plateau = -1, j2 = 0;
  for (Eigen::Index j = 1; j < n; ++j) {
    j2 = static_cast<Eigen::Index>(std::lround(1.25 * static_cast<double>(j + 1) + 5.0)) - 1;
    if (j2 >= n) return n;
    const double e1 = env(j), e2 = env(j2);
    const double r = 3.0 * (1.0 - std::log(e1) / std::log(tol));
    if (e1 == 0.0 || e2 / e1 > r) {
      plateau = j - 1;
      break;
    }
  }
  if (plateau < 0) return n;
  if (env(plateau) == 0.0) return plateau + 1;

  const double floor_level = std::pow(tol, 7.0 / 6.0);
  Eigen::Index j3 = 0;
  for (Eigen::Index j = 0; j < n; ++j)
    if (env(j) >= floor_level) ++j3;
  Eigen::Index len = j2 + 1;
  if (j3 < len) {
    len = j3 + 1;
    env(len - 1) = floor_level;
  }
  Eigen::Index best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  const double ramp = -std::log10(tol) / 3.0;
  for (Eigen::Index j = 0; j < len; ++j) {
    const double frac = len > 1 ? static_cast<double>(j) / static_cast<double>(len - 1) : 0.0;
    const double v = std::log10(env(j)) + ramp * frac;
    if (v < best_val) {
      best_val = v;
      best = j;
    }
  }
  return std::max<Eigen::Index>(best, 1);
}

// --- construction -------------------------------------------------------------

ChebSeries adaptive_fit(const ScalarFn& f, Interval dom, double tol) {
  FitOptions opt;
  opt.tol = tol;
  return adaptive_fit(f, dom, opt);
}

ChebSeries adaptive_fit(const ScalarFn& f, Interval dom, const FitOptions& opt) {
  if (!(opt.tol > 0.0)) throw ParameterError("adaptive_fit: tol must be positive");
  Eigen::VectorXd vals;
  Eigen::VectorXd c;
  for (int k = 4; k <= opt.max_log2; ++k) {
    const Eigen::Index N = Eigen::Index(1) << k;
    Eigen::VectorXd next(N + 1);
    const Eigen::VectorXd s = cheb_points(N + 1);
    for (Eigen::Index j = 0; j <= N; ++j) {
      if (vals.size() == N / 2 + 1 && j % 2 == 0) {
        next(j) = vals(j / 2);
        continue;
      }
      const double x = dom.from_unit(s(j));
      const double v = f(x);
      if (!std::isfinite(v)) {
        std::ostringstream os;
        os.precision(17);
        os << "adaptive_fit: non-finite sample " << v << " at x = " << x;
        throw NumericalError(os.str());
      }
      next(j) = v;
    }
    vals = std::move(next);
    c = vals2coeffs(vals);
    const double vs = std::max(opt.vscale, vals.cwiseAbs().maxCoeff());
    const Eigen::Index cut = standard_chop(c, opt.tol, vs);
    if (cut < c.size()) return ChebSeries(c.head(cut), dom);
  }
  std::ostringstream os;
  os << "adaptive_fit: no convergence on [" << dom.lo << ", " << dom.hi << "] at degree " << c.size() - 1
     << ", tail magnitude " << c.tail(std::min<Eigen::Index>(8, c.size())).cwiseAbs().maxCoeff()
     << " vs scale " << c.cwiseAbs().maxCoeff();
  throw FitError(os.str(), ChebSeries(c, dom));
}

PiecewiseFun fit_piecewise(const ScalarFn& f, const std::vector<double>& breakpoints, const FitOptions& opt) {
  if (breakpoints.size() < 2) throw ParameterError("fit_piecewise: need at least two breakpoints");
  std::vector<ChebSeries> pieces;
  pieces.reserve(breakpoints.size() - 1);
  for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k)
    pieces.push_back(adaptive_fit(f, Interval(breakpoints[k], breakpoints[k + 1]), opt));
  return PiecewiseFun(breakpoints, std::move(pieces));
}

// --- evaluation and calculus ------------------------------------------------

double eval(const ChebSeries& s, double x) { return s(x); }
double eval(const PiecewiseFun& p, double x) { return p(x); }

Eigen::VectorXd eval(const PiecewiseFun& p, const Eigen::VectorXd& x) {
  Eigen::VectorXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = p(x(i));
  return out;
}

ChebSeries differentiate(const ChebSeries& s, int order) {
  if (order != 1 && order != 2) throw ParameterError("differentiate: order must be 1 or 2");
  const Eigen::VectorXd& c = s.coeffs();
  const Eigen::Index n = c.size();
  Eigen::VectorXd d = Eigen::VectorXd::Zero(std::max<Eigen::Index>(n - 1, 1));
  if (n > 1) {
    Eigen::VectorXd tmp = Eigen::VectorXd::Zero(n + 1);
    for (Eigen::Index k = n - 2; k >= 0; --k) tmp(k) = tmp(k + 2) + 2.0 * static_cast<double>(k + 1) * c(k + 1);
    tmp(0) *= 0.5;
    d = tmp.head(n - 1) * (2.0 / s.domain().width());
  }
  ChebSeries out(d, s.domain());
  return order == 1 ? out : differentiate(out, 1);
}

PiecewiseFun differentiate(const PiecewiseFun& p, int order) {
  std::vector<ChebSeries> pieces;
  pieces.reserve(p.size());
  for (const auto& s : p.pieces()) pieces.push_back(differentiate(s, order));
  return PiecewiseFun(p.breakpoints(), std::move(pieces));
}

double integrate(const ChebSeries& s) {
  const Eigen::VectorXd& c = s.coeffs();
  double acc = 0.0;
  for (Eigen::Index k = 0; k < c.size(); k += 2) acc += c(k) * 2.0 / (1.0 - static_cast<double>(k * k));
  return acc * s.domain().half_width();
}

double integrate(const PiecewiseFun& p) {
  double acc = 0.0;
  for (const auto& s : p.pieces()) acc += integrate(s);
  return acc;
}

ChebSeries simplify(const ChebSeries& s, double tol) {
  const Eigen::VectorXd& c = s.coeffs();
  const double thresh = tol * s.coeff_scale();
  Eigen::Index n = c.size();
  while (n > 1 && std::abs(c(n - 1)) <= thresh) --n;
  return ChebSeries(c.head(n), s.domain());
}

PiecewiseFun simplify(const PiecewiseFun& p, double tol) {
  std::vector<ChebSeries> pieces;
  pieces.reserve(p.size());
  for (const auto& s : p.pieces()) pieces.push_back(simplify(s, tol));
  return PiecewiseFun(p.breakpoints(), std::move(pieces));
}

ChebSeries restrict_to(const ChebSeries& s, Interval sub, double tol) {
  const Interval& d = s.domain();
  if (sub.lo == d.lo && sub.hi == d.hi) return s;
  const double slack = std::max(1e-9 * d.width(), 1e-13 * (std::abs(d.lo) + std::abs(d.hi)));
  if (sub.lo < d.lo - slack || sub.hi > d.hi + slack)
    throw ParameterError("restrict_to: subinterval outside the series domain");
  const Eigen::Index deg = s.degree();
  if (deg == 0) return ChebSeries(s.coeffs(), sub);
  Eigen::Index N = 16;
  while (N < deg) N *= 2;
  const Eigen::VectorXd pts = cheb_points(N + 1);
  Eigen::VectorXd vals(N + 1);
  for (Eigen::Index j = 0; j <= N; ++j) vals(j) = s(sub.from_unit(pts(j)));
  Eigen::VectorXd c = vals2coeffs(vals);
  const Eigen::Index cut = standard_chop(c, tol, s.coeff_scale());
  if (cut < c.size()) c.conservativeResize(cut);
  return ChebSeries(c, sub);
}

PiecewiseFun restrict_to(const PiecewiseFun& p, Interval sub, double tol) {
  std::vector<double> bp{sub.lo};
  std::vector<ChebSeries> pieces;
  const auto& b = p.breakpoints();
  const double eps = 1e-13 * (b.back() - b.front());
  if (sub.lo < b.front() - eps || sub.hi > b.back() + eps)
    throw ParameterError("restrict_to: subinterval leaves the support");
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < p.size(); ++k)
    if (std::min(b[k + 1], sub.hi) - std::max(b[k], sub.lo) > eps) keep.push_back(k);
  if (keep.empty()) throw ParameterError("restrict_to: subinterval misses the support");
  // slivers that were dropped are absorbed by their neighbours
  for (std::size_t i = 0; i < keep.size(); ++i) {
    const double hi = i + 1 == keep.size() ? sub.hi : std::min(b[keep[i] + 1], sub.hi);
    pieces.push_back(restrict_to(p.pieces()[keep[i]], Interval(bp.back(), hi), tol));
    bp.push_back(hi);
  }
  return PiecewiseFun(bp, std::move(pieces));
}

// --- roots ------------------------------------------------------------------

namespace {

void polish(const Eigen::VectorXd& c, const Eigen::VectorXd& dc, double& s) {
  for (int it = 0; it < 3; ++it) {
    const double f = clenshaw(c, s), fp = clenshaw(dc, s);
    if (fp == 0.0 || !std::isfinite(fp)) return;
    const double step = f / fp;
    const double t = s - step;
    if (!(std::abs(t) <= 1.0) || std::abs(step) > 1e-6) return;
    s = t;
  }
}

// Parlett-Reinsch diagonal similarity to even out row and column norms
void balance(Eigen::MatrixXd& A) {
  const Eigen::Index n = A.rows();
  constexpr double radix = 2.0;
  bool done = false;
  while (!done) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double c = A.col(i).cwiseAbs().sum() - std::abs(A(i, i));
      const double r = A.row(i).cwiseAbs().sum() - std::abs(A(i, i));
      if (c == 0.0 || r == 0.0) continue;
      double f = 1.0, cc = c;
      const double s = c + r;
      while (cc < r / radix) {
        cc *= radix * radix;
        f *= radix;
      }
      while (cc > r * radix) {
        cc /= radix * radix;
        f /= radix;
      }
      if ((cc + r) / f < 0.95 * s) {
        done = false;
        A.row(i) /= f;
        A.col(i) *= f;
      }
    }
  }
}

void unit_roots(const Eigen::VectorXd& c_in, std::vector<double>& out) {
  const double scale = c_in.cwiseAbs().maxCoeff();
  Eigen::Index n = c_in.size();
  while (n > 1 && std::abs(c_in(n - 1)) <= 1e-14 * scale) --n;
  const Eigen::VectorXd c = c_in.head(n);
  const Eigen::Index deg = n - 1;
  if (deg == 0) return;
  if (deg == 1) {
    const double s = -c(0) / c(1);
    if (std::abs(s) <= 1.0 + 1e-12) out.push_back(std::clamp(s, -1.0, 1.0));
    return;
  }
  if (deg > 100) {
    constexpr double split = -0.004849834917525;
    const ChebSeries whole(c, Interval(-1.0, 1.0));
    for (const Interval& half : {Interval(-1.0, split), Interval(split, 1.0)}) {
      const ChebSeries part = restrict_to(whole, half, 1e-15);
      std::vector<double> r;
      unit_roots(part.coeffs(), r);
      for (double s : r) out.push_back(half.from_unit(s));
    }
    return;
  }
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(deg, deg);
  A(0, 1) = 1.0;
  for (Eigen::Index i = 1; i < deg - 1; ++i) {
    A(i, i - 1) = 0.5;
    A(i, i + 1) = 0.5;
  }
  A(deg - 1, deg - 2) += 0.5;
  for (Eigen::Index j = 0; j < deg; ++j) A(deg - 1, j) -= c(j) / (2.0 * c(deg));
  balance(A);
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  if (es.info() != Eigen::Success) throw NumericalError("roots: eigenvalue solver failed");
  const Eigen::VectorXd dfull = differentiate(ChebSeries(c_in, Interval(-1.0, 1.0)), 1).coeffs();
  for (Eigen::Index i = 0; i < deg; ++i) {
    const std::complex<double> z = es.eigenvalues()(i);
    if (std::abs(z.imag()) > 1e-8 || std::abs(z.real()) > 1.0 + 1e-8) continue;
    double s = std::clamp(z.real(), -1.0, 1.0);
    polish(c_in, dfull, s);
    out.push_back(s);
  }
}

}  // namespace

std::vector<double> roots(const ChebSeries& s) { return roots(s, s.domain()); }

std::vector<double> roots(const ChebSeries& s, Interval dom) {
  if (s.coeff_scale() == 0.0) throw ParameterError("roots: zero function has no isolated roots");
  std::vector<double> unit;
  unit_roots(s.coeffs(), unit);
  std::vector<double> r;
  const Interval& d = s.domain();
  for (double u : unit) {
    const double x = d.from_unit(u);
    if (x >= dom.lo && x <= dom.hi) r.push_back(x);
  }
  std::sort(r.begin(), r.end());
  std::vector<double> merged;
  for (double x : r)
    if (merged.empty() || x - merged.back() > 1e-12 * d.width()) merged.push_back(x);
  return merged;
}

// --- piecewise algebra -----------------------------------------------------

std::vector<double> merge_breakpoints(std::vector<double> bp, double rel_tol) {
  std::sort(bp.begin(), bp.end());
  if (bp.size() < 2) return bp;
  const double lo = bp.front(), hi = bp.back();
  const double eps = rel_tol * (hi - lo);
  std::vector<double> out{lo};
  for (std::size_t i = 1; i + 1 < bp.size(); ++i)
    if (bp[i] - out.back() > eps && hi - bp[i] > eps) out.push_back(bp[i]);
  out.push_back(hi);
  return out;
}

namespace {

std::vector<double> union_breakpoints(const PiecewiseFun& a, const PiecewiseFun& b) {
  std::vector<double> bp = a.breakpoints();
  bp.insert(bp.end(), b.breakpoints().begin(), b.breakpoints().end());
  return merge_breakpoints(bp, 1e-13);
}

// the series of p on [lo,hi] which must sit inside a single piece; zero if outside the support
ChebSeries piece_on(const PiecewiseFun& p, double lo, double hi, double tol) {
  const double m = 0.5 * (lo + hi);
  const long k = p.piece_index(m);
  if (k < 0) return ChebSeries(Eigen::VectorXd::Zero(1), Interval(lo, hi));
  const ChebSeries& s = p.pieces()[static_cast<std::size_t>(k)];
  const Interval& d = s.domain();
  return restrict_to(s, Interval(std::max(lo, d.lo), std::min(hi, d.hi)), tol);
}

}  // namespace

PiecewiseFun pw_max(const PiecewiseFun& a, const PiecewiseFun& b, double tol) {
  const Interval da = a.domain(), db = b.domain();
  const double w = std::max(da.width(), db.width());
  if (!near(da.lo, db.lo, w) || !near(da.hi, db.hi, w))
    throw ParameterError("pw_max: arguments must share the outer interval");
  const std::vector<double> bp = union_breakpoints(a, b);
  std::vector<double> out_bp{bp.front()};
  std::vector<ChebSeries> out;
  for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
    const double lo = bp[k], hi = bp[k + 1];
    const ChebSeries pa = piece_on(a, lo, hi, tol), pb = piece_on(b, lo, hi, tol);
    const Eigen::VectorXd diff = padded_sum(pa.coeffs(), 1.0, pb.coeffs(), -1.0);
    const double scale = std::max({pa.coeff_scale(), pb.coeff_scale(), 1e-300});
    std::vector<double> cuts{lo};
    if (diff.cwiseAbs().maxCoeff() > 100.0 * tol * scale) {
      for (double r : roots(ChebSeries(diff, Interval(lo, hi))))
        if (r - cuts.back() > 1e-12 * (hi - lo) && hi - r > 1e-12 * (hi - lo)) cuts.push_back(r);
    }
    cuts.push_back(hi);
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
      const Interval sub(cuts[j], cuts[j + 1]);
      bool take_a;
      if (cuts.size() == 2 && diff.cwiseAbs().maxCoeff() <= 100.0 * tol * scale) {
        take_a = integrate(pa) >= integrate(pb);
      } else {
        const double m = sub.mid();
        take_a = pa(m) >= pb(m);
      }
      out.push_back(restrict_to(take_a ? pa : pb, sub, tol));
      out_bp.push_back(sub.hi);
    }
  }
  return PiecewiseFun(out_bp, std::move(out));
}

PiecewiseFun lincomb(double a, const PiecewiseFun& f, double b, const PiecewiseFun& g, double tol) {
  const std::vector<double> bp = union_breakpoints(f, g);
  std::vector<ChebSeries> pieces;
  pieces.reserve(bp.size() - 1);
  for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
    const ChebSeries pf = piece_on(f, bp[k], bp[k + 1], tol);
    const ChebSeries pg = piece_on(g, bp[k], bp[k + 1], tol);
    pieces.emplace_back(padded_sum(pf.coeffs(), a, pg.coeffs(), b), Interval(bp[k], bp[k + 1]));
  }
  return PiecewiseFun(bp, std::move(pieces));
}

PiecewiseFun scale(const PiecewiseFun& f, double a) {
  std::vector<ChebSeries> pieces;
  pieces.reserve(f.size());
  for (const auto& s : f.pieces()) pieces.emplace_back(a * s.coeffs(), s.domain());
  return PiecewiseFun(f.breakpoints(), std::move(pieces));
}

PiecewiseFun add_function(const PiecewiseFun& f, const ScalarFn& g, double tol) {
  std::vector<ChebSeries> pieces;
  pieces.reserve(f.size());
  for (const auto& s : f.pieces()) {
    FitOptions opt;
    opt.tol = tol;
    pieces.push_back(adaptive_fit([&](double x) { return s(x) + g(x); }, s.domain(), opt));
  }
  return PiecewiseFun(f.breakpoints(), std::move(pieces));
}

PiecewiseFun concat(const std::vector<PiecewiseFun>& parts) {
  std::vector<double> bp;
  std::vector<ChebSeries> pieces;
  for (const auto& p : parts) {
    if (p.empty()) continue;
    if (!bp.empty() && !near(bp.back(), p.breakpoints().front(), p.domain().width()))
      throw ParameterError("concat: parts are not adjacent");
    if (bp.empty()) bp.push_back(p.breakpoints().front());
    bp.insert(bp.end(), p.breakpoints().begin() + 1, p.breakpoints().end());
    pieces.insert(pieces.end(), p.pieces().begin(), p.pieces().end());
  }
  return PiecewiseFun(bp, std::move(pieces));
}

}  // namespace conleg
