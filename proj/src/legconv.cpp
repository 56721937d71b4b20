#include "conleg/legconv.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <vector>

namespace conleg {

namespace {

// lam(m) = Gamma(m/2 + 1/2) / Gamma(m/2 + 1), m = 0..n
Eigen::VectorXd lambda_table(Eigen::Index n) {
  Eigen::VectorXd lam(std::max<Eigen::Index>(n + 1, 2));
  lam(0) = std::sqrt(std::numbers::pi);
  lam(1) = 2.0 / std::sqrt(std::numbers::pi);
  for (Eigen::Index m = 2; m < lam.size(); ++m)
    lam(m) = lam(m - 2) * static_cast<double>(m - 1) / static_cast<double>(m);
  return lam;
}

}  // namespace

LegSeries::LegSeries() : c_(Eigen::VectorXd::Zero(1)), dom_() {}

LegSeries::LegSeries(Eigen::VectorXd coeffs, Interval dom) : c_(std::move(coeffs)), dom_(dom) {
  if (c_.size() == 0) c_ = Eigen::VectorXd::Zero(1);
}

double LegSeries::operator()(double x) const {
  const double s = dom_.to_unit(x);
  double p0 = 1.0, p1 = s, acc = c_(0);
  if (c_.size() > 1) acc += c_(1) * s;
  for (Eigen::Index k = 1; k + 1 < c_.size(); ++k) {
    const double kk = static_cast<double>(k);
    const double p2 = ((2.0 * kk + 1.0) * s * p1 - kk * p0) / (kk + 1.0);
    acc += c_(k + 1) * p2;
    p0 = p1;
    p1 = p2;
  }
  return acc;
}

Eigen::VectorXd cheb2leg(const Eigen::VectorXd& c) {
  const Eigen::Index n = c.size();
  const Eigen::VectorXd lam = lambda_table(2 * n + 2);
  Eigen::VectorXd l = Eigen::VectorXd::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (c(k) == 0.0) continue;
    const double kk = static_cast<double>(k);
    l(k) += (k == 0) ? c(k) : c(k) * std::sqrt(std::numbers::pi) / (2.0 * lam(2 * k));
    for (Eigen::Index j = k - 2; j >= 0; j -= 2) {
      const double jj = static_cast<double>(j);
      const double m = -kk * (jj + 0.5) / ((kk + jj + 1.0) * (kk - jj)) * lam(k - j - 2) * lam(k + j - 1);
      l(j) += m * c(k);
    }
  }
  return l;
}

Eigen::VectorXd leg2cheb(const Eigen::VectorXd& l) {
  const Eigen::Index n = l.size();
  const Eigen::VectorXd lam = lambda_table(2 * n + 2);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (l(k) == 0.0) continue;
    for (Eigen::Index j = k; j >= 0; j -= 2) {
      const double eps = (j == 0) ? 1.0 : 2.0;
      c(j) += eps / std::numbers::pi * lam(k - j) * lam(k + j) * l(k);
    }
  }
  return c;
}

LegSeries cheb2leg(const ChebSeries& c) { return LegSeries(cheb2leg(c.coeffs()), c.domain()); }
ChebSeries leg2cheb(const LegSeries& l) { return ChebSeries(leg2cheb(l.coeffs()), l.domain()); }

PiecewiseFun ConvResult::joined() const {
  return PiecewiseFun({left.domain().lo, left.domain().hi, right.domain().hi}, {left, right});
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> leg_conv_kernel(const Eigen::VectorXd& alpha_in,
                                                           const Eigen::VectorXd& beta_in) {
  // B has one column per beta coefficient, so let beta be the shorter one
  const bool swap = beta_in.size() > alpha_in.size();
  const Eigen::VectorXd& alpha = swap ? beta_in : alpha_in;
  const Eigen::VectorXd& beta = swap ? alpha_in : beta_in;
  const Eigen::Index M = alpha.size() - 1, N = beta.size() - 1;
  const Eigen::Index rows = M + N + 3;

  auto left_half = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(rows, N + 1);
    auto A = [&](Eigen::Index k) { return (k >= 0 && k <= M) ? a(k) : 0.0; };
    B(0, 0) = A(0) - A(1) / 3.0;
    for (Eigen::Index k = 1; k <= M + 1; ++k) {
      const double kk = static_cast<double>(k);
      B(k, 0) = A(k - 1) / (2.0 * kk - 1.0) - A(k + 1) / (2.0 * kk + 3.0);
    }
    if (N >= 1) {
      B(0, 1) = -B(1, 0) / 3.0;
      for (Eigen::Index k = 1; k <= M + 2; ++k) {
        const double kk = static_cast<double>(k);
        B(k, 1) = B(k - 1, 0) / (2.0 * kk - 1.0) - B(k, 0) - B(k + 1, 0) / (2.0 * kk + 3.0);
      }
    }
    for (Eigen::Index n = 1; n < N; ++n) {
      const double nn = static_cast<double>(n);
      // lower triangle by the three-term recurrence, upper by symmetry
      for (Eigen::Index k = n + 1; k <= M + n + 2; ++k) {
        const double kk = static_cast<double>(k);
        B(k, n + 1) = -(2.0 * nn + 1.0) / (2.0 * kk + 3.0) * B(k + 1, n) +
                      (2.0 * nn + 1.0) / (2.0 * kk - 1.0) * B(k - 1, n) + B(k, n - 1);
      }
      for (Eigen::Index k = 0; k <= n; ++k) {
        const double sgn = ((n + 1 + k) % 2 == 0) ? 1.0 : -1.0;
        B(k, n + 1) = sgn * (2.0 * static_cast<double>(k) + 1.0) / (2.0 * nn + 3.0) * B(n + 1, k);
      }
    }
    return Eigen::VectorXd(B.topRows(M + N + 2) * b);
  };

  Eigen::VectorXd gl = left_half(alpha, beta);
  Eigen::VectorXd a_ref = alpha, b_ref = beta;
  for (Eigen::Index k = 1; k <= M; k += 2) a_ref(k) = -a_ref(k);
  for (Eigen::Index k = 1; k <= N; k += 2) b_ref(k) = -b_ref(k);
  Eigen::VectorXd gr = left_half(a_ref, b_ref);
  for (Eigen::Index k = 1; k < gr.size(); k += 2) gr(k) = -gr(k);
  return {std::move(gl), std::move(gr)};
}

ConvResult conv_same_interval(const LegSeries& f, const LegSeries& g) {
  const Interval& df = f.domain();
  const Interval& dg = g.domain();
  const double w = df.width();
  const double round = 8.0 * std::numeric_limits<double>::epsilon() *
                      (std::abs(df.lo) + std::abs(df.hi) + std::abs(dg.lo) + std::abs(dg.hi));
  if (std::abs(dg.width() - w) > 1e-12 * std::max(w, dg.width()) + round)
    throw ParameterError("conv_same_interval: intervals must have the same width");
  auto [gl, gr] = leg_conv_kernel(f.coeffs(), g.coeffs());
  const double half = 0.5 * w;
  const double lo = df.lo + dg.lo;
  ConvResult out{ChebSeries(leg2cheb(Eigen::VectorXd(gl * half)), Interval(lo, lo + w)),
                 ChebSeries(leg2cheb(Eigen::VectorXd(gr * half)), Interval(lo + w, lo + 2.0 * w))};
  return out;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int n) {
  if (n < 1) throw ParameterError("gauss_legendre: need at least one node");
  // Golub-Welsch
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Eigen::VectorXd x = es.eigenvalues();
  Eigen::VectorXd w = 2.0 * es.eigenvectors().row(0).transpose().array().square();
  return {x, w};
}

namespace {

struct Contribution {
  Interval dom;
  ChebSeries s;
};

constexpr int kMaxPatches = 8;

void kernel_contrib(const ChebSeries& F, const ChebSeries& G, std::vector<Contribution>& out) {
  const ConvResult r = conv_same_interval(cheb2leg(F), cheb2leg(G));
  out.push_back({r.left.domain(), r.left});
  out.push_back({r.right.domain(), r.right});
}

// G much shorter than F: integrate over G's support with a Gauss rule that is exact for the
// polynomial integrand, then fit the two boundary bands and the interior separately.
// Over a window of width w, F behaves like a polynomial of degree ~ nF w / W.
void direct_contrib(const ChebSeries& F, const ChebSeries& G, std::vector<Contribution>& out, double tol) {
  const Interval df = F.domain(), dg = G.domain();
  const double W = df.width(), w = dg.width();
  const auto nF = F.coeffs().size(), nG = G.coeffs().size();
  const auto eff = std::min<Eigen::Index>(nF, static_cast<Eigen::Index>(std::ceil(2.0 * nF * w / W)) + 32);
  const int n = static_cast<int>((eff + nG) / 2) + 2;
  thread_local std::map<int, std::pair<Eigen::VectorXd, Eigen::VectorXd>> rules;
  auto it = rules.find(n);
  if (it == rules.end()) it = rules.emplace(n, gauss_legendre(n)).first;
  const Eigen::VectorXd& x = it->second.first;
  const Eigen::VectorXd& wt = it->second.second;

  FitOptions opt;
  opt.tol = tol;
  opt.vscale = F.coeffs().cwiseAbs().sum() * G.coeffs().cwiseAbs().sum() * w;
  if (opt.vscale == 0.0) return;
  // t - s loses ~eps*|endpoints| absolutely, which is large relative to a narrow G
  const double far = std::max({std::abs(df.lo), std::abs(df.hi), std::abs(dg.lo), std::abs(dg.hi)});
  opt.vscale *= std::max(1.0, 4.0 * std::numeric_limits<double>::epsilon() * far / (w * tol));

  // partial integrals on the bands, F cut down to the window t - s can reach
  auto band = [&](Interval d, const ChebSeries& Fw) {
    if (!(d.width() > 64.0 * std::numeric_limits<double>::epsilon() * far)) return;
    const Interval fw = Fw.domain();
    auto h = [&](double t) {
      const double lo = std::max(dg.lo, t - df.hi), hi = std::min(dg.hi, t - df.lo);
      if (!(hi > lo)) return 0.0;
      const double c = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
      double acc = 0.0;
      for (int q = 0; q < n; ++q) {
        const double s = c + r * x(q);
        acc += wt(q) * G(s) * Fw(std::clamp(t - s, fw.lo, fw.hi));
      }
      return acc * r;
    };
    out.push_back({d, adaptive_fit(h, d, opt)});
  };
  const double cuts[4] = {df.lo + dg.lo, df.lo + dg.hi, df.hi + dg.lo, df.hi + dg.hi};
  const double tiny = 1e-2 * tol;
  band(Interval(cuts[0], cuts[1]), restrict_to(F, Interval(df.lo, std::min(df.hi, df.lo + w)), tiny));
  if (cuts[2] > cuts[1]) {
    Eigen::VectorXd sq(n), cq(n);
    for (int q = 0; q < n; ++q) {
      sq(q) = dg.from_unit(x(q));
      cq(q) = wt(q) * G(sq(q)) * dg.half_width();
    }
    auto h = [&](double t) {
      double acc = 0.0;
      for (int q = 0; q < n; ++q) acc += cq(q) * F(std::clamp(t - sq(q), df.lo, df.hi));
      return acc;
    };
    const Interval d(cuts[1], cuts[2]);
    out.push_back({d, adaptive_fit(h, d, opt)});
  }
  band(Interval(cuts[2], cuts[3]), restrict_to(F, Interval(std::max(df.lo, df.hi - w), df.hi), tiny));
}

// Euclid-style patching: cut the longer piece into slabs the width of the shorter one,
// then handle the leftover slab against the shorter piece with the roles swapped
void conv_pair(const ChebSeries& A, const ChebSeries& Bs, std::vector<Contribution>& out, double tol) {
  const bool swap = Bs.domain().width() > A.domain().width();
  const ChebSeries& F = swap ? Bs : A;  // longer
  const ChebSeries& G = swap ? A : Bs;
  const Interval df = F.domain();
  const double W = df.width(), w = G.domain().width();
  const double far = std::max({std::abs(df.lo), std::abs(df.hi), std::abs(G.domain().lo), std::abs(G.domain().hi)});
  if (w <= 64.0 * std::numeric_limits<double>::epsilon() * far) return;  // below rounding of the endpoints
  if (W - w <= 1e-13 * W) {
    kernel_contrib(F, ChebSeries(G.coeffs(), Interval(G.domain().lo, G.domain().lo + W)), out);
    return;
  }
  if (W > kMaxPatches * w) {
    direct_contrib(F, G, out, tol);
    return;
  }
  const auto n = static_cast<long>(std::floor(W / w * (1.0 + 1e-13)));
  for (long i = 0; i < n; ++i) {
    const double lo = df.lo + static_cast<double>(i) * w;
    const ChebSeries patch = restrict_to(F, Interval(lo, std::min(lo + w, df.hi)), tol);
    kernel_contrib(ChebSeries(patch.coeffs(), Interval(lo, lo + w)), G, out);
  }
  const double rlo = df.lo + static_cast<double>(n) * w;
  const double r = df.hi - rlo;
  if (r <= 1e-13 * W) return;
  conv_pair(restrict_to(F, Interval(rlo, df.hi), tol), G, out, tol);
}

class ContribSum {
 public:
  // grouped by width (powers of two) so a lookup only scans starts within one group's width
  explicit ContribSum(std::vector<Contribution> c) {
    std::map<int, std::vector<Contribution>> by;
    for (auto& x : c) by[std::ilogb(std::max(x.dom.width(), 1e-300))].push_back(std::move(x));
    for (auto& [e, v] : by) {
      std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.dom.lo < b.dom.lo; });
      double maxw = 0.0;
      for (const auto& x : v) maxw = std::max(maxw, x.dom.width());
      groups_.push_back({std::move(v), maxw});
    }
  }

  // right-continuous like PiecewiseFun; ties at a shared end go to the right piece
  double operator()(double x) const {
    double acc = 0.0;
    for (const auto& g : groups_) {
      auto it = std::lower_bound(g.c.begin(), g.c.end(), x - g.maxw,
                                 [](const Contribution& a, double v) { return a.dom.lo < v; });
      for (; it != g.c.end() && it->dom.lo <= x; ++it)
        if (x < it->dom.hi || (x == it->dom.hi && x == hi_)) acc += it->s(x);
    }
    return acc;
  }

  void set_outer_hi(double hi) { hi_ = hi; }

 private:
  struct Group {
    std::vector<Contribution> c;
    double maxw;
  };
  std::vector<Group> groups_;
  double hi_ = 0.0;
};

// breakpoints where p (taken as zero outside its support) jumps in value, slope or curvature.
// Derivative jumps are measured against what fit noise at tolerance level would give on the
// neighbouring pieces, which grows like (n^2 / half-width)^j on short pieces.
std::vector<double> strong_breakpoints(const PiecewiseFun& p) {
  const auto& bp = p.breakpoints();
  const auto& pc = p.pieces();
  std::vector<ChebSeries> d1, d2;
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (const auto& s : pc) {
    d1.push_back(differentiate(s, 1));
    d2.push_back(differentiate(s, 2));
    s0 = std::max(s0, s.coeff_scale());
    s1 = std::max(s1, d1.back().coeff_scale());
    s2 = std::max(s2, d2.back().coeff_scale());
  }
  auto noise = [&](std::size_t k, int j) {
    const double n = static_cast<double>(pc[k].coeffs().size());
    const double g = n * n / pc[k].domain().half_width();
    return kDefaultTol * s0 * (j == 1 ? g : g * g / 3.0);
  };
  std::vector<double> out;
  for (std::size_t i = 0; i < bp.size(); ++i) {
    const double x = bp[i];
    double jv = 0.0, j1 = 0.0, j2 = 0.0, n1 = 0.0, n2 = 0.0;
    if (i > 0) {
      jv -= pc[i - 1](x);
      j1 -= d1[i - 1](x);
      j2 -= d2[i - 1](x);
      n1 += noise(i - 1, 1);
      n2 += noise(i - 1, 2);
    }
    if (i < pc.size()) {
      jv += pc[i](x);
      j1 += d1[i](x);
      j2 += d2[i](x);
      n1 += noise(i, 1);
      n2 += noise(i, 2);
    }
    if (std::abs(jv) > 1e-12 * s0 || std::abs(j1) > std::max(1e-10 * s1, 1e3 * n1) ||
        std::abs(j2) > std::max(1e-8 * s2, 1e3 * n2))
      out.push_back(x);
  }
  return out;
}

// below floor_w a failed fit is kept as is: such slivers sit on cusps that rounding noise swamps
void fit_bisecting(const ContribSum& h, Interval dom, const FitOptions& opt, double floor_w, int depth,
                   std::vector<double>& bp, std::vector<ChebSeries>& pieces) {
  try {
    pieces.push_back(adaptive_fit(h, dom, opt));
  } catch (const FitError& e) {
    if (depth >= 40 || dom.width() <= floor_w) {
      Eigen::VectorXd c = e.best().coeffs();
      if (c.size() > 17) c.conservativeResize(17);
      pieces.push_back(simplify(ChebSeries(c, dom), opt.tol));
    } else {
      fit_bisecting(h, Interval(dom.lo, dom.mid()), opt, floor_w, depth + 1, bp, pieces);
      fit_bisecting(h, Interval(dom.mid(), dom.hi), opt, floor_w, depth + 1, bp, pieces);
      return;
    }
  }
  bp.push_back(dom.hi);
}

}  // namespace

PiecewiseFun conv_general(const PiecewiseFun& f, const PiecewiseFun& g, ConvMode mode, double tol) {
  if (f.empty() || g.empty()) throw ParameterError("conv_general: empty piece list");
  const Interval df = f.domain(), dg = g.domain();
  return conv_general(f, g, mode == ConvMode::same ? dg : Interval(df.lo + dg.lo, df.hi + dg.hi), tol);
}

PiecewiseFun conv_general(const PiecewiseFun& f, const PiecewiseFun& g, Interval outer, double tol) {
  if (f.empty() || g.empty()) throw ParameterError("conv_general: empty piece list");
  const Interval df = f.domain(), dg = g.domain();
  const double slack = 1e-12 * (df.width() + dg.width());
  if (outer.lo < df.lo + dg.lo - slack || outer.hi > df.hi + dg.hi + slack)
    throw ParameterError("conv_general: output interval exceeds the support of f*g");
  std::vector<Contribution> contribs;
  for (const auto& pf : f.pieces())
    for (const auto& pg : g.pieces()) conv_pair(pf, pg, contribs, tol);

  ContribSum h(std::move(contribs));
  h.set_outer_hi(df.hi + dg.hi);

  std::vector<double> cand{outer.lo, outer.hi};
  const std::vector<double> sf = strong_breakpoints(f), sg = strong_breakpoints(g);
  for (double a : sf)
    for (double b : sg)
      if (a + b > outer.lo && a + b < outer.hi) cand.push_back(a + b);
  const std::vector<double> nat = merge_breakpoints(cand, 1e-13);

  // scale for the absolute part of the tolerance
  double vscale = 0.0;
  const Eigen::VectorXd s33 = cheb_points(33);
  for (std::size_t k = 0; k + 1 < nat.size(); ++k) {
    const Interval d(nat[k], nat[k + 1]);
    for (Eigen::Index j = 0; j < s33.size(); ++j) vscale = std::max(vscale, std::abs(h(d.from_unit(s33(j)))));
  }
  FitOptions opt;
  opt.tol = tol;
  opt.vscale = vscale;
  // weak singularities at the candidates are cheaper to grade by bisection than to resolve
  opt.max_log2 = 9;

  // candidate breakpoints the output is smooth across get absorbed into low-degree neighbours
  FitOptions capped = opt;
  capped.max_log2 = 7;
  auto try_fit = [&](double a, double b) -> std::optional<ChebSeries> {
    try {
      return adaptive_fit(h, Interval(a, b), capped);
    } catch (const FitError&) {
      return std::nullopt;
    }
  };
  std::vector<double> bp{nat.front()};
  std::vector<ChebSeries> pieces;
  for (std::size_t k = 0; k + 1 < nat.size();) {
    std::optional<ChebSeries> cur = try_fit(nat[k], nat[k + 1]);
    if (!cur) {
      fit_bisecting(h, Interval(nat[k], nat[k + 1]), opt, 1e-9 * (outer.hi - outer.lo), 0, bp, pieces);
      ++k;
      continue;
    }
    std::size_t j = k + 1;
    for (; j + 1 < nat.size(); ++j) {
      auto wider = try_fit(nat[k], nat[j + 1]);
      if (!wider) break;
      cur = std::move(wider);
    }
    pieces.push_back(std::move(*cur));
    bp.push_back(nat[j]);
    k = j;
  }
  return PiecewiseFun(std::move(bp), std::move(pieces));
}

}  // namespace conleg
