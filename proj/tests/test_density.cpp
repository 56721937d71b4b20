#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "conleg/density.hpp"
#include "conleg/reference.hpp"
#include "param_sets.hpp"

using namespace conleg;
using cd = std::complex<double>;

namespace {

// power series for J_n(x), fine for small x
double bessel_series(int n, double x) {
  double term = std::pow(x / 2, n) / std::tgamma(n + 1.0), acc = term;
  for (int k = 1; k < 60; ++k) {
    term *= -(x * x / 4) / (k * double(k + n));
    acc += term;
  }
  return acc;
}

double max_err(const ScalarFn& f, const ScalarFn& g, Interval I, int n = 400) {
  double e = 0.0;
  for (int j = 0; j <= n; ++j) {
    const double x = I.lo + I.width() * j / n;
    e = std::max(e, std::abs(f(x) - g(x)));
  }
  return e;
}

}  // namespace

TEST_CASE("cfs coefficients") {
  for (const auto& c : {sets::gbm1(), sets::vg1(), sets::nig1(), sets::cgmy1()}) {
    const Interval I = truncation_interval(c.model, c.T);
    const CfsDensity d = cfs_coeffs(c.model, I, c.T, 64);
    CHECK(std::abs(d.b(0) - 1.0) < 1e-15);
  }
  const auto g = sets::gbm1();
  const Interval I = truncation_interval(g.model, g.T);
  const CfsDensity d = cfs_coeffs(g.model, I, g.T, 64);
  for (int k = 0; k <= 64; ++k) {
    const double u = 2 * std::numbers::pi * k / I.width();
    CHECK(std::abs(d.b(k)) == doctest::Approx(std::exp(-0.15 * 0.15 * u * u / 2)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(cfs_coeffs(g.model, I, 1.0, 8), ParameterError);
}

TEST_CASE("partial sum is real") {
  // the real part is taken by construction; check against the two-sided sum
  const auto c = sets::nig1();
  const Interval I = truncation_interval(c.model, c.T);
  const CfsDensity d = cfs_coeffs(c.model, I, c.T, 128);
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> ud(I.lo, I.hi);
  for (int i = 0; i < 50; ++i) {
    const double x = ud(gen);
    cd acc = 0.0;
    for (int k = -128; k <= 128; ++k) {
      const cd bk = k >= 0 ? d.b(k) : std::conj(d.b(-k));
      acc += bk * std::exp(cd(0.0, 2 * std::numbers::pi * k * x / I.width()));
    }
    CHECK(std::abs(acc.imag()) < 1e-12);
    CHECK(std::abs(acc.real() / I.width() - eval(d, x)) < 1e-11);
  }
}

TEST_CASE("bessel functions") {
  CHECK(bessel_j(0, 0.0) == 1.0);
  CHECK(bessel_j(1, 0.0) == 0.0);
  CHECK(std::abs(bessel_j(0, 2.404826)) < 1e-5);
  CHECK(std::abs(bessel_series(0, 2.404826)) < 1e-5);
  for (double x : {0.1, 1.0, 3.0, 7.5})
    for (int n : {0, 1, 2, 5, 12}) CHECK(bessel_j(n, x) == doctest::Approx(bessel_series(n, x)).epsilon(1e-12));
  // larger arguments against boost
  for (double x : {10.0, 31.4, 314.159, 3216.99})
    for (int n : {0, 1, 7, 40, 300, 3000}) {
      const double ref = boost::math::cyl_bessel_j(n, x);
      CHECK(std::abs(bessel_j(n, x) - ref) < 1e-12 * std::max(1.0, std::abs(ref)) + 1e-14);
    }
  CHECK(bessel_j(3, -2.0) == doctest::Approx(-bessel_j(3, 2.0)).epsilon(1e-15));
  const Eigen::VectorXd all = bessel_j_all(50, 20.0);
  double s = all(0);
  for (int k = 2; k <= 50; k += 2) s += 2 * all(k);
  CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("single mode") {
  // width one: b_1 = 1 gives 2 cos(2 pi x)
  CfsDensity d;
  d.b = Eigen::VectorXcd::Zero(17);
  d.b(1) = 1.0;
  d.interval = Interval(-0.5, 0.5);
  const ChebSeries s = cfs_to_cheb(d, false);
  const ChebSeries ref = adaptive_fit([](double x) { return 2 * std::cos(2 * std::numbers::pi * x); }, d.interval);
  CHECK(max_err(s, ref, d.interval) < 1e-10);
  // width two halves the frequency and the amplitude
  d.interval = Interval(-1, 1);
  CHECK(max_err(cfs_to_cheb(d, false), [](double x) { return std::cos(std::numbers::pi * x); }, d.interval) < 1e-10);
  // off-centre interval exercises the phase
  d.interval = Interval(0.3, 1.7);
  d.b(1) = cd(0.4, -0.7);
  CHECK(max_err(cfs_to_cheb(d, false), [&](double x) { return eval(d, x); }, d.interval) < 1e-12);
}

TEST_CASE("constant series") {
  CfsDensity d;
  d.b = Eigen::VectorXcd::Zero(17);
  d.b(0) = 1.0;
  d.interval = Interval(-2, 2);
  const ChebSeries s = cfs_to_cheb(d, false);
  CHECK(s.degree() == 0);
  CHECK(s.coeffs()(0) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("bessel projection matches the partial sum") {
  std::mt19937 gen(11);
  for (const auto& c : {sets::gbm1(), sets::vg1(), sets::nig1(), sets::cgmy1(), sets::cgmy2()}) {
    const Interval I = truncation_interval(c.model, c.T);
    const CfsDensity d = cfs_coeffs(c.model, I, c.T, 1024);
    const ChebSeries s = cfs_to_cheb(d, false);
    const ChebSeries r = cfs_to_cheb(d, true);
    std::uniform_real_distribution<double> ud(I.lo, I.hi);
    double e = 0.0, er = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double x = ud(gen);
      e = std::max(e, std::abs(s(x) - eval(d, x)));
      er = std::max(er, std::abs(r(-x) - eval(d, x)));
    }
    INFO(std::string(c.name));
    CHECK(e < 1e-10);
    CHECK(er < 1e-10);
  }
}

TEST_CASE("gbm series against the closed form") {
  const auto c = sets::gbm1();
  const Interval I = truncation_interval(c.model, c.T);
  const ChebSeries s = cfs_to_cheb(cfs_coeffs(c.model, I, c.T, 1024), false);
  CHECK(max_err(s, [&](double x) { return pdf_closed_form(c.model, x, c.T); }, I, 2000) < 1e-8);
}

TEST_CASE("series against the closed form at t = 1") {
  for (const LevyModel& m : {sets::gbm1().model, sets::nig1().model, sets::vg1().model}) {
    const Interval I = truncation_interval(m, 1.0);
    const ChebSeries s = cfs_to_cheb(cfs_coeffs(m, I, 1.0, 1024), false);
    CHECK(max_err(s, [&](double x) { return pdf_closed_form(m, x, 1.0); }, I, 2000) < 1e-8);
  }
}

TEST_CASE("pade examples") {
  Eigen::VectorXcd b(6);
  for (int k = 0; k < 6; ++k) b(k) = std::pow(0.5, k);
  PadeApprox p = fourier_pade(b, 0, 1);
  REQUIRE(p.P.size() == 1);
  REQUIRE(p.Q.size() == 2);
  CHECK(std::abs(p.P(0) - 1.0) < 1e-15);
  CHECK(std::abs(p.Q(1) + 0.5) < 1e-15);

  b.setZero();
  b(0) = 1.0;
  p = fourier_pade(b, 0, 1);
  CHECK(p.P.size() == 1);
  CHECK(p.Q.size() == 1);
  CHECK(std::abs(p.P(0) - 1.0) < 1e-15);

  // 1/((1-0.3z)(1-0.6z))
  for (int k = 0; k < 6; ++k) b(k) = (std::pow(0.6, k + 1) - std::pow(0.3, k + 1)) / 0.3;
  p = fourier_pade(b, 0, 2);
  REQUIRE(p.Q.size() == 3);
  const cd q1 = p.Q(1), q2 = p.Q(2);
  const cd disc = std::sqrt(q1 * q1 - 4.0 * q2);
  cd r1 = (-q1 - disc) / (2.0 * q2), r2 = (-q1 + disc) / (2.0 * q2);
  if (std::abs(r1) > std::abs(r2)) std::swap(r1, r2);
  CHECK(std::abs(r1 - 1 / 0.6) < 1e-10);
  CHECK(std::abs(r2 - 1 / 0.3) < 1e-10);

  CHECK_THROWS_AS(fourier_pade(b, 5, 1), ParameterError);
  Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(8);
  CHECK_THROWS_AS(fourier_pade(zero, 2, 2), NumericalError);
}

TEST_CASE("pade residual") {
  std::mt19937 gen(2);
  std::normal_distribution<double> nd;
  Eigen::VectorXcd b(40);
  for (int k = 0; k < 40; ++k) b(k) = cd(nd(gen), nd(gen)) * std::pow(0.9, k);
  const int Np = 20, Mp = 4;
  const PadeApprox p = fourier_pade(b, Np, Mp);
  CHECK(p.Q(0) == cd(1.0));
  // Taylor coefficients of P/Q by long division
  Eigen::VectorXcd s = Eigen::VectorXcd::Zero(Np + Mp + 1);
  for (int n = 0; n <= Np + Mp; ++n) {
    cd acc = n <= Np ? p.P(n) : cd(0.0);
    for (int m = 1; m < p.Q.size() && m <= n; ++m) acc -= p.Q(m) * s(n - m);
    s(n) = acc;
  }
  for (int n = 0; n <= Np + Mp; ++n) CHECK(std::abs(s(n) - b(n)) < 1e-10);
}

TEST_CASE("singularity location") {
  const auto g = sets::gbm1();
  CHECK(locate_singularities(g.model, truncation_interval(g.model, g.T), g.T, 1024).empty());
  const LevyModel gs(Gbm{0.15}, 0.03, 0.01);
  CHECK(locate_singularities(gs, truncation_interval(gs, 0.01), 0.01, 1024).empty());

  const auto v = sets::vg1();
  const Interval I = truncation_interval(v.model, v.T);
  const double cusp = drift(v.model) * v.T;
  for (int N : {512, 1024, 2048}) {
    const auto s = locate_singularities(v.model, I, v.T, N);
    INFO(N);
    REQUIRE(s.size() == 1);
    CHECK(std::abs(s[0] - cusp) < 2e-3);
  }
  CHECK_THROWS_AS(locate_singularities(v.model, I, v.T, 128), ParameterError);
}

TEST_CASE("nig short horizon peak") {
  const LevyModel m = sets::nig1().model;
  const double t = 0.004;
  const Interval I = truncation_interval(m, t);
  // argmax of the closed form by golden section
  auto f = [&](double x) { return pdf_closed_form(m, x, t); };
  double a = -0.05, b = 0.05;
  const double gr = (std::sqrt(5.0) - 1) / 2;
  for (int i = 0; i < 200; ++i) {
    const double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    if (f(x1) > f(x2)) b = x2; else a = x1;
  }
  const double peak = 0.5 * (a + b);
  std::vector<double> s1 = locate_singularities(m, I, t, 512), s2 = locate_singularities(m, I, t, 1024);
  REQUIRE(s1.size() == 1);
  REQUIRE(s2.size() == 1);
  CHECK(std::abs(s2[0] - peak) < 2e-3);
  CHECK(std::abs(s1[0] - s2[0]) < 1e-3);
}

TEST_CASE("reflected density") {
  const auto g = sets::gbm1();
  const Interval I = truncation_interval(g.model, g.T);
  const PiecewiseFun gr = build_reflected_density(g.model, I, g.T);
  CHECK(gr.size() == 1);
  CHECK(std::abs(integrate(gr) - 1.0) < 1e-10);
  std::mt19937 gen(9);
  std::uniform_real_distribution<double> ud(I.lo, I.hi);
  for (int i = 0; i < 50; ++i) {
    const double x = ud(gen);
    CHECK(std::abs(gr(x) - pdf_closed_form(g.model, -x, g.T)) < 1e-12);
  }

  const auto v = sets::vg1();
  const Interval J = truncation_interval(v.model, v.T);
  const PiecewiseFun vr = build_reflected_density(v.model, J, v.T);
  const double cusp = drift(v.model) * v.T;
  const auto& vb = vr.breakpoints();
  // split exactly at the reflected cusp, with pieces shrinking toward it from both sides
  CHECK(std::find(vb.begin(), vb.end(), -cusp) != vb.end());
  CHECK(vr.piece_index(-cusp - 1e-3) != vr.piece_index(-cusp + 1e-3));
  boost::math::quadrature::tanh_sinh<double> ts;
  auto pdf = [&](double x) { return pdf_closed_form(v.model, x, v.T); };
  const double mass = ts.integrate(pdf, J.lo, cusp) + ts.integrate(pdf, cusp, J.hi);
  CHECK(std::abs(integrate(vr) - mass) < 1e-6);
  CHECK(std::abs(integrate(vr) - 1.0) < 1e-6);
  double e = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double x = ud(gen) * J.hi / I.hi;
    if (std::abs(x + cusp) > 1e-9) e = std::max(e, std::abs(vr(x) - pdf(-x)) / std::max(1.0, pdf(-x)));
  }
  CHECK(e < 1e-12);
}

TEST_CASE("densities integrate to one and stay nonnegative") {
  for (const auto& c : {sets::gbm1(), sets::gbm2(50), sets::vg1(), sets::nig1(), sets::cgmy1(), sets::cgmy2()}) {
    INFO(std::string(c.name));
    const Interval I = truncation_interval(c.model, c.T);
    const PiecewiseFun g = build_reflected_density(c.model, I, c.T);
    CHECK(std::abs(integrate(g) - 1.0) < 1e-6);
    double lo = 0.0;
    for (int j = 0; j <= 2000; ++j) {
      const double x = I.lo + I.width() * j / 2000;
      bool near = false;
      for (double b : g.breakpoints()) near = near || std::abs(x - b) < 0.02;
      if (!near) lo = std::min(lo, g(x));
    }
    CHECK(lo > -1e-7);
  }
}

TEST_CASE("cgmy with Y < 1 keeps its peak at the drift point") {
  const auto c = sets::cgmy1();
  const double t = 0.1;
  const Interval I = truncation_interval(c.model, t);
  const PiecewiseFun g = build_reflected_density(c.model, I, t);
  const double spike = drift(c.model) * t;
  const auto& b = g.breakpoints();
  CHECK(std::find(b.begin(), b.end(), -spike) != b.end());
  CHECK(std::abs(integrate(g) - 1.0) < 1e-8);
  const reference::OracleDensity o(c.model, t);
  double e = 0.0, top = 0.0;
  for (int j = 0; j <= 1000; ++j) {
    const double x = I.lo + I.width() * j / 1000;
    if (std::abs(x + spike) < 1e-3) continue;
    e = std::max(e, std::abs(g(x) - o(-x)));
    top = std::max(top, o(-x));
  }
  CHECK(e < 1e-8 * top);
}
