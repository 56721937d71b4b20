#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "conleg/levy.hpp"
#include "param_sets.hpp"

using namespace conleg;
using cd = std::complex<double>;

namespace {

std::vector<LevyModel> all_models() {
  return {sets::gbm1().model, sets::gbm2(50).model, sets::vg1().model,
          sets::nig1().model, sets::cgmy1().model,  sets::cgmy2().model,
          LevyModel(Nig{15.0, -5.0, 0.5, 0.1}, 0.05, 0.02)};
}

// n-th Taylor coefficient of log phi at 0 times n!, from the trapezoid rule on a circle
double cauchy_cumulant(const LevyModel& m, double t, int n, double rho) {
  const int K = 64;
  cd acc = 0.0;
  for (int j = 0; j < K; ++j) {
    const cd z = rho * std::exp(cd(0.0, 2.0 * std::numbers::pi * j / K));
    acc += std::log(char_fn(m, z, t)) / std::pow(z, n);
  }
  const double fact = std::tgamma(n + 1.0);
  // kappa_n = i^{-n} d^n/du^n log phi(0)
  return (acc / double(K) * fact * std::pow(cd(0.0, -1.0), n)).real();
}

// density at x from the characteristic function, (1/pi) int_0^inf Re[e^{-iux} phi(u)] du
double inverse_fourier_pdf(const LevyModel& m, double x, double t) {
  auto f = [&](double u) { return (std::exp(cd(0.0, -u * x)) * char_fn(m, u, t)).real(); };
  boost::math::quadrature::exp_sinh<double> es;
  return es.integrate(f, 1e-14) / std::numbers::pi;
}

}  // namespace

TEST_CASE("compensator values") {
  CHECK(compensator(LevyModel(Gbm{0.2}, 0.0, 0.0)) == doctest::Approx(-0.02).epsilon(1e-14));
  const double vg = compensator(sets::vg1().model);
  CHECK(vg == doctest::Approx(std::log(1 + 0.14 * 0.2 - 0.12 * 0.12 * 0.2 / 2) / 0.2).epsilon(1e-14));
}

TEST_CASE("martingale identity and normalisation") {
  for (const auto& m : all_models()) {
    for (double t : {0.1, 1.0, 2.5}) {
      const cd v = char_fn(m, cd(0.0, -1.0), t);
      CHECK(std::abs(v - std::exp((m.r - m.q) * t)) <= 1e-12 * std::exp((m.r - m.q) * t));
      CHECK(std::abs(char_fn(m, 0.0, t) - 1.0) < 1e-15);
    }
  }
}

TEST_CASE("gbm characteristic function value") {
  const LevyModel m(Gbm{0.15}, 0.03, 0.01);
  const cd expect = std::exp(cd(-0.15 * 0.15 / 2, 0.03 - 0.01 - 0.15 * 0.15 / 2));
  CHECK(std::abs(char_fn(m, 1.0, 1.0) - expect) < 1e-15);
}

TEST_CASE("conjugate symmetry and boundedness") {
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> ud(-200, 200);
  for (const auto& m : all_models()) {
    for (int k = 0; k < 50; ++k) {
      const double u = ud(gen);
      const cd a = char_fn(m, u, 0.7), b = char_fn(m, -u, 0.7);
      CHECK(std::abs(a - std::conj(b)) < 1e-14);
      CHECK(std::abs(a) <= 1.0 + 1e-14);
    }
  }
}

TEST_CASE("gbm pdf") {
  const LevyModel m = sets::gbm1().model;
  const double mu = drift(m), s = 0.15;
  CHECK(pdf_closed_form(m, mu, 1.0) == doctest::Approx(1.0 / (s * std::sqrt(2 * std::numbers::pi))).epsilon(1e-14));
  auto f = [&](double x) { return pdf_closed_form(m, x, 1.0); };
  const double mass =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, mu - 8 * s, mu + 8 * s, 10, 1e-15);
  CHECK(std::abs(mass - 1.0) < 1e-12);
}

TEST_CASE("closed-form pdfs agree with the characteristic function") {
  for (const auto& c : {sets::gbm1(), sets::nig1()}) {
    for (double x : {-0.3, -0.05, 0.0, 0.02, 0.25})
      CHECK(std::abs(pdf_closed_form(c.model, x, 1.0) - inverse_fourier_pdf(c.model, x, 1.0)) < 1e-9);
  }
  // VG at a horizon where the density is smooth
  const LevyModel vg = sets::vg1().model;
  for (double x : {-0.3, -0.05, 0.02, 0.25})
    CHECK(std::abs(pdf_closed_form(vg, x, 1.0) - inverse_fourier_pdf(vg, x, 1.0)) < 1e-9);
}

TEST_CASE("vg1 pdf integrates to one over the truncation interval") {
  const auto c = sets::vg1();
  const Interval I = truncation_interval(c.model, c.T, 10);
  const double cusp = drift(c.model) * c.T;
  auto f = [&](double x) { return pdf_closed_form(c.model, x, c.T); };
  boost::math::quadrature::tanh_sinh<double> ts;
  const double mass = ts.integrate(f, I.lo, cusp) + ts.integrate(f, cusp, I.hi);
  CHECK(std::abs(mass - 1.0) < 1e-6);
  CHECK(std::isinf(pdf_closed_form(c.model, cusp, c.T)));
}

TEST_CASE("nig1 pdf mass and mean") {
  const auto c = sets::nig1();
  const Interval I = truncation_interval(c.model, c.T, 10);
  boost::math::quadrature::tanh_sinh<double> ts;
  const double mass = ts.integrate([&](double x) { return pdf_closed_form(c.model, x, c.T); }, I.lo, I.hi);
  const double mean = ts.integrate([&](double x) { return x * pdf_closed_form(c.model, x, c.T); }, I.lo, I.hi);
  CHECK(std::abs(mass - 1.0) < 1e-10);
  CHECK(std::abs(mean - cumulants(c.model, c.T).c1) < 1e-10);
}

TEST_CASE("no closed form for cgmy") {
  CHECK_FALSE(has_closed_form(sets::cgmy1().model));
  CHECK_THROWS_AS(pdf_closed_form(sets::cgmy1().model, 0.0, 1.0), ParameterError);
}

TEST_CASE("gbm cumulants") {
  const Cumulants k = cumulants(LevyModel(Gbm{0.15}, 0.03, 0.01), 1.0);
  CHECK(k.c1 == doctest::Approx(0.00875).epsilon(1e-14));
  CHECK(k.c2 == doctest::Approx(0.0225).epsilon(1e-14));
  CHECK(k.c4 == 0.0);
}

TEST_CASE("cumulants are linear in t") {
  for (const auto& m : all_models()) {
    const Cumulants a = cumulants(m, 0.6), b = cumulants(m, 1.2);
    CHECK(b.c1 == doctest::Approx(2 * a.c1).epsilon(1e-13));
    CHECK(b.c2 == doctest::Approx(2 * a.c2).epsilon(1e-13));
    CHECK(b.c4 == doctest::Approx(2 * a.c4).epsilon(1e-13));
  }
}

TEST_CASE("cumulants match derivatives of log phi") {
  for (const auto& m : all_models()) {
    const Cumulants k = cumulants(m, 1.0);
    CHECK(cauchy_cumulant(m, 1.0, 1, 0.5) == doctest::Approx(k.c1).epsilon(1e-8));
    CHECK(cauchy_cumulant(m, 1.0, 2, 0.5) == doctest::Approx(k.c2).epsilon(1e-8));
    if (k.c4 != 0.0) CHECK(cauchy_cumulant(m, 1.0, 4, 0.5) == doctest::Approx(k.c4).epsilon(1e-7));
  }
}

TEST_CASE("truncation interval") {
  const LevyModel m = sets::gbm1().model;
  const Interval I = truncation_interval(m, 1.0, 10);
  CHECK(I.hi == doctest::Approx(1.50875).epsilon(1e-14));
  CHECK(I.lo == -I.hi);
  const Cumulants k = cumulants(m, 0.1);
  const Interval J = truncation_interval(m, 0.1, 10);
  CHECK(J.hi == doctest::Approx(std::abs(k.c1 + 10 * std::sqrt(k.c2)) + 0.5).epsilon(1e-14));
  CHECK(J.lo == -J.hi);
  CHECK_THROWS_AS(truncation_interval(m, 1.0, 7.0), ParameterError);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(LevyModel(Vg{0.5, 2.0, 1.0}, 0.0, 0.0), ParameterError);
  CHECK_THROWS_AS(LevyModel(Gbm{0.0}, 0.0, 0.0), ParameterError);
  CHECK_THROWS_AS(LevyModel(Nig{1.0, 2.0, 0.5, 0.0}, 0.0, 0.0), ParameterError);
  CHECK_THROWS_AS(LevyModel(Cgmy{1.0, 5.0, 0.5, 0.5}, 0.0, 0.0), ParameterError);
  CHECK_THROWS_AS(LevyModel(Cgmy{1.0, 5.0, 5.0, 2.0}, 0.0, 0.0), ParameterError);
}
