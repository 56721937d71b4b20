#include "conleg/levy.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace conleg {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

using cd = std::complex<double>;
constexpr cd I(0.0, 1.0);

void require(bool ok, const char* what) {
  if (!ok) throw ParameterError(what);
}

}  // namespace

LevyModel::LevyModel(LevyParams p, double r_, double q_) : params(p), r(r_), q(q_) { validate(*this); }

void validate(const LevyModel& m) {
  require(std::isfinite(m.r) && std::isfinite(m.q), "rates must be finite");
  std::visit(overloaded{
                 [](const Gbm& g) { require(g.sigma > 0.0, "gbm: sigma must be positive"); },
                 [](const Nig& n) {
                   require(n.delta > 0.0, "nig: delta must be positive");
                   require(n.alpha > std::abs(n.beta), "nig: need alpha > |beta|");
                   require(n.alpha > std::abs(n.beta + 1.0), "nig: need alpha > |beta + 1| for the compensator");
                   require(n.sigma >= 0.0, "nig: sigma must be nonnegative");
                 },
                 [](const Vg& v) {
                   require(v.sigma > 0.0, "vg: sigma must be positive");
                   require(v.nu > 0.0, "vg: nu must be positive");
                   require(1.0 - v.theta * v.nu - 0.5 * v.sigma * v.sigma * v.nu > 0.0,
                           "vg: need 1 - theta*nu - sigma^2*nu/2 > 0");
                 },
                 [](const Cgmy& c) {
                   require(c.C > 0.0, "cgmy: C must be positive");
                   require(c.G > 0.0, "cgmy: G must be positive");
                   require(c.M > 1.0, "cgmy: M must exceed 1");
                   require(c.Y < 2.0, "cgmy: Y must be below 2");
                   require(c.Y != 0.0 && c.Y != 1.0, "cgmy: Y = 0 and Y = 1 are not supported");
                 },
             },
             m.params);
}

std::string model_name(const LevyModel& m) {
  return std::visit(overloaded{[](const Gbm&) { return std::string("gbm"); },
                               [](const Nig&) { return std::string("nig"); },
                               [](const Vg&) { return std::string("vg"); },
                               [](const Cgmy&) { return std::string("cgmy"); }},
                    m.params);
}

cd char_exponent(const LevyModel& m, cd u) {
  return std::visit(
      overloaded{
          [&](const Gbm& g) { return -0.5 * g.sigma * g.sigma * u * u; },
          [&](const Nig& n) {
            const cd bu = n.beta + I * u;
            return -0.5 * n.sigma * n.sigma * u * u +
                   n.delta * (std::sqrt(n.alpha * n.alpha - n.beta * n.beta) - std::sqrt(n.alpha * n.alpha - bu * bu));
          },
          [&](const Vg& v) {
            return -std::log(1.0 - I * v.theta * v.nu * u + 0.5 * v.sigma * v.sigma * v.nu * u * u) / v.nu;
          },
          [&](const Cgmy& c) {
            const double k = c.C * std::tgamma(-c.Y);
            const cd iu = I * u;
            return k * std::pow(c.G, c.Y) * (std::pow(1.0 + iu / c.G, c.Y) - 1.0 - iu * c.Y / c.G) +
                   k * std::pow(c.M, c.Y) * (std::pow(1.0 - iu / c.M, c.Y) - 1.0 + iu * c.Y / c.M);
          },
      },
      m.params);
}

double compensator(const LevyModel& m) {
  validate(m);
  return -char_exponent(m, cd(0.0, -1.0)).real();
}

double drift(const LevyModel& m) { return m.r - m.q + compensator(m); }

cd char_fn(const LevyModel& m, cd u, double t) {
  if (!(t > 0.0)) throw ParameterError("char_fn: horizon must be positive");
  return std::exp(t * (I * u * drift(m) + char_exponent(m, u)));
}

namespace {

cd dpsi_dsigma(const LevyModel& m, cd u) {
  return std::visit(
      overloaded{
          [&](const Gbm& g) { return cd(-g.sigma * u * u); },
          [&](const Nig& n) { return cd(-n.sigma * u * u); },
          [&](const Vg& v) {
            return -v.sigma * u * u / (1.0 - I * v.theta * v.nu * u + 0.5 * v.sigma * v.sigma * v.nu * u * u);
          },
          [&](const Cgmy&) -> cd { throw ParameterError("vega unsupported for cgmy"); },
      },
      m.params);
}

}  // namespace

bool has_sigma_derivative(const LevyModel& m) { return !std::holds_alternative<Cgmy>(m.params); }

double compensator_dsigma(const LevyModel& m) {
  if (!has_sigma_derivative(m)) throw ParameterError("vega unsupported for " + model_name(m));
  // omega = -psi(-i)
  return -dpsi_dsigma(m, cd(0.0, -1.0)).real();
}

cd char_fn_dsigma_centred(const LevyModel& m, cd u, double t) {
  if (!has_sigma_derivative(m)) throw ParameterError("vega unsupported for " + model_name(m));
  return char_fn(m, u, t) * t * dpsi_dsigma(m, u);
}

cd char_fn_dsigma(const LevyModel& m, cd u, double t) {
  return char_fn_dsigma_centred(m, u, t) + char_fn(m, u, t) * t * I * u * compensator_dsigma(m);
}

bool has_closed_form(const LevyModel& m) {
  return std::visit(overloaded{[](const Gbm&) { return true; }, [](const Nig& n) { return n.sigma == 0.0; },
                               [](const Vg&) { return true; }, [](const Cgmy&) { return false; }},
                    m.params);
}

double pdf_closed_form(const LevyModel& m, double x, double t) {
  if (!(t > 0.0)) throw ParameterError("pdf_closed_form: horizon must be positive");
  if (!has_closed_form(m)) throw ParameterError("pdf_closed_form: no closed form for " + model_name(m));
  const double mu = drift(m) * t;
  const double z = x - mu;
  return std::visit(
      overloaded{
          [&](const Gbm& g) {
            const double s = g.sigma * std::sqrt(t);
            return std::exp(-0.5 * z * z / (s * s)) / (s * std::sqrt(2.0 * std::numbers::pi));
          },
          [&](const Nig& n) {
            const double dt = n.delta * t;
            const double rho = std::sqrt(dt * dt + z * z);
            const double gam = std::sqrt(n.alpha * n.alpha - n.beta * n.beta);
            return n.alpha * dt * std::cyl_bessel_k(1.0, n.alpha * rho) / (std::numbers::pi * rho) *
                   std::exp(dt * gam + n.beta * z);
          },
          [&](const Vg& v) {
            const double s2 = v.sigma * v.sigma;
            const double order = t / v.nu - 0.5;
            if (z == 0.0 && order <= 0.0) return std::numeric_limits<double>::infinity();
            const double a = 2.0 * s2 / v.nu + v.theta * v.theta;
            const double pre = 2.0 * std::exp(v.theta * z / s2) /
                               (std::pow(v.nu, t / v.nu) * std::sqrt(2.0 * std::numbers::pi) * v.sigma *
                                std::tgamma(t / v.nu));
            // K_v(x) ~ Gamma(v)/2 (2/x)^v as x -> 0
            if (z == 0.0) return pre * 0.5 * std::tgamma(order) * std::pow(2.0 * s2 / a, order);
            const double arg = std::abs(z) * std::sqrt(a) / s2;
            return pre * std::pow(z * z / a, 0.5 * order) * std::cyl_bessel_k(std::abs(order), arg);
          },
          [&](const Cgmy&) { return 0.0; },
      },
      m.params);
}

double pdf_dsigma_closed_form(const LevyModel& m, double x, double t) {
  if (!(t > 0.0)) throw ParameterError("pdf_dsigma_closed_form: horizon must be positive");
  if (!has_closed_form(m) || !has_sigma_derivative(m))
    throw ParameterError("pdf_dsigma_closed_form: no closed form for " + model_name(m));
  const double z = x - drift(m) * t;
  const double p = pdf_closed_form(m, x, t);
  return std::visit(
      overloaded{
          [&](const Gbm& g) { return p * (z * z / (g.sigma * g.sigma * g.sigma * t) - 1.0 / g.sigma); },
          [&](const Nig&) { return 0.0; },  // closed form only without the Brownian part
          [&](const Vg& v) {
            const double s = v.sigma, s2 = s * s;
            const double order = t / v.nu - 0.5;
            const double A = 2.0 * s2 / v.nu + v.theta * v.theta, dA = 4.0 * s / v.nu;
            if (z == 0.0) {
              if (order <= 0.0) return std::numeric_limits<double>::quiet_NaN();
              return p * (-1.0 / s + order * (2.0 / s - dA / A));
            }
            const double B = std::sqrt(A) / s2;
            const double dB = 0.5 * dA / (std::sqrt(A) * s2) - 2.0 * std::sqrt(A) / (s2 * s);
            const double arg = B * std::abs(z);
            const double k = std::cyl_bessel_k(std::abs(order), arg);
            const double dk = -0.5 * (std::cyl_bessel_k(std::abs(order - 1.0), arg) +
                                      std::cyl_bessel_k(std::abs(order + 1.0), arg));
            return p * (-1.0 / s - 2.0 * v.theta * z / (s2 * s) - 0.5 * order * dA / A + std::abs(z) * dB * dk / k);
          },
          [&](const Cgmy&) { return 0.0; },
      },
      m.params);
}

Cumulants cumulants(const LevyModel& m, double t) {
  validate(m);
  const double w = compensator(m);
  const double base = (m.r - m.q + w) * t;
  return std::visit(
      overloaded{
          [&](const Gbm& g) { return Cumulants{base, g.sigma * g.sigma * t, 0.0}; },
          [&](const Nig& n) {
            const double a2 = n.alpha * n.alpha, b2 = n.beta * n.beta, g2 = a2 - b2;
            return Cumulants{base + n.delta * t * n.beta / std::sqrt(g2),
                             n.delta * t * a2 * std::pow(g2, -1.5) + n.sigma * n.sigma * t,
                             3.0 * n.delta * t * a2 * (a2 + 4.0 * b2) * std::pow(g2, -3.5)};
          },
          [&](const Vg& v) {
            const double s2 = v.sigma * v.sigma, th = v.theta, nu = v.nu;
            const double k4 = 3.0 * nu * (s2 * s2 + 2.0 * std::pow(th, 4) * nu * nu + 4.0 * s2 * th * th * nu);
            return Cumulants{(m.r - m.q + th + w) * t, (s2 + nu * th * th) * t, k4 * t};
          },
          [&](const Cgmy& c) {
            return Cumulants{base,
                             c.C * std::tgamma(2.0 - c.Y) * (std::pow(c.M, c.Y - 2.0) + std::pow(c.G, c.Y - 2.0)) * t,
                             c.C * std::tgamma(4.0 - c.Y) * (std::pow(c.M, c.Y - 4.0) + std::pow(c.G, c.Y - 4.0)) * t};
          },
      },
      m.params);
}

Interval truncation_interval(const LevyModel& m, double t, double Ln) {
  if (!(Ln >= 8.0 && Ln <= 12.0)) throw ParameterError("truncation_interval: L_n must lie in [8, 12]");
  if (!(t > 0.0)) throw ParameterError("truncation_interval: horizon must be positive");
  const Cumulants k = cumulants(m, t);
  double d = std::abs(k.c1 + Ln * std::sqrt(k.c2 + std::sqrt(k.c4)));
  if (!(d > 0.0)) throw ParameterError("truncation_interval: degenerate model gives an empty interval");
  if (t <= 0.2) d += 0.5;
  return Interval(-d, d);
}

}  // namespace conleg
