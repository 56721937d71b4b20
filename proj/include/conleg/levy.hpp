#pragma once

#include <complex>
#include <string>
#include <variant>

#include "conleg/chebcore.hpp"

namespace conleg {

struct Gbm {
  double sigma = 0.0;
};

// sigma adds an independent Brownian part; the closed-form pdf needs sigma == 0
struct Nig {
  double alpha = 0.0, beta = 0.0, delta = 0.0, sigma = 0.0;
};

struct Vg {
  double sigma = 0.0, theta = 0.0, nu = 0.0;
};

// Y must avoid 0 and 1 where Gamma(-Y) has poles
struct Cgmy {
  double C = 0.0, G = 0.0, M = 0.0, Y = 0.0;
};

using LevyParams = std::variant<Gbm, Nig, Vg, Cgmy>;

struct LevyModel {
  LevyParams params;
  double r = 0.0;
  double q = 0.0;

  LevyModel() = default;
  LevyModel(LevyParams p, double r_, double q_);  // validates
};

struct Cumulants {
  double c1 = 0.0, c2 = 0.0, c4 = 0.0;
};

void validate(const LevyModel& m);
std::string model_name(const LevyModel& m);

// log E[exp(iuX_1)] of the driftless part, so phi(u;t) = exp(t (iu(r-q+omega) + psi(u)))
std::complex<double> char_exponent(const LevyModel& m, std::complex<double> u);
double compensator(const LevyModel& m);
double drift(const LevyModel& m);  // r - q + omega
std::complex<double> char_fn(const LevyModel& m, std::complex<double> u, double t);
// d phi / d sigma with omega moving along; GBM, VG and the Brownian part of NIG
bool has_sigma_derivative(const LevyModel& m);
std::complex<double> char_fn_dsigma(const LevyModel& m, std::complex<double> u, double t);
// same with the drift r - q + omega held fixed; the full one adds i u t phi d(omega)/d(sigma)
std::complex<double> char_fn_dsigma_centred(const LevyModel& m, std::complex<double> u, double t);
double compensator_dsigma(const LevyModel& m);

bool has_closed_form(const LevyModel& m);
double pdf_closed_form(const LevyModel& m, double x, double t);
// d/d(sigma) of the density with the drift held fixed (GBM, VG)
double pdf_dsigma_closed_form(const LevyModel& m, double x, double t);

Cumulants cumulants(const LevyModel& m, double t);
Interval truncation_interval(const LevyModel& m, double t, double Ln = 10.0);

}  // namespace conleg
