#pragma once

// Brute-force oracles for tests and the acceptance run. Nothing here touches the
// Chebyshev/Legendre convolution path.

#include <vector>

#include "conleg/levy.hpp"
#include "conleg/payoffs.hpp"
#include "conleg/pricing.hpp"

namespace conleg::reference {

enum class OptionType { call, put };

double norm_cdf(double x);
double bs_price(double S, double K, double r, double q, double sigma, double tau, OptionType type);

struct BsGreeks {
  double delta = 0.0, gamma = 0.0, vega = 0.0;
};
BsGreeks bs_greeks(double S, double K, double r, double q, double sigma, double tau, OptionType type);

// U(S, K) straight from the payoff table
double payoff(const PayoffSpec& spec, double S, double K);

// log-return density over a horizon t: closed form where there is one, otherwise a
// Fourier sum on a period several times wider than the truncation interval
class OracleDensity {
 public:
  OracleDensity(const LevyModel& m, double t);
  double operator()(double z) const;
  double t() const { return t_; }

 private:
  LevyModel m_;
  double t_;
  bool closed_;
  double P_ = 0.0;  // half period
  std::vector<std::complex<double>> c_;
};

struct QuadOptions {
  double tol = 1e-13;
  double widen = 1.5;  // multiple of the L_n = 12 truncation half-width
};

// e^{-r tau} E[U(S e^Z, K)] by tanh-sinh panels split at the payoff kink and the VG cusp
double quad_price_european(const LevyModel& model, const PayoffSpec& spec, const MarketParams& market, double K,
                           const QuadOptions& opt = {});

struct QuadGrid {
  int cells = 512;           // Gauss-Legendre cells, 8 nodes each
  double half_width = 0.0;   // 0: twice the truncation half-width for the full horizon
};

// Values V/K^p at the moneyness points xt = log(S/K), by backward induction on a cell grid.
// Bermudan call or put exercisable at schedule dates t_1..t_L.
std::vector<double> quad_backward_induction(const LevyModel& model, const PayoffSpec& spec, const MarketParams& market,
                                            const ExerciseSchedule& schedule, const std::vector<double>& xt,
                                            const QuadGrid& grid = {});
// Discrete knock-out with strike K; the xt points must use the same K.
std::vector<double> quad_backward_induction(const LevyModel& model, const PayoffSpec& spec, const MarketParams& market,
                                            double K, const BarrierSpec& barrier, const std::vector<double>& xt,
                                            const QuadGrid& grid = {});

struct FftGrid {
  int log2n = 15;
  double half_width = 6.0;
};

// Bermudan call or put with m equally spaced dates by FFT convolution on a uniform grid,
// values V/K at xt = log(S/K)
std::vector<double> dense_bermudan_fft(const LevyModel& model, const PayoffSpec& spec, const MarketParams& market,
                                       int m, const std::vector<double>& xt, const FftGrid& grid = {});

}  // namespace conleg::reference
