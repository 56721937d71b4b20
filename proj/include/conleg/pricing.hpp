#pragma once

#include <vector>

#include "conleg/curve.hpp"
#include "conleg/density.hpp"
#include "conleg/levy.hpp"
#include "conleg/payoffs.hpp"

namespace conleg {

// t_0 = t < t_1 < ... < t_L = T
struct ExerciseSchedule {
  std::vector<double> dates;

  int L() const { return static_cast<int>(dates.size()) - 1; }
  static ExerciseSchedule uniform(double t, double T, int L);
};

void validate(const ExerciseSchedule& s, const MarketParams& m);

enum class BarrierDirection { down_and_out, up_and_out };

struct BarrierSpec {
  double B = 0.0;
  double rebate = 0.0;  // paid at maturity on knock-out
  BarrierDirection direction = BarrierDirection::down_and_out;
  ExerciseSchedule schedule;
};

struct PricingOptions {
  double tol = kDefaultTol;
  double refit_tol = 1e-13;  // continuation curves between induction steps
  DensityOptions density;
};

PriceCurve price_european(const LevyModel& model, const PayoffSpec& spec, const MarketParams& market,
                          double Ln = 10.0, const PricingOptions& opt = {});

PriceCurve price_bermudan(const LevyModel& model, const PayoffSpec& spec, const MarketParams& market,
                          const ExerciseSchedule& schedule, double Ln = 10.0, const PricingOptions& opt = {});

// 4-point extrapolation over Bermudan prices with 2^L, 2^(L+1), 2^(L+2), 2^(L+3) dates
double richardson4(double v_m, double v_2m, double v_4m, double v_8m);
PriceCurve price_american(const LevyModel& model, const PayoffSpec& spec, const MarketParams& market, int L_base,
                          double Ln = 10.0, const PricingOptions& opt = {});

// discretely monitored knock-out; the curve holds for the strike K only
PriceCurve price_barrier(const LevyModel& model, const PayoffSpec& spec, const MarketParams& market, double K,
                         const BarrierSpec& barrier, double Ln = 10.0, const PricingOptions& opt = {});

}  // namespace conleg
