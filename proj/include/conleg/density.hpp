#pragma once

#include <Eigen/Dense>

#include <vector>

#include "conleg/chebcore.hpp"
#include "conleg/levy.hpp"

namespace conleg {

// b_k = phi(-2 pi k / (d - c)), k = 0..N, for a density on [c, d]
struct CfsDensity {
  Eigen::VectorXcd b;
  Interval interval;
  double t = 0.0;
};

struct PadeApprox {
  Eigen::VectorXcd P;
  Eigen::VectorXcd Q;  // Q(0) = 1
};

struct DensityOptions {
  int N = 1024;           // Fourier terms
  int pade_m = 4;         // denominator degree for singularity search
  double ring_tol = 0.02; // how close to |z| = 1 a pole must sit
  double tol = kDefaultTol;
};

CfsDensity cfs_coeffs(const LevyModel& m, Interval interval, double t, int N);
// the truncated series (1/(d-c)) Re[b_0 + 2 sum b_k exp(i 2 pi k x/(d-c))], summed directly
double eval(const CfsDensity& d, double x);

double bessel_j(int n, double x);
// J_0(x) .. J_nmax(x) by Miller's downward recurrence
Eigen::VectorXd bessel_j_all(int nmax, double x);

// Chebyshev form of the truncated series on [c,d], or of x -> g_N(-x) on [-d,-c] when reflect is set
ChebSeries cfs_to_cheb(const CfsDensity& d, bool reflect);

PadeApprox fourier_pade(const Eigen::VectorXcd& b, int Np, int Mp);

std::vector<double> locate_singularities(const LevyModel& m, Interval interval, double t, int N,
                                         const DensityOptions& opt = {});

// g^R(x) = g(-x) as a piecewise series on [-d, -c]
PiecewiseFun build_reflected_density(const LevyModel& m, Interval interval, double t,
                                     const DensityOptions& opt = {});
// the same for d g / d sigma at fixed drift
PiecewiseFun build_reflected_density_dsigma(const LevyModel& m, Interval interval, double t,
                                            const DensityOptions& opt = {});

}  // namespace conleg
