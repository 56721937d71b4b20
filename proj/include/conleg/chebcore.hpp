#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "conleg/errors.hpp"

namespace conleg {

inline constexpr double kDefaultTol = 1e-14;

struct Interval {
  double lo = -1.0;
  double hi = 1.0;

  Interval() = default;
  Interval(double a, double b);

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  double half_width() const { return 0.5 * (hi - lo); }
  bool contains(double x) const { return x >= lo && x <= hi; }
  // affine maps between [lo,hi] and [-1,1]
  double to_unit(double x) const { return (2.0 * x - (lo + hi)) / (hi - lo); }
  double from_unit(double s) const {
    if (s == -1.0) return lo;
    if (s == 1.0) return hi;
    return mid() + half_width() * s;
  }
};

// Clenshaw recurrence for sum c_k T_k(s), s in [-1,1]. Works for real or complex c.
template <class Derived>
typename Derived::Scalar clenshaw(const Eigen::MatrixBase<Derived>& c, double s) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = c.size();
  if (n == 0) return Scalar(0);
  if (n == 1) return c(0);
  Scalar b1(0), b2(0);
  const double two_s = 2.0 * s;
  for (Eigen::Index k = n - 1; k >= 1; --k) {
    Scalar b0 = c(k) + two_s * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return c(0) + s * b1 - b2;
}

class ChebSeries {
 public:
  ChebSeries();
  ChebSeries(Eigen::VectorXd coeffs, Interval dom);

  const Eigen::VectorXd& coeffs() const { return c_; }
  const Interval& domain() const { return dom_; }
  Eigen::Index degree() const { return c_.size() - 1; }

  double operator()(double x) const { return clenshaw(c_, dom_.to_unit(x)); }
  // largest |c_k|, a cheap scale for relative tolerances
  double coeff_scale() const;

 private:
  Eigen::VectorXd c_;
  Interval dom_;
};

// K pieces on K+1 strictly increasing breakpoints. Right-continuous at interior
// breakpoints; zero outside [breakpoints.front(), breakpoints.back()].
class PiecewiseFun {
 public:
  PiecewiseFun() = default;
  PiecewiseFun(std::vector<double> breakpoints, std::vector<ChebSeries> pieces);
  explicit PiecewiseFun(ChebSeries single);

  const std::vector<double>& breakpoints() const { return bp_; }
  const std::vector<ChebSeries>& pieces() const { return pieces_; }
  std::size_t size() const { return pieces_.size(); }
  bool empty() const { return pieces_.empty(); }
  Interval domain() const;

  double operator()(double x) const;
  // index of the piece used for x (right-continuous), or -1 outside the support
  long piece_index(double x) const;
  // upper bound on |f| from the coefficient sums
  double abs_bound() const;

 private:
  std::vector<double> bp_;
  std::vector<ChebSeries> pieces_;
};

struct FitOptions {
  double tol = kDefaultTol;
  // absolute scale the tolerance is measured against; 0 means "max |f| on the grid"
  double vscale = 0.0;
  int max_log2 = 16;
};

// Raised when adaptive_fit does not resolve f; carries the last attempt.
class FitError : public NumericalError {
 public:
  FitError(const std::string& what, ChebSeries best) : NumericalError(what), best_(std::move(best)) {}
  const ChebSeries& best() const { return best_; }

 private:
  ChebSeries best_;
};

using ScalarFn = std::function<double(double)>;

ChebSeries adaptive_fit(const ScalarFn& f, Interval dom, double tol = kDefaultTol);
ChebSeries adaptive_fit(const ScalarFn& f, Interval dom, const FitOptions& opt);
// fit f piece by piece between the given breakpoints
PiecewiseFun fit_piecewise(const ScalarFn& f, const std::vector<double>& breakpoints,
                           const FitOptions& opt = {});

double eval(const ChebSeries& s, double x);
double eval(const PiecewiseFun& p, double x);
Eigen::VectorXd eval(const PiecewiseFun& p, const Eigen::VectorXd& x);

ChebSeries differentiate(const ChebSeries& s, int order = 1);
PiecewiseFun differentiate(const PiecewiseFun& p, int order = 1);

std::vector<double> roots(const ChebSeries& s);
std::vector<double> roots(const ChebSeries& s, Interval dom);

PiecewiseFun pw_max(const PiecewiseFun& a, const PiecewiseFun& b, double tol = kDefaultTol);

// drop trailing coefficients with |c_n| <= tol * max|c|
ChebSeries simplify(const ChebSeries& s, double tol = kDefaultTol);
PiecewiseFun simplify(const PiecewiseFun& p, double tol = kDefaultTol);

// the same polynomial re-expanded on a subinterval (or a small extension of it)
ChebSeries restrict_to(const ChebSeries& s, Interval sub, double tol = kDefaultTol);
PiecewiseFun restrict_to(const PiecewiseFun& p, Interval sub, double tol = kDefaultTol);

double integrate(const ChebSeries& s);
double integrate(const PiecewiseFun& p);

// pointwise a*f + b*g over the union of breakpoints
PiecewiseFun lincomb(double a, const PiecewiseFun& f, double b, const PiecewiseFun& g,
                     double tol = kDefaultTol);
PiecewiseFun scale(const PiecewiseFun& f, double a);
// f(x) + g(x) where g is a plain function, refitted piece by piece
PiecewiseFun add_function(const PiecewiseFun& f, const ScalarFn& g, double tol = kDefaultTol);
// join pieces of functions on adjacent domains into one
PiecewiseFun concat(const std::vector<PiecewiseFun>& parts);
// remove interior breakpoints closer than rel_tol * width to a neighbour
std::vector<double> merge_breakpoints(std::vector<double> bp, double rel_tol);

// low level helpers shared with the other modules
Eigen::VectorXd cheb_points(Eigen::Index n);  // cos(j*pi/(n-1)), j = 0..n-1, descending
Eigen::VectorXd vals2coeffs(const Eigen::VectorXd& vals);  // values at cheb_points(n), n = 2^k+1
Eigen::Index standard_chop(const Eigen::VectorXd& c, double tol, double vscale = 0.0);

}  // namespace conleg
