#pragma once

#include <Eigen/Dense>

#include <utility>

#include "conleg/chebcore.hpp"

namespace conleg {

class LegSeries {
 public:
  LegSeries();
  LegSeries(Eigen::VectorXd coeffs, Interval dom);

  const Eigen::VectorXd& coeffs() const { return c_; }
  const Interval& domain() const { return dom_; }
  Eigen::Index degree() const { return c_.size() - 1; }

  double operator()(double x) const;

 private:
  Eigen::VectorXd c_;
  Interval dom_;
};

LegSeries cheb2leg(const ChebSeries& c);
ChebSeries leg2cheb(const LegSeries& l);

// raw coefficient transforms, no interval attached
Eigen::VectorXd cheb2leg(const Eigen::VectorXd& c);
Eigen::VectorXd leg2cheb(const Eigen::VectorXd& l);

// f*g for two series on intervals of the same width, split at the midpoint of its support
struct ConvResult {
  ChebSeries left;
  ChebSeries right;

  PiecewiseFun joined() const;
};

// Legendre coefficients of both halves on [-1,1] inputs; left lives on [-2,0], right on [0,2],
// each expanded in the local variable mapped to [-1,1]. No width scaling applied.
std::pair<Eigen::VectorXd, Eigen::VectorXd> leg_conv_kernel(const Eigen::VectorXd& alpha,
                                                           const Eigen::VectorXd& beta);

ConvResult conv_same_interval(const LegSeries& f, const LegSeries& g);

enum class ConvMode { full, same };

// mode=same keeps only the part of f*g over g's outer interval
PiecewiseFun conv_general(const PiecewiseFun& f, const PiecewiseFun& g, ConvMode mode = ConvMode::full,
                          double tol = kDefaultTol);
// f*g restricted to an explicit outer interval inside the support of f*g
PiecewiseFun conv_general(const PiecewiseFun& f, const PiecewiseFun& g, Interval outer, double tol = kDefaultTol);

// n-point Gauss-Legendre nodes and weights on [-1,1]
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int n);

}  // namespace conleg
