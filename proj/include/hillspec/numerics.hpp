// Small numerical utilities shared across the library: cubic splines on
// uniform grids, composite Simpson quadrature, bisection, medians, interval
// arithmetic and a Floquet-aware exponential decay-rate fit.
#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace hillspec {

// Cubic spline over a uniform grid x_i = x0 + i*h.
//
// NotAKnot interpolates n >= 4 values on [x0, x0+(n-1)h].
// Periodic interpolates n >= 3 values understood as samples on [x0, x0+n*h)
// of a function with period n*h; evaluation wraps.
class CubicSpline {
 public:
  enum class Boundary { NotAKnot, Periodic };

  CubicSpline() = default;
  CubicSpline(double x0, double h, std::vector<double> y, Boundary bc);

  double eval(double x) const;
  double deriv(double x) const;

  double x0() const { return x0_; }
  double h() const { return h_; }
  std::size_t size() const { return y_.size(); }
  const std::vector<double>& values() const { return y_; }
  bool periodic() const { return bc_ == Boundary::Periodic; }
  // Total span: (n-1)h clamped domain for NotAKnot, n*h period for Periodic.
  double span() const;

 private:
  void locate(double x, std::size_t& i, double& dx) const;

  double x0_ = 0.0, h_ = 1.0;
  std::vector<double> y_, m_;  // node values and second derivatives
  Boundary bc_ = Boundary::NotAKnot;
};

// Composite Simpson over uniformly spaced samples (3/8 rule absorbs an odd
// final panel). Requires at least 3 samples.
double simpson(const std::vector<double>& y, double h);

// Median of a sequence (copy is made; empty input is a domain error).
double median(std::vector<double> v);

// Bisection for a root of f on [a,b] given f(a)*f(b) < 0; returns the
// midpoint of the final bracket of width <= xtol.
double bisect(const std::function<double(double)>& f, double a, double b,
              double fa, double fb, double xtol);

// Fitted exponential decay rate r of |y| ~ C(z) e^{-r z} where C has the
// given period: the slope is measured along period-strided progressions
// log|y(z)| - log|y(z+period)| so the periodic modulation cancels exactly,
// and the median over all start points suppresses isolated near-zeros of the
// modulation. y holds samples on the uniform grid z_j = z0 + j*h; pairs with
// both endpoints inside [lo, hi] are used.
double fit_decay_rate(double z0, double h, const std::vector<double>& y,
                      double lo, double hi, double period);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;  // +infinity marks a half-line
};

// Union of closed intervals: sort, then merge pairs that overlap or come
// within gap_tol of touching.
std::vector<Interval> merge_intervals(std::vector<Interval> v, double gap_tol);

}  // namespace hillspec
