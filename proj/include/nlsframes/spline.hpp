#pragma once

#include <vector>

namespace nlsframes {

// Not-a-knot cubic spline on strictly increasing nodes.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;
  double derivative(double x) const;
  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

 private:
  std::vector<double> x_, y_, b_, c_, d_;  // y + b(dx) + c(dx)^2 + d(dx)^3
  std::size_t find(double x) const;
};

// Monotone piecewise-cubic interpolant (Fritsch-Carlson slopes). Used where a
// strictly monotone, invertible interpolant is required.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y);
  double operator()(double x) const;

 private:
  std::vector<double> x_, y_, m_;
  std::size_t find(double x) const;
};

// Cubic Hermite value on [x0, x1] from endpoint values and derivatives.
double hermite_eval(double x0, double x1, double y0, double y1, double d0, double d1, double x);
double hermite_deriv(double x0, double x1, double y0, double y1, double d0, double d1, double x);

}  // namespace nlsframes
